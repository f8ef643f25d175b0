"""altc: active-learning toolkit for imbalanced multiclass text classification.

Corpus ingestion, deterministic text prep, TF-IDF featurization, one-vs-rest
logistic regression trained on class-weighted cross-entropy, an entropy
uncertainty-sampling acquisition loop with simulated or human oracles, and a
full evaluation harness.
"""

from .corpus import (
    ClassDistribution,
    DEFAULT_LABELS,
    Document,
    LabeledDocument,
    LabelSchema,
    distribution,
    export,
    ingest,
    stratified_split,
)
from .textprep import PrepConfig, normalize, tokenize
from .tfidf import SparseVector, Vocabulary, fit_vocabulary, stack, transform
from .linear_model import (
    ClassWeights,
    LineProtocolProbabilitySource,
    OvrLinearModel,
    ProbabilitySource,
    TrainConfig,
    compute_class_weights,
    fit,
    loss_gradient,
    predict_label,
    predict_proba,
    predict_proba_matrix,
    weighted_bce_loss,
)
from .active_learning import (
    AcquisitionConfig,
    ActiveLearningState,
    HumanOracle,
    SimulatedOracle,
    oracle_label,
    run_loop,
    select_batch,
    stratified_seed,
    uncertainty,
    uncertainty_many,
    write_history,
)
from .metrics import (
    ConfusionMatrix,
    EvaluationReport,
    compare_runs,
    comparison_csv,
    confusion,
    report,
)
from .pipeline import Featurizer, TextClassifier, train_classifier

__version__ = "0.1.0"
