"""Pool-based active learning with entropy uncertainty sampling.

Each round scores every pool document by predictive uncertainty, picks the
batch with the highest total uncertainty (per-item scores are independent,
so the top-b items are exactly the maximizing batch), asks an oracle for
labels, moves the batch from the pool into the labeled set, retrains, and
evaluates.  The per-iteration history is the data behind learning-curve
plots and label-budget comparisons against random sampling.

Because the model's sigmoid heads are independent, their outputs need not
sum to one; the default entropy mode renormalizes them into a categorical
distribution first, while ``binary_sum`` instead adds up the K binary
entropies.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol

import numpy as np

from .corpus import Document, LabeledDocument, LabelSchema, distribution
from .errors import (
    AllZeroVectorError,
    EmptyPoolError,
    MissingGoldLabelError,
    SessionCancelledError,
)
from .linear_model import (
    ClassWeights,
    OvrLinearModel,
    TrainConfig,
    compute_class_weights,
    fit,
    predict_proba_matrix,
)
from .metrics import confusion, report
from .pipeline import Featurizer
from .tfidf import SparseVector, stack

STRATEGIES = ("entropy", "random")
ENTROPY_MODES = ("categorical_normalized", "binary_sum")


@dataclass
class AcquisitionConfig:
    batch_size: int
    max_iterations: int | None = None   # None = run until the pool is empty
    seed_size: int = 0
    strategy: str = "entropy"
    multilabel_entropy_mode: str = "categorical_normalized"
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1 (or None)")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}")
        if self.multilabel_entropy_mode not in ENTROPY_MODES:
            raise ValueError(f"entropy mode must be one of {ENTROPY_MODES}")


@dataclass
class ActiveLearningState:
    """Labeled set L_t, unlabeled pool U, and the per-iteration history."""

    labeled: list[LabeledDocument]
    pool: list[Document]
    iteration: int = 0
    history: list[dict] = field(default_factory=list)

    def __post_init__(self):
        labeled_ids = {d.doc.id for d in self.labeled}
        pool_ids = {d.id for d in self.pool}
        overlap = labeled_ids & pool_ids
        if overlap:
            raise ValueError(f"labeled set and pool share ids: {sorted(overlap)[:5]}")


def uncertainty(p: np.ndarray, mode: str = "categorical_normalized") -> float:
    """Natural-log entropy of one prediction; 0*log(0) counts as 0.

    ``categorical_normalized`` renormalizes p to sum to one (raising
    :class:`AllZeroVectorError` when it cannot) and peaks at ln K for the
    uniform vector; ``binary_sum`` adds the K independent binary entropies.
    """
    p = np.asarray(p, dtype=np.float64)
    if np.any(p < 0) or np.any(p > 1):
        raise ValueError("probabilities must lie in [0, 1]")
    if mode == "categorical_normalized":
        s = p.sum()
        if s == 0.0:
            raise AllZeroVectorError("cannot renormalize an all-zero vector")
        q = p / s
        nz = q > 0
        return float(-np.sum(q[nz] * np.log(q[nz])))
    if mode == "binary_sum":
        total = 0.0
        for pk in p:
            for q in (pk, 1.0 - pk):
                if q > 0:
                    total -= q * np.log(q)
        return float(total)
    raise ValueError(f"entropy mode must be one of {ENTROPY_MODES}")


def uncertainty_many(probs: np.ndarray, mode: str = "categorical_normalized") -> np.ndarray:
    """Vectorized :func:`uncertainty` over rows of an (n, K) matrix."""
    probs = np.asarray(probs, dtype=np.float64)
    if mode == "categorical_normalized":
        sums = probs.sum(axis=1, keepdims=True)
        if np.any(sums == 0.0):
            raise AllZeroVectorError("cannot renormalize an all-zero vector")
        q = probs / sums
        return -np.sum(np.where(q > 0, q * np.log(np.where(q > 0, q, 1.0)), 0.0),
                       axis=1)
    if mode == "binary_sum":
        out = np.zeros(len(probs))
        for q in (probs, 1.0 - probs):
            out -= np.sum(np.where(q > 0, q * np.log(np.where(q > 0, q, 1.0)),
                                   0.0), axis=1)
        return out
    raise ValueError(f"entropy mode must be one of {ENTROPY_MODES}")


def _pool_probabilities(
    source,
    pool: list[Document],
    features: dict[str, SparseVector] | None,
) -> np.ndarray:
    """(n, K) probabilities for the pool from a model or adapter."""
    if isinstance(source, OvrLinearModel):
        if features is None:
            raise ValueError("an OvR model needs featurized pool documents")
        return predict_proba_matrix(source, stack([features[d.id] for d in pool]))
    if hasattr(source, "predict_proba_text"):
        return np.array([source.predict_proba_text(d.id, d.text) for d in pool])
    if features is None:
        raise ValueError("a ProbabilitySource needs featurized pool documents")
    return np.array([source.predict_proba(features[d.id]) for d in pool])


def top_k_by_score(ids: list[str], scores: np.ndarray, k: int) -> list[str]:
    """Ids of the k highest scores, descending; ties break by ascending id."""
    order = sorted(range(len(ids)), key=lambda i: (-scores[i], ids[i]))
    return [ids[i] for i in order[:k]]


def select_batch(
    source,
    pool: list[Document],
    features: dict[str, SparseVector] | None,
    batch_size: int,
    strategy: str = "entropy",
    *,
    mode: str = "categorical_normalized",
    rng: np.random.Generator | None = None,
) -> list[str]:
    """Pick the next batch of document ids from the pool.

    ``entropy`` returns the ``batch_size`` most uncertain documents, which
    maximizes the batch's total uncertainty because the per-item scores do
    not interact.  ``random`` draws a seeded uniform sample without
    replacement.  A batch size beyond the pool returns the whole pool.
    """
    if not pool:
        raise EmptyPoolError("cannot select from an empty pool")
    b = min(batch_size, len(pool))
    if strategy == "random":
        if rng is None:
            raise ValueError("random strategy needs a seeded generator")
        picked = rng.choice(len(pool), size=b, replace=False)
        return [pool[i].id for i in picked]
    if strategy != "entropy":
        raise ValueError(f"strategy must be one of {STRATEGIES}")
    probs = _pool_probabilities(source, pool, features)
    scores = uncertainty_many(probs, mode)
    return top_k_by_score([d.id for d in pool], scores, b)


class Oracle(Protocol):
    """Label source: a hidden gold map in simulation or a human annotator."""

    def label_batch(self, batch: list[Document]) -> list[LabeledDocument]: ...


class SimulatedOracle:
    """Oracle backed by a hidden id -> label map (labels from the dataset)."""

    def __init__(self, gold: dict[str, int]):
        self._gold = dict(gold)

    @classmethod
    def from_corpus(cls, docs: list[LabeledDocument]) -> "SimulatedOracle":
        return cls({d.doc.id: d.label for d in docs})

    def label_batch(self, batch: list[Document]) -> list[LabeledDocument]:
        out = []
        for doc in batch:
            if doc.id not in self._gold:
                raise MissingGoldLabelError(doc.id)
            out.append(LabeledDocument(doc=doc, label=self._gold[doc.id]))
        return out


class HumanOracle:
    """Oracle fed by annotator submissions from another thread.

    ``label_batch`` blocks until every document in the batch has a label
    (last write wins per id until then) or the session is cancelled.
    """

    def __init__(self):
        self._cond = threading.Condition()
        self._pending_ids: list[str] | None = None
        self._received: dict[str, int] = {}
        self._cancelled = False

    @property
    def pending_ids(self) -> list[str] | None:
        with self._cond:
            return None if self._pending_ids is None else list(self._pending_ids)

    @property
    def received(self) -> dict[str, int]:
        with self._cond:
            return dict(self._received)

    def submit(self, doc_id: str, label: int) -> None:
        """Record one label; raises KeyError if the doc is not pending."""
        with self._cond:
            if self._pending_ids is None or doc_id not in self._pending_ids:
                raise KeyError(doc_id)
            self._received[doc_id] = label
            self._cond.notify_all()

    def cancel(self) -> None:
        with self._cond:
            self._cancelled = True
            self._cond.notify_all()

    def label_batch(self, batch: list[Document]) -> list[LabeledDocument]:
        with self._cond:
            if self._cancelled:
                raise SessionCancelledError("annotation session was cancelled")
            self._pending_ids = [d.id for d in batch]
            self._received = {}
            self._cond.notify_all()
            while not self._cancelled and len(self._received) < len(batch):
                self._cond.wait()
            if self._cancelled:
                raise SessionCancelledError("annotation session was cancelled")
            labels = dict(self._received)
            self._pending_ids = None
            self._received = {}
        return [LabeledDocument(doc=d, label=labels[d.id]) for d in batch]


def oracle_label(batch: list[Document], oracle: Oracle) -> list[LabeledDocument]:
    """Obtain a schema-valid label for every batch document."""
    return oracle.label_batch(batch)


def stratified_seed(
    docs: list[LabeledDocument],
    seed_size: int,
    num_classes: int,
    seed: int,
) -> tuple[list[LabeledDocument], list[LabeledDocument]]:
    """Split off an initial labeled set with at least one doc per class.

    Allocation is proportional to the class distribution (largest
    remainders resolve rounding), so heavily imbalanced corpora still seed
    every class.  Returns (seed set, remainder), both in corpus order.
    """
    if seed_size < num_classes:
        raise ValueError(f"seed_size {seed_size} < number of classes {num_classes}")
    if seed_size > len(docs):
        raise ValueError(f"seed_size {seed_size} exceeds corpus size {len(docs)}")

    by_class: dict[int, list[int]] = {}
    for i, d in enumerate(docs):
        by_class.setdefault(d.label, []).append(i)
    present = sorted(by_class)
    total = len(docs)

    exact = {k: seed_size * len(by_class[k]) / total for k in present}
    alloc = {k: max(1, int(exact[k])) for k in present}
    # Largest-remainder correction toward exactly seed_size.
    while sum(alloc.values()) < seed_size:
        k = max(present, key=lambda c: (exact[c] - alloc[c], -c))
        alloc[k] += 1
    while sum(alloc.values()) > seed_size:
        k = min((c for c in present if alloc[c] > 1),
                key=lambda c: (exact[c] - alloc[c], -c))
        alloc[k] -= 1

    rng = np.random.default_rng(seed)
    chosen: set[int] = set()
    for k in present:
        members = by_class[k]
        picked = rng.permutation(len(members))[:alloc[k]]
        chosen.update(members[i] for i in picked)
    seed_docs = [d for i, d in enumerate(docs) if i in chosen]
    rest = [d for i, d in enumerate(docs) if i not in chosen]
    return seed_docs, rest


def run_loop(
    state: ActiveLearningState,
    cfg: AcquisitionConfig,
    train_cfg: TrainConfig,
    eval_set: list[LabeledDocument] | None,
    oracle: Oracle,
    featurizer: Featurizer,
    schema: LabelSchema,
    *,
    class_weighting: bool = True,
    warm_start: bool = False,
    batch_hook: Callable[[int, list[Document], np.ndarray, np.ndarray], None] | None = None,
    iteration_hook: Callable[[dict, OvrLinearModel, ActiveLearningState], None] | None = None,
) -> tuple[OvrLinearModel, ActiveLearningState]:
    """Drive the acquisition loop until T iterations or pool exhaustion.

    History entry 0 describes the model trained on the seed set alone;
    each completed round appends one more record.  The default is a full
    retrain from zeros every round, which keeps iterations comparable;
    ``warm_start`` reuses the previous round's parameters as init.

    When ``eval_set`` is None (live annotation sessions without a held-out
    dev set), metrics are computed on the labeled set itself and the
    record says so via ``"eval_on": "labeled_set"``.
    """
    if not state.labeled:
        raise ValueError("the seed labeled set must be nonempty")
    if eval_set is not None:
        eval_ids = {d.doc.id for d in eval_set}
        used = {d.doc.id for d in state.labeled} | {d.id for d in state.pool}
        if eval_ids & used:
            raise ValueError("eval set must be disjoint from pool and labeled set")

    feats: dict[str, SparseVector] = {}
    for d in state.labeled:
        feats[d.doc.id] = featurizer.featurize(d.doc.text)
    for d in state.pool:
        feats[d.id] = featurizer.featurize(d.text)
    eval_x = None
    eval_gold = None
    if eval_set is not None:
        eval_x = stack([featurizer.featurize(d.doc.text) for d in eval_set])
        eval_gold = [d.label for d in eval_set]

    rng = np.random.default_rng(cfg.seed)
    k = schema.num_classes

    def retrain(current: OvrLinearModel | None) -> tuple[OvrLinearModel, list[float]]:
        pairs = [(feats[d.doc.id], d.label) for d in state.labeled]
        if class_weighting:
            cw = compute_class_weights(distribution(state.labeled, schema))
        else:
            cw = ClassWeights.uniform(k)
        init = current if (warm_start and current is not None) else None
        return fit(pairs, train_cfg, cw, init=init)

    def evaluate(model: OvrLinearModel) -> dict:
        if eval_x is not None:
            probs = predict_proba_matrix(model, eval_x)
            gold = eval_gold
        else:
            probs = predict_proba_matrix(
                model, stack([feats[d.doc.id] for d in state.labeled]))
            gold = [d.label for d in state.labeled]
        pred = np.argmax(probs, axis=1).tolist()
        rep = report(confusion(gold, pred, k))
        return {"macro_f1": rep.macro.f1, "micro_f1": rep.micro.f1,
                "accuracy": rep.accuracy}

    def record(model: OvrLinearModel, loss_history: list[float]) -> dict:
        rec = {"t": state.iteration, "labeled": len(state.labeled)}
        rec.update(evaluate(model))
        rec["mean_train_loss"] = loss_history[-1]
        if eval_x is None:
            rec["eval_on"] = "labeled_set"
        state.history.append(rec)
        if iteration_hook is not None:
            iteration_hook(rec, model, state)
        return rec

    model, losses = retrain(None)
    record(model, losses)

    while state.pool and (cfg.max_iterations is None
                          or state.iteration < cfg.max_iterations):
        probs = _pool_probabilities(model, state.pool, feats)
        scores = uncertainty_many(probs, cfg.multilabel_entropy_mode)
        if cfg.strategy == "entropy":
            batch_ids = top_k_by_score(
                [d.id for d in state.pool], scores,
                min(cfg.batch_size, len(state.pool)))
        else:
            picked = rng.choice(len(state.pool),
                                size=min(cfg.batch_size, len(state.pool)),
                                replace=False)
            batch_ids = [state.pool[i].id for i in picked]

        by_id = {d.id: i for i, d in enumerate(state.pool)}
        batch_docs = [state.pool[by_id[i]] for i in batch_ids]
        if batch_hook is not None:
            rows = [by_id[i] for i in batch_ids]
            batch_hook(state.iteration + 1, batch_docs, probs[rows], scores[rows])

        labeled_batch = oracle_label(batch_docs, oracle)

        batch_set = set(batch_ids)
        state.pool = [d for d in state.pool if d.id not in batch_set]
        state.labeled = state.labeled + labeled_batch
        state.iteration += 1

        model, losses = retrain(model)
        record(model, losses)

    return model, state


def history_jsonl(history: list[dict]) -> str:
    """History records as JSON lines, one per iteration."""
    return "".join(json.dumps(rec, ensure_ascii=False) + "\n" for rec in history)


def write_history(history: list[dict], path: str | Path) -> None:
    Path(path).write_text(history_jsonl(history), encoding="utf-8")
