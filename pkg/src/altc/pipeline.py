"""End-to-end text classifier: prep config + vocabulary + OvR heads.

The trained artifact serializes to a single JSON document so inference
always reuses the exact train-time preprocessing and feature space:

    {"version": 1, "schema": [...], "prep": {...}, "vocab_ref": {...},
     "heads": [{"w": [...], "b": ...}], "train_config": {...}}

``vocab_ref`` holds the vocabulary inline by default; a string value is
treated as a path to a vocabulary JSON file relative to the artifact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import LabeledDocument, LabelSchema, distribution
from .errors import SchemaMismatchError
from .linear_model import (
    ClassWeights,
    OvrLinearModel,
    TrainConfig,
    compute_class_weights,
    fit,
    predict_proba,
)
from .textprep import PrepConfig, normalize, tokenize
from .tfidf import SparseVector, Vocabulary, fit_vocabulary, transform

ARTIFACT_FORMAT_VERSION = 1


@dataclass(frozen=True)
class Featurizer:
    """Maps raw text to TF-IDF vectors through a frozen prep + vocabulary."""

    prep: PrepConfig
    vocab: Vocabulary
    sublinear_tf: bool = False

    @classmethod
    def fit(
        cls,
        texts: list[str],
        prep: PrepConfig = PrepConfig(),
        min_df: int = 1,
        max_vocab: int | None = None,
        sublinear_tf: bool = False,
    ) -> "Featurizer":
        token_lists = [tokenize(normalize(t, prep), prep) for t in texts]
        vocab = fit_vocabulary(token_lists, min_df=min_df, max_vocab=max_vocab)
        return cls(prep=prep, vocab=vocab, sublinear_tf=sublinear_tf)

    def featurize(self, text: str) -> SparseVector:
        tokens = tokenize(normalize(text, self.prep), self.prep)
        return transform(tokens, self.vocab, sublinear_tf=self.sublinear_tf)


@dataclass
class TextClassifier:
    """A schema-aware OvR model with its featurization pipeline attached."""

    schema: LabelSchema
    featurizer: Featurizer
    model: OvrLinearModel
    train_config: TrainConfig

    def predict_proba(self, text: str) -> np.ndarray:
        return predict_proba(self.model, self.featurizer.featurize(text))

    def predict(self, text: str) -> int:
        return int(np.argmax(self.predict_proba(text)))

    def predict_name(self, text: str) -> str:
        return self.schema.names[self.predict(text)]

    def to_dict(self, inline_vocab: bool = True, vocab_path: str = "") -> dict:
        vocab_ref: dict | str
        if inline_vocab:
            vocab_ref = json.loads(self.featurizer.vocab.to_json())
        else:
            vocab_ref = vocab_path
        return {
            "version": ARTIFACT_FORMAT_VERSION,
            "schema": list(self.schema.names),
            "prep": self.featurizer.prep.to_dict(),
            "vocab_ref": vocab_ref,
            "heads": [
                {"w": self.model.weights[k].tolist(),
                 "b": float(self.model.biases[k])}
                for k in range(self.model.num_classes)
            ],
            "train_config": self.train_config.to_dict(),
            "tfidf": {"sublinear_tf": self.featurizer.sublinear_tf},
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), ensure_ascii=False), encoding="utf-8")

    @classmethod
    def from_dict(cls, obj: dict, base_dir: Path | None = None) -> "TextClassifier":
        if obj.get("version") != ARTIFACT_FORMAT_VERSION:
            raise ValueError(f"unsupported artifact version {obj.get('version')!r}")
        schema = LabelSchema(names=tuple(obj["schema"]))
        vocab_ref = obj["vocab_ref"]
        if isinstance(vocab_ref, str):
            vocab_file = Path(vocab_ref)
            if base_dir is not None and not vocab_file.is_absolute():
                vocab_file = base_dir / vocab_file
            vocab = Vocabulary.load(vocab_file)
        else:
            vocab = Vocabulary.from_json(json.dumps(vocab_ref))
        featurizer = Featurizer(
            prep=PrepConfig.from_dict(obj["prep"]),
            vocab=vocab,
            sublinear_tf=bool(obj.get("tfidf", {}).get("sublinear_tf", False)),
        )
        heads = obj["heads"]
        if len(heads) != schema.num_classes:
            raise SchemaMismatchError(list(schema.names),
                                      [f"head_{i}" for i in range(len(heads))])
        weights = np.array([h["w"] for h in heads], dtype=np.float64)
        biases = np.array([h["b"] for h in heads], dtype=np.float64)
        model = OvrLinearModel(weights=weights, biases=biases)
        return cls(schema=schema, featurizer=featurizer, model=model,
                   train_config=TrainConfig.from_dict(obj["train_config"]))

    @classmethod
    def load(cls, path: str | Path) -> "TextClassifier":
        path = Path(path)
        obj = json.loads(path.read_text(encoding="utf-8"))
        return cls.from_dict(obj, base_dir=path.parent)


def train_classifier(
    docs: list[LabeledDocument],
    schema: LabelSchema,
    prep: PrepConfig = PrepConfig(),
    train_config: TrainConfig = TrainConfig(),
    min_df: int = 1,
    max_vocab: int | None = None,
    sublinear_tf: bool = False,
    class_weights: ClassWeights | None = None,
    val: list[LabeledDocument] | None = None,
) -> tuple[TextClassifier, list[float]]:
    """Fit featurizer and model on a labeled corpus.

    Class weights default to balanced inverse frequency computed from the
    training distribution.
    """
    featurizer = Featurizer.fit(
        [d.doc.text for d in docs], prep=prep, min_df=min_df,
        max_vocab=max_vocab, sublinear_tf=sublinear_tf)
    if class_weights is None:
        class_weights = compute_class_weights(distribution(docs, schema))
    train_pairs = [(featurizer.featurize(d.doc.text), d.label) for d in docs]
    val_pairs = None
    if val:
        val_pairs = [(featurizer.featurize(d.doc.text), d.label) for d in val]
    model, history = fit(train_pairs, train_config, class_weights, val=val_pairs)
    clf = TextClassifier(schema=schema, featurizer=featurizer, model=model,
                         train_config=train_config)
    return clf, history
