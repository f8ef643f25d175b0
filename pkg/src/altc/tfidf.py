"""Vocabulary construction and TF-IDF featurization.

Features use raw term counts (optionally sublinear 1+ln(tf)) scaled by the
smoothed inverse document frequency ln((1+N)/(1+df)) + 1, then L2
normalization, giving strictly positive idf and a bounded feature scale
that keeps gradient descent stable.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import EmptyCorpusError

VOCAB_FORMAT_VERSION = 1


@dataclass(frozen=True)
class Vocabulary:
    """Immutable term -> index map with per-term document frequencies.

    Indices are dense 0..V-1, assigned in sorted-term order, so two fits on
    the same corpus produce identical maps.
    """

    index: dict[str, int]
    document_frequency: np.ndarray  # int64, aligned with index values
    corpus_size: int

    def __len__(self) -> int:
        return len(self.index)

    @property
    def terms(self) -> list[str]:
        """Terms in index order."""
        out = [""] * len(self.index)
        for t, i in self.index.items():
            out[i] = t
        return out

    def idf(self) -> np.ndarray:
        """Smoothed idf per index: ln((1+N)/(1+df)) + 1."""
        return np.log((1.0 + self.corpus_size)
                      / (1.0 + self.document_frequency)) + 1.0

    def to_json(self) -> str:
        terms = self.terms
        return json.dumps(
            {"version": VOCAB_FORMAT_VERSION,
             "corpus_size": self.corpus_size,
             "terms": [{"t": t, "df": int(self.document_frequency[i])}
                       for i, t in enumerate(terms)]},
            ensure_ascii=False,
        )

    @classmethod
    def from_json(cls, text: str) -> "Vocabulary":
        obj = json.loads(text)
        if obj.get("version") != VOCAB_FORMAT_VERSION:
            raise ValueError(f"unsupported vocabulary version {obj.get('version')!r}")
        index = {rec["t"]: i for i, rec in enumerate(obj["terms"])}
        df = np.array([rec["df"] for rec in obj["terms"]], dtype=np.int64)
        return cls(index=index, document_frequency=df,
                   corpus_size=int(obj["corpus_size"]))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Vocabulary":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class SparseVector:
    """Sparse feature vector: strictly increasing indices, nonzero values."""

    indices: np.ndarray  # int64, strictly increasing
    values: np.ndarray   # float64, all nonzero
    dim: int

    @property
    def nnz(self) -> int:
        return len(self.indices)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.values ** 2)))

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out


def fit_vocabulary(
    corpora_tokens: list[list[str]],
    min_df: int = 1,
    max_vocab: int | None = None,
) -> Vocabulary:
    """Build a vocabulary from tokenized documents.

    Terms must appear in at least ``min_df`` documents; if ``max_vocab`` is
    set, the highest-df terms are kept with a lexicographic tie-break.
    """
    if not corpora_tokens:
        raise EmptyCorpusError("cannot fit a vocabulary on an empty corpus")
    if min_df < 1:
        raise ValueError(f"min_df must be >= 1, got {min_df}")

    df_counter: Counter[str] = Counter()
    for tokens in corpora_tokens:
        df_counter.update(set(tokens))

    kept = [t for t, df in df_counter.items() if df >= min_df]
    if max_vocab is not None and len(kept) > max_vocab:
        kept.sort(key=lambda t: (-df_counter[t], t))
        kept = kept[:max_vocab]
    kept.sort()

    index = {t: i for i, t in enumerate(kept)}
    df = np.array([df_counter[t] for t in kept], dtype=np.int64)
    return Vocabulary(index=index, document_frequency=df,
                      corpus_size=len(corpora_tokens))


def transform(
    tokens: list[str],
    vocab: Vocabulary,
    sublinear_tf: bool = False,
) -> SparseVector:
    """TF-IDF featurize one tokenized document, L2-normalized.

    Out-of-vocabulary tokens are dropped; an all-OOV (or empty) document
    maps to the zero vector.
    """
    counts: Counter[int] = Counter()
    for t in tokens:
        i = vocab.index.get(t)
        if i is not None:
            counts[i] += 1
    if not counts:
        return SparseVector(indices=np.empty(0, dtype=np.int64),
                            values=np.empty(0), dim=len(vocab))

    indices = np.array(sorted(counts), dtype=np.int64)
    tf = np.array([counts[i] for i in indices], dtype=np.float64)
    if sublinear_tf:
        tf = 1.0 + np.log(tf)
    df = vocab.document_frequency[indices]
    idf = np.log((1.0 + vocab.corpus_size) / (1.0 + df)) + 1.0
    values = tf * idf
    values /= math.sqrt(float(np.sum(values ** 2)))
    return SparseVector(indices=indices, values=values, dim=len(vocab))


def stack(vectors: list[SparseVector]) -> sp.csr_matrix:
    """Stack sparse vectors into one CSR matrix for batch linear algebra."""
    if not vectors:
        raise EmptyCorpusError("cannot stack zero vectors")
    dim = vectors[0].dim
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    for i, v in enumerate(vectors):
        if v.dim != dim:
            raise ValueError(f"inconsistent dimensions: {v.dim} != {dim}")
        indptr[i + 1] = indptr[i] + v.nnz
    indices = np.concatenate([v.indices for v in vectors])
    data = np.concatenate([v.values for v in vectors])
    return sp.csr_matrix((data, indices, indptr), shape=(len(vectors), dim))
