"""Synthetic bag-of-words corpora for experiments and self-checks.

Documents are bags of alphabetic tokens (so the default normalization
pipeline passes them through): each class owns a set of indicative terms,
mixed with Zipf-weighted shared noise terms.  ``indicative_prob`` controls
how strongly a document signals its class, i.e. how separable the corpus
is.  Token sampling, document lengths, and corpus order are all driven by
one seed, so a generated corpus is reproducible byte for byte.
"""

from __future__ import annotations

import numpy as np

from .corpus import Document, LabeledDocument


def _letters(n: int) -> str:
    """0 -> a, 1 -> b, ..., 26 -> aa: base-26 spelling with letters only."""
    out = []
    n += 1
    while n > 0:
        n, rem = divmod(n - 1, 26)
        out.append(chr(ord("a") + rem))
    return "".join(reversed(out))


def scaled_counts(ratio: tuple[int, ...], total: int) -> list[int]:
    """Scale a class-count ratio to a given total (largest remainders)."""
    weights = np.asarray(ratio, dtype=np.float64)
    exact = weights * total / weights.sum()
    counts = np.floor(exact).astype(int)
    remainders = exact - counts
    for i in np.argsort(-remainders)[: total - counts.sum()]:
        counts[i] += 1
    return counts.tolist()


def gaussian_bag_corpus(
    counts: list[int],
    seed: int,
    *,
    n_indicative: int = 40,
    n_shared: int = 300,
    indicative_prob: float = 0.3,
    doc_len_mean: float = 16.0,
    doc_len_sd: float = 4.0,
    id_prefix: str = "d",
) -> list[LabeledDocument]:
    """Generate a labeled corpus with ``counts[k]`` documents of class k.

    Each token is class-indicative with probability ``indicative_prob``
    and shared noise otherwise; document lengths follow a clipped Gaussian.
    The result is shuffled, so classes are interleaved.
    """
    rng = np.random.default_rng(seed)
    k = len(counts)
    class_vocab = [
        [f"q{_letters(c)}{_letters(i)}" for i in range(n_indicative)]
        for c in range(k)
    ]
    shared_vocab = [f"w{_letters(i)}" for i in range(n_shared)]
    shared_p = 1.0 / np.arange(1, n_shared + 1)
    shared_p /= shared_p.sum()

    docs: list[LabeledDocument] = []
    for label, count in enumerate(counts):
        for _ in range(count):
            length = max(4, int(round(rng.normal(doc_len_mean, doc_len_sd))))
            own = rng.random(length) < indicative_prob
            tokens = []
            for flag in own:
                if flag:
                    tokens.append(class_vocab[label][rng.integers(n_indicative)])
                else:
                    tokens.append(shared_vocab[rng.choice(n_shared, p=shared_p)])
            docs.append(LabeledDocument(
                doc=Document(id="", text=" ".join(tokens)), label=label))

    order = rng.permutation(len(docs))
    out = []
    for pos, i in enumerate(order):
        d = docs[i]
        out.append(LabeledDocument(
            doc=Document(id=f"{id_prefix}{pos:05d}", text=d.doc.text),
            label=d.label))
    return out


def separable_corpus(
    counts: list[int],
    seed: int,
    *,
    id_prefix: str = "d",
) -> list[LabeledDocument]:
    """A corpus whose classes are (near-)linearly separable in TF-IDF space."""
    return gaussian_bag_corpus(
        counts, seed, n_indicative=25, n_shared=30, indicative_prob=0.9,
        doc_len_mean=12.0, doc_len_sd=2.0, id_prefix=id_prefix)
