"""TF-IDF featurization: vocabulary, sparse vectors, and their invariants.

Weights are raw term counts times the smoothed inverse document frequency
ln((1+N)/(1+df)) + 1, L2-normalized per document.  Rare terms score high,
ubiquitous terms score low, and every non-empty vector has unit norm.
"""

import numpy as np

from altc import PrepConfig, fit_vocabulary, normalize, tokenize, transform

corpus = [
    "hope is the thing with feathers",
    "hope springs eternal",
    "the cat sat on the mat",
    "the mat was flat",
]
cfg = PrepConfig()
token_lists = [tokenize(normalize(t, cfg), cfg) for t in corpus]

vocab = fit_vocabulary(token_lists, min_df=1)
print(f"vocabulary: V={len(vocab)} over N={vocab.corpus_size} documents")
idf = vocab.idf()
ranked = sorted(vocab.index, key=lambda t: -idf[vocab.index[t]])
print("highest idf (rarest):", ranked[:4])
print("lowest idf (most common):", ranked[-2:])

doc = tokenize(normalize("hope hope eternal", cfg), cfg)
vec = transform(doc, vocab)
print(f"\n'hope hope eternal' -> nnz={vec.nnz}, norm={vec.norm():.12f}")
for i, v in zip(vec.indices, vec.values):
    term = [t for t, j in vocab.index.items() if j == i][0]
    print(f"  {term:<10} {v:.6f}")

# bag-of-words: token order is irrelevant
assert np.allclose(transform(doc[::-1], vocab).values, vec.values)
print("\norder-invariant: transform(reversed doc) == transform(doc)")

# out-of-vocabulary text maps to the zero vector
oov = transform(["notinvocab"], vocab)
print(f"all-OOV doc -> nnz={oov.nnz} (zero vector)")

# min_df prunes hapaxes
small = fit_vocabulary(token_lists, min_df=2)
print(f"min_df=2 keeps {len(small)} of {len(vocab)} terms: {sorted(small.index)}")

print("\nvocabulary serializes to versioned JSON:")
print(vocab.to_json()[:96] + " ...")
