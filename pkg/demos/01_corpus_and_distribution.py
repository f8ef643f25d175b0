"""Corpus basics: build a file, ingest it, audit the class distribution.

The toolkit's file contract is a three-column table (id, text, label) in
CSV, TSV, or JSONL.  Labels match the schema exactly (after trimming), so
nothing merges silently; the distribution audit is how you spot the kind
of class imbalance that motivates weighted training.
"""

import tempfile
from pathlib import Path

from altc import LabelSchema, distribution, export, ingest, stratified_split
from altc.synth import gaussian_bag_corpus, scaled_counts

schema = LabelSchema()  # Not Hope / Generalized / Realistic / Unrealistic Hope
print("schema:", ", ".join(schema.names))

# A corpus with the heavy head-class skew typical of hope-speech data.
counts = scaled_counts((2245, 1284, 540, 472), total=800)
docs = gaussian_bag_corpus(counts, seed=7)

workdir = Path(tempfile.mkdtemp())
corpus_file = workdir / "corpus.csv"
export(docs, corpus_file, "csv", schema)
print(f"\nwrote {len(docs)} documents to {corpus_file}")

loaded = ingest(corpus_file, "csv", schema)
dist = distribution(loaded, schema)
print("\nclass distribution after round-trip:")
for name, n in zip(schema.names, dist.counts):
    bar = "#" * (n // 10)
    print(f"  {name:<18} {n:>5}  {bar}")
print(f"  {'total':<18} {dist.total:>5}")
print("\ndistribution JSON:", dist.to_json(schema))

train, held = stratified_split(loaded, fraction=0.8, seed=13)
print(f"\nstratified 80/20 split -> train {len(train)}, held-out {len(held)}")
print("train counts:", list(distribution(train, schema).counts))
print("held  counts:", list(distribution(held, schema).counts))
