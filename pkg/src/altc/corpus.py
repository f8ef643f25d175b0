"""Dataset ingestion, label schema, splitting, and class-distribution audits.

Corpora are flat files (CSV, TSV, or JSONL) with three fields per record:
``id``, ``text``, ``label``.  Labels are matched against a
:class:`LabelSchema` by exact string comparison after trimming surrounding
whitespace; nothing is case-folded, so distinct labels never merge silently.
Unlabeled pools reuse the same formats with an empty label field.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DuplicateIdError,
    EmptyCorpusError,
    MalformedRecordError,
    MissingColumnError,
    UnknownLabelError,
)

logger = logging.getLogger(__name__)

#: The four hope-speech categories used throughout the shared-task data.
DEFAULT_LABELS = (
    "Not Hope",
    "Generalized Hope",
    "Realistic Hope",
    "Unrealistic Hope",
)

FORMATS = ("csv", "tsv", "jsonl")
_COLUMNS = ("id", "text", "label")


@dataclass(frozen=True)
class LabelSchema:
    """Ordered, fixed set of class names.

    The number of classes K is fixed for the lifetime of any model trained
    against the schema.
    """

    names: tuple[str, ...] = DEFAULT_LABELS

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if len(names) < 2:
            raise ValueError("a schema needs at least two classes")
        if len(set(names)) != len(names):
            raise ValueError(f"class names must be unique: {names}")
        if any(not n for n in names):
            raise ValueError("class names must be non-empty")

    @property
    def num_classes(self) -> int:
        return len(self.names)

    def index_of(self, name: str) -> int | None:
        """Index for a label string (trimmed exact match), or None."""
        try:
            return self.names.index(name.strip())
        except ValueError:
            return None


@dataclass(frozen=True)
class Document:
    """A raw text instance; the unit of every pool."""

    id: str
    text: str
    language: str | None = None


@dataclass(frozen=True)
class LabeledDocument:
    """A document plus its gold label (index into the schema)."""

    doc: Document
    label: int

    def __post_init__(self):
        if self.label < 0:
            raise ValueError(f"label index must be non-negative, got {self.label}")


@dataclass(frozen=True)
class ClassDistribution:
    """Per-class document counts for a corpus."""

    counts: tuple[int, ...]
    total: int = field(default=-1)

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        object.__setattr__(self, "counts", counts)
        if self.total < 0:
            object.__setattr__(self, "total", sum(counts))
        elif self.total != sum(counts):
            raise ValueError(f"total {self.total} != sum of counts {sum(counts)}")

    def to_json(self, schema: LabelSchema) -> str:
        return json.dumps(
            {"schema": list(schema.names), "counts": list(self.counts),
             "total": self.total},
            ensure_ascii=False,
        )


def _iter_delimited(path: Path, delimiter: str):
    """Yield (line_number, row_dict) from a CSV/TSV file with a header."""
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedRecordError(1, "file has no header row")
        header = [h.strip() for h in header]
        for name in _COLUMNS:
            if name not in header:
                raise MissingColumnError(name)
        idx = {name: header.index(name) for name in _COLUMNS}
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise MalformedRecordError(
                    line_no, f"expected {len(header)} fields, got {len(row)}")
            yield line_no, {name: row[idx[name]] for name in _COLUMNS}


def _iter_jsonl(path: Path):
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise MalformedRecordError(line_no, e.msg)
            if not isinstance(obj, dict):
                raise MalformedRecordError(line_no, "record is not an object")
            for name in _COLUMNS:
                if name not in obj:
                    raise MissingColumnError(name)
            row = {name: obj[name] for name in _COLUMNS}
            if row["label"] is None:
                row["label"] = ""
            yield line_no, row


def ingest(
    path: str | Path,
    format: str,
    schema: LabelSchema,
    *,
    allow_unlabeled: bool = False,
) -> list[LabeledDocument | Document]:
    """Read a corpus file into documents, preserving record order.

    With ``allow_unlabeled=False`` every record must carry a schema label
    and the result contains only :class:`LabeledDocument`.  With
    ``allow_unlabeled=True`` (pool mode) records with an empty label become
    plain :class:`Document` instances.

    Raises :class:`UnknownLabelError`, :class:`DuplicateIdError`,
    :class:`MalformedRecordError`, or :class:`MissingColumnError`.
    """
    path = Path(path)
    if format not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {format!r}")
    if format == "jsonl":
        rows = _iter_jsonl(path)
    else:
        rows = _iter_delimited(path, "," if format == "csv" else "\t")

    docs: list[LabeledDocument | Document] = []
    seen_ids: set[str] = set()
    empty_texts = 0
    for line_no, row in rows:
        doc_id = str(row["id"]).strip()
        if not doc_id:
            raise MalformedRecordError(line_no, "empty id")
        if doc_id in seen_ids:
            raise DuplicateIdError(doc_id)
        seen_ids.add(doc_id)
        text = str(row["text"])
        if not text:
            empty_texts += 1
        doc = Document(id=doc_id, text=text)
        raw_label = str(row["label"]).strip()
        if not raw_label and allow_unlabeled:
            docs.append(doc)
            continue
        k = schema.index_of(raw_label)
        if k is None:
            raise UnknownLabelError(doc_id, raw_label)
        docs.append(LabeledDocument(doc=doc, label=k))
    if empty_texts:
        # Ingested anyway: empty texts featurize to the zero vector.
        logger.warning("%d document(s) with empty text in %s", empty_texts, path)
    return docs


def export(
    docs: list[LabeledDocument | Document],
    path: str | Path,
    format: str,
    schema: LabelSchema,
) -> None:
    """Write documents back out in the same three-column file contract.

    Unlabeled documents get an empty label field, so ``export`` then
    :func:`ingest` (pool mode) round-trips any mix of labeled and
    unlabeled records.  The CSV/TSV dialect cannot represent a NUL
    character in text; use JSONL for such data.
    """
    path = Path(path)
    if format not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {format!r}")

    def fields(d: LabeledDocument | Document) -> tuple[str, str, str]:
        if isinstance(d, LabeledDocument):
            return d.doc.id, d.doc.text, schema.names[d.label]
        return d.id, d.text, ""

    if format == "jsonl":
        with path.open("w", encoding="utf-8") as fh:
            for d in docs:
                doc_id, text, label = fields(d)
                fh.write(json.dumps(
                    {"id": doc_id, "text": text, "label": label},
                    ensure_ascii=False) + "\n")
    else:
        delim = "," if format == "csv" else "\t"
        with path.open("w", encoding="utf-8", newline="") as fh:
            # default CRLF row terminator so that bare \r or \n in a text
            # field always triggers quoting
            writer = csv.writer(fh, delimiter=delim)
            writer.writerow(_COLUMNS)
            for d in docs:
                writer.writerow(fields(d))


def distribution(docs: list[LabeledDocument], schema: LabelSchema) -> ClassDistribution:
    """Count documents per class.  Permutation-invariant over input order."""
    counts = [0] * schema.num_classes
    for d in docs:
        counts[d.label] += 1
    return ClassDistribution(counts=tuple(counts), total=len(docs))


def stratified_split(
    docs: list[LabeledDocument],
    fraction: float,
    seed: int,
) -> tuple[list[LabeledDocument], list[LabeledDocument]]:
    """Split per class: floor(fraction * class count) documents go to train.

    Deterministic for a fixed seed; the two halves partition the input and
    preserve the input's document order within each half.
    """
    if not docs:
        raise EmptyCorpusError("cannot split an empty corpus")
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction must be in (0, 1), got {fraction}")

    rng = np.random.default_rng(seed)
    by_class: dict[int, list[int]] = {}
    for i, d in enumerate(docs):
        by_class.setdefault(d.label, []).append(i)

    train_idx: set[int] = set()
    for k in sorted(by_class):
        members = np.array(by_class[k])
        n_train = int(np.floor(fraction * len(members)))
        picked = rng.permutation(len(members))[:n_train]
        train_idx.update(int(members[i]) for i in picked)

    train = [d for i, d in enumerate(docs) if i in train_idx]
    held = [d for i, d in enumerate(docs) if i not in train_idx]
    return train, held
