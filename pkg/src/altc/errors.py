"""Exception types shared across the toolkit.

Every error raised by altc derives from :class:`AltcError`, so callers
(including the CLI) can catch one base class and still get a precise
subtype for programmatic handling.
"""

from __future__ import annotations


class AltcError(Exception):
    """Base class for all altc errors."""


# --- corpus ingestion -------------------------------------------------------

class UnknownLabelError(AltcError):
    """A record carries a label string that is not in the schema."""

    def __init__(self, record_id: str, label: str):
        super().__init__(f"record {record_id!r}: unknown label {label!r}")
        self.record_id = record_id
        self.label = label


class DuplicateIdError(AltcError):
    def __init__(self, record_id: str):
        super().__init__(f"duplicate document id {record_id!r}")
        self.record_id = record_id


class MalformedRecordError(AltcError):
    def __init__(self, line_number: int, detail: str = ""):
        msg = f"malformed record at line {line_number}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.line_number = line_number


class MissingColumnError(AltcError):
    def __init__(self, name: str):
        super().__init__(f"required column {name!r} is missing")
        self.name = name


class EmptyCorpusError(AltcError):
    """An operation that needs at least one document got none."""


# --- features and model -----------------------------------------------------

class DimensionMismatchError(AltcError):
    def __init__(self, expected: int, got: int):
        super().__init__(f"expected dimension {expected}, got {got}")
        self.expected = expected
        self.got = got


class LengthMismatchError(AltcError):
    def __init__(self, detail: str):
        super().__init__(detail)


class ZeroClassCountError(AltcError):
    def __init__(self, class_index: int):
        super().__init__(f"class {class_index} has zero members; "
                         "cannot compute inverse-frequency weight")
        self.class_index = class_index


class EmptyTrainingSetError(AltcError):
    """fit() called with no training instances."""


class NonFiniteLossError(AltcError):
    """Training loss became NaN/inf; the learning rate is likely too high."""


# --- active learning --------------------------------------------------------

class AllZeroVectorError(AltcError):
    """A probability vector summing to zero cannot be renormalized."""


class EmptyPoolError(AltcError):
    """Batch selection requested from an empty pool."""


class MissingGoldLabelError(AltcError):
    def __init__(self, doc_id: str):
        super().__init__(f"simulated oracle has no gold label for {doc_id!r}")
        self.doc_id = doc_id


class SessionCancelledError(AltcError):
    """A human annotation session was cancelled while a batch was pending."""


# --- evaluation -------------------------------------------------------------

class LabelOutOfRangeError(AltcError):
    def __init__(self, label: int, num_classes: int):
        super().__init__(f"label {label} out of range for {num_classes} classes")
        self.label = label
        self.num_classes = num_classes


class EmptyMatrixError(AltcError):
    """An evaluation report needs at least one sample."""


# --- artifacts --------------------------------------------------------------

class SchemaMismatchError(AltcError):
    def __init__(self, model_schema: list[str], corpus_schema: list[str]):
        super().__init__(
            f"model schema {model_schema} does not match corpus schema {corpus_schema}")
        self.model_schema = model_schema
        self.corpus_schema = corpus_schema
