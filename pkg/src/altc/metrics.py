"""Evaluation: confusion matrices, per-class and averaged P/R/F1, accuracy.

Conventions: undefined precision/recall (0/0) is reported as 0 and the
number of affected classes is surfaced on the report; "weighted" averages
use gold-label support as weights; in single-label multiclass evaluation
micro precision, recall, and F1 all equal accuracy by construction.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .errors import EmptyMatrixError, LabelOutOfRangeError, LengthMismatchError

REPORT_FORMAT_VERSION = 1


@dataclass(frozen=True)
class ConfusionMatrix:
    """K x K counts; entry (i, j) = gold class i predicted as class j."""

    grid: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=np.int64)
        object.__setattr__(self, "grid", grid)
        if grid.ndim != 2 or grid.shape[0] != grid.shape[1]:
            raise ValueError("confusion matrix must be square")
        if np.any(grid < 0):
            raise ValueError("confusion counts must be non-negative")

    @property
    def num_classes(self) -> int:
        return self.grid.shape[0]

    @property
    def total(self) -> int:
        return int(self.grid.sum())

    def to_csv(self, labels: list[str] | None = None) -> str:
        """Matrix as CSV with a gold-label row header, for external plotting."""
        k = self.num_classes
        names = labels if labels is not None else [f"class_{i}" for i in range(k)]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["gold\\pred"] + list(names))
        for i in range(k):
            writer.writerow([names[i]] + [int(c) for c in self.grid[i]])
        return buf.getvalue()


@dataclass(frozen=True)
class ClassReport:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class Averages:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class EvaluationReport:
    confusion: ConfusionMatrix
    per_class: tuple[ClassReport, ...]
    macro: Averages
    micro: Averages
    weighted: Averages
    accuracy: float
    zero_division_classes: int

    def to_dict(self) -> dict:
        return {
            "version": REPORT_FORMAT_VERSION,
            "accuracy": self.accuracy,
            "per_class": [
                {"precision": c.precision, "recall": c.recall,
                 "f1": c.f1, "support": c.support}
                for c in self.per_class
            ],
            "macro": {"precision": self.macro.precision,
                      "recall": self.macro.recall, "f1": self.macro.f1},
            "micro": {"precision": self.micro.precision,
                      "recall": self.micro.recall, "f1": self.micro.f1},
            "weighted": {"precision": self.weighted.precision,
                         "recall": self.weighted.recall, "f1": self.weighted.f1},
            "confusion": self.confusion.grid.tolist(),
            "zero_division_classes": self.zero_division_classes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)

    def to_table(self, labels: list[str] | None = None) -> str:
        """Human-readable per-class table plus the three averages."""
        k = self.confusion.num_classes
        names = labels if labels is not None else [f"class_{i}" for i in range(k)]
        width = max(12, max(len(n) for n in names) + 2)
        lines = [f"{'':<{width}}{'precision':>10}{'recall':>10}{'f1':>10}{'support':>10}"]
        for name, c in zip(names, self.per_class):
            lines.append(f"{name:<{width}}{c.precision:>10.4f}{c.recall:>10.4f}"
                         f"{c.f1:>10.4f}{c.support:>10d}")
        lines.append("")
        for name, avg in (("macro", self.macro), ("micro", self.micro),
                          ("weighted", self.weighted)):
            lines.append(f"{name:<{width}}{avg.precision:>10.4f}{avg.recall:>10.4f}"
                         f"{avg.f1:>10.4f}{self.confusion.total:>10d}")
        lines.append(f"{'accuracy':<{width}}{self.accuracy:>10.4f}")
        return "\n".join(lines)


def confusion(gold: list[int], pred: list[int], k: int) -> ConfusionMatrix:
    """Tally gold/pred label pairs into a K x K matrix."""
    if len(gold) != len(pred):
        raise LengthMismatchError(
            f"gold has {len(gold)} labels, pred has {len(pred)}")
    grid = np.zeros((k, k), dtype=np.int64)
    for g, p in zip(gold, pred):
        if not 0 <= g < k:
            raise LabelOutOfRangeError(g, k)
        if not 0 <= p < k:
            raise LabelOutOfRangeError(p, k)
        grid[g, p] += 1
    return ConfusionMatrix(grid=grid)


def _safe_div(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def report(cm: ConfusionMatrix) -> EvaluationReport:
    """Full evaluation report from a confusion matrix."""
    grid = cm.grid
    total = cm.total
    if total == 0:
        raise EmptyMatrixError("report needs at least one evaluated sample")

    k = cm.num_classes
    tp = np.diag(grid).astype(np.float64)
    support = grid.sum(axis=1).astype(np.float64)   # gold counts
    predicted = grid.sum(axis=0).astype(np.float64)

    per_class = []
    zero_div = 0
    for i in range(k):
        prec = _safe_div(tp[i], predicted[i])
        rec = _safe_div(tp[i], support[i])
        f1 = _safe_div(2.0 * prec * rec, prec + rec)
        if predicted[i] == 0 or support[i] == 0:
            zero_div += 1
        per_class.append(ClassReport(precision=prec, recall=rec, f1=f1,
                                     support=int(support[i])))

    macro = Averages(
        precision=float(np.mean([c.precision for c in per_class])),
        recall=float(np.mean([c.recall for c in per_class])),
        f1=float(np.mean([c.f1 for c in per_class])),
    )
    weights = support / total
    weighted = Averages(
        precision=float(np.sum(weights * [c.precision for c in per_class])),
        recall=float(np.sum(weights * [c.recall for c in per_class])),
        f1=float(np.sum(weights * [c.f1 for c in per_class])),
    )
    # Pooled counts: every prediction is exactly one class, so micro
    # precision = micro recall = micro F1 = accuracy.
    accuracy = float(tp.sum()) / total
    micro = Averages(precision=accuracy, recall=accuracy, f1=accuracy)

    return EvaluationReport(
        confusion=cm, per_class=tuple(per_class), macro=macro, micro=micro,
        weighted=weighted, accuracy=accuracy, zero_division_classes=zero_div)


COMPARISON_HEADER = ("run", "precision", "recall", "f1", "accuracy",
                     "macro_f1", "micro_f1")


def compare_runs(reports: list[tuple[str, EvaluationReport]]) -> list[dict]:
    """One row per named run; headline P/R/F1 are the weighted averages."""
    if not reports:
        raise ValueError("compare_runs needs at least one report")
    rows = []
    for name, rep in reports:
        rows.append({
            "run": name,
            "precision": rep.weighted.precision,
            "recall": rep.weighted.recall,
            "f1": rep.weighted.f1,
            "accuracy": rep.accuracy,
            "macro_f1": rep.macro.f1,
            "micro_f1": rep.micro.f1,
        })
    return rows


def comparison_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COMPARISON_HEADER, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
