"""Confusion matrices, per-class rates, averaged metrics, comparison tables."""

import csv
import io
import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from altc.errors import EmptyMatrixError, LabelOutOfRangeError, LengthMismatchError
from altc.metrics import (
    COMPARISON_HEADER,
    ConfusionMatrix,
    compare_runs,
    comparison_csv,
    confusion,
    report,
)


def tally_oracle(gold, pred, k):
    """Independent per-sample tally of every reported figure."""
    tp = [0] * k
    fp = [0] * k
    fn = [0] * k
    support = [0] * k
    correct = 0
    for g, p in zip(gold, pred):
        support[g] += 1
        if g == p:
            tp[g] += 1
            correct += 1
        else:
            fp[p] += 1
            fn[g] += 1

    def div(a, b):
        return a / b if b else 0.0

    per_class = []
    for i in range(k):
        prec = div(tp[i], tp[i] + fp[i])
        rec = div(tp[i], tp[i] + fn[i])
        f1 = div(2 * prec * rec, prec + rec)
        per_class.append((prec, rec, f1, support[i]))
    n = len(gold)
    macro = tuple(sum(c[j] for c in per_class) / k for j in range(3))
    weighted = tuple(sum(c[j] * c[3] / n for c in per_class) for j in range(3))
    accuracy = correct / n
    return per_class, macro, weighted, accuracy


class TestConfusion:
    def test_identity(self):
        cm = confusion([0, 1], [0, 1], 2)
        assert cm.grid.tolist() == [[1, 0], [0, 1]]

    def test_all_wrong(self):
        cm = confusion([0, 0], [1, 1], 2)
        assert cm.grid.tolist() == [[0, 2], [0, 0]]

    def test_random_case_vs_tally(self):
        rng = np.random.default_rng(5)
        gold = rng.integers(0, 4, size=200).tolist()
        pred = rng.integers(0, 4, size=200).tolist()
        cm = confusion(gold, pred, 4)
        grid = np.zeros((4, 4), dtype=int)
        for g, p in zip(gold, pred):
            grid[g][p] += 1
        assert cm.grid.tolist() == grid.tolist()
        assert cm.total == 200

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            confusion([0], [0, 1], 2)

    def test_label_out_of_range(self):
        with pytest.raises(LabelOutOfRangeError):
            confusion([0, 5], [0, 0], 2)
        with pytest.raises(LabelOutOfRangeError):
            confusion([0, 0], [0, -1], 2)


class TestReport:
    def test_worked_two_class_example(self):
        rep = report(ConfusionMatrix(grid=[[50, 10], [5, 35]]))
        assert rep.accuracy == pytest.approx(0.85)
        c0, c1 = rep.per_class
        assert c0.precision == pytest.approx(50 / 55)
        assert c0.recall == pytest.approx(50 / 60)
        assert c0.f1 == pytest.approx(0.8696, abs=5e-5)
        assert c1.precision == pytest.approx(35 / 45)
        assert c1.recall == pytest.approx(0.875)
        assert c1.f1 == pytest.approx(0.8235, abs=5e-5)
        assert rep.macro.f1 == pytest.approx(0.8465, abs=5e-5)

    def test_perfect_diagonal(self):
        rep = report(ConfusionMatrix(grid=np.diag([7, 3, 2])))
        assert rep.accuracy == 1.0
        for c in rep.per_class:
            assert (c.precision, c.recall, c.f1) == (1.0, 1.0, 1.0)
        assert rep.macro.f1 == rep.micro.f1 == rep.weighted.f1 == 1.0
        assert rep.zero_division_classes == 0

    def test_zero_support_class_zero_rule(self):
        # class 2 never appears in gold nor pred: all rates 0, macro pulled down
        rep = report(ConfusionMatrix(grid=[[4, 0, 0], [0, 4, 0], [0, 0, 0]]))
        c2 = rep.per_class[2]
        assert (c2.precision, c2.recall, c2.f1) == (0.0, 0.0, 0.0)
        assert rep.zero_division_classes == 1
        assert rep.macro.f1 == pytest.approx(2 / 3)
        assert rep.accuracy == 1.0

    def test_empty_matrix(self):
        with pytest.raises(EmptyMatrixError):
            report(ConfusionMatrix(grid=np.zeros((3, 3), dtype=int)))

    def test_micro_equals_accuracy_exactly(self):
        rng = np.random.default_rng(11)
        gold = rng.integers(0, 5, size=333).tolist()
        pred = rng.integers(0, 5, size=333).tolist()
        rep = report(confusion(gold, pred, 5))
        assert rep.micro.precision == rep.accuracy
        assert rep.micro.recall == rep.accuracy
        assert rep.micro.f1 == rep.accuracy

    def test_matches_tally_oracle(self):
        rng = np.random.default_rng(23)
        gold = rng.integers(0, 4, size=200).tolist()
        pred = rng.integers(0, 4, size=200).tolist()
        rep = report(confusion(gold, pred, 4))
        per_class, macro, weighted, accuracy = tally_oracle(gold, pred, 4)
        for got, want in zip(rep.per_class, per_class):
            assert abs(got.precision - want[0]) < 1e-12
            assert abs(got.recall - want[1]) < 1e-12
            assert abs(got.f1 - want[2]) < 1e-12
            assert got.support == want[3]
        assert abs(rep.macro.f1 - macro[2]) < 1e-12
        assert abs(rep.weighted.f1 - weighted[2]) < 1e-12
        assert abs(rep.accuracy - accuracy) < 1e-12

    @given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)),
                    min_size=1, max_size=60),
           st.randoms(use_true_random=False))
    def test_joint_permutation_invariance(self, pairs, rnd):
        gold = [g for g, _ in pairs]
        pred = [p for _, p in pairs]
        base = report(confusion(gold, pred, 4))
        rnd.shuffle(pairs)
        mixed = report(confusion([g for g, _ in pairs], [p for _, p in pairs], 4))
        assert base.to_dict() == mixed.to_dict()

    @given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)),
                    min_size=1, max_size=60),
           st.permutations(list(range(4))))
    def test_relabel_permutes_rows_keeps_macro(self, pairs, perm):
        gold = [g for g, _ in pairs]
        pred = [p for _, p in pairs]
        base = report(confusion(gold, pred, 4))
        relabeled = report(confusion([perm[g] for g in gold],
                                     [perm[p] for p in pred], 4))
        for i in range(4):
            assert relabeled.per_class[perm[i]] == base.per_class[i]
        # summation order may differ in the last ulp
        for attr in ("precision", "recall", "f1"):
            assert abs(getattr(relabeled.macro, attr)
                       - getattr(base.macro, attr)) < 1e-12
        assert relabeled.accuracy == base.accuracy

    def test_fractional_cross_check(self):
        # exact rational arithmetic for a hand-sized matrix
        grid = [[3, 1, 0], [2, 5, 1], [0, 0, 4]]
        rep = report(ConfusionMatrix(grid=grid))
        prec0 = Fraction(3, 5)
        rec0 = Fraction(3, 4)
        f1_0 = 2 * prec0 * rec0 / (prec0 + rec0)
        assert rep.per_class[0].precision == pytest.approx(float(prec0), abs=1e-15)
        assert rep.per_class[0].f1 == pytest.approx(float(f1_0), abs=1e-15)
        assert rep.accuracy == pytest.approx(float(Fraction(12, 16)), abs=1e-15)


class TestEmitters:
    @pytest.fixture
    def rep(self):
        return report(ConfusionMatrix(grid=[[50, 10], [5, 35]]))

    def test_json_versioned(self, rep):
        obj = json.loads(rep.to_json())
        assert obj["version"] == 1
        assert obj["confusion"] == [[50, 10], [5, 35]]
        assert obj["macro"]["f1"] == rep.macro.f1

    def test_table_mentions_all_sections(self, rep):
        table = rep.to_table(["neg", "pos"])
        for token in ("neg", "pos", "macro", "micro", "weighted", "accuracy"):
            assert token in table

    def test_confusion_csv(self, rep):
        text = rep.confusion.to_csv(["neg", "pos"])
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0] == ["gold\\pred", "neg", "pos"]
        assert rows[1] == ["neg", "50", "10"]
        assert rows[2] == ["pos", "5", "35"]


class TestCompareRuns:
    def make(self, grid):
        return report(ConfusionMatrix(grid=grid))

    def test_two_rows_stable_order(self):
        rows = compare_runs([("lr", self.make([[5, 1], [1, 5]])),
                             ("al", self.make([[6, 0], [2, 4]]))])
        assert [r["run"] for r in rows] == ["lr", "al"]

    def test_single_row(self):
        rows = compare_runs([("only", self.make([[2, 0], [0, 2]]))])
        assert len(rows) == 1

    def test_values_pass_through_bit_exact(self):
        rep = self.make([[5, 3], [2, 6]])
        row = compare_runs([("x", rep)])[0]
        assert row["precision"] == rep.weighted.precision
        assert row["recall"] == rep.weighted.recall
        assert row["f1"] == rep.weighted.f1
        assert row["accuracy"] == rep.accuracy
        assert row["macro_f1"] == rep.macro.f1
        assert row["micro_f1"] == rep.micro.f1

    def test_csv_header(self):
        rows = compare_runs([("x", self.make([[1, 0], [0, 1]]))])
        text = comparison_csv(rows)
        assert text.splitlines()[0] == ",".join(COMPARISON_HEADER)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            compare_runs([])
