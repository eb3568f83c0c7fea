"""Metric correctness against hand arithmetic and an independent F1 formulation."""

import numpy as np
import pytest

from sdgscore.errors import DataError, DataRangeError
from sdgscore.evaluate import ConfusionMatrix, confusion, macro_f1, micro_f1, per_sdg_report


def independent_micro_f1(counts):
    """Micro F1 spelled out via global precision/recall, not trace/total."""
    tp = float(np.trace(counts))
    fp = float(counts.sum() - np.trace(counts))
    fn = fp
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return 2 * precision * recall / (precision + recall)


class TestConfusion:
    def test_perfect_agreement_fills_diagonal(self):
        cm = confusion([0, 1, 2], [0, 1, 2])
        assert cm.counts[0, 0] == cm.counts[1, 1] == cm.counts[2, 2] == 1
        assert cm.total == 3

    def test_single_error_off_diagonal(self):
        cm = confusion([0], [6])
        assert cm.counts[0, 6] == 1
        assert np.trace(cm.counts) == 0

    def test_total_conserved(self, rng):
        true = rng.integers(0, 7, size=20).tolist()
        pred = rng.integers(0, 7, size=20).tolist()
        assert confusion(true, pred).total == 20

    def test_length_mismatch_rejected(self):
        with pytest.raises(DataError, match="mismatch"):
            confusion([0, 1], [0])

    def test_out_of_range_class_rejected(self):
        with pytest.raises(DataRangeError):
            confusion([7], [0])
        with pytest.raises(DataRangeError):
            confusion([0], [-1])

    def test_matrix_shape_validated(self):
        with pytest.raises(DataError):
            ConfusionMatrix(np.zeros((3, 3), dtype=np.int64))
        with pytest.raises(DataRangeError):
            ConfusionMatrix(np.full((7, 7), -1))


class TestMicroF1:
    def test_perfect_predictions(self):
        cm = confusion([0, 1, 2, 3], [0, 1, 2, 3])
        assert micro_f1(cm) == 1.0

    def test_equals_accuracy_and_global_precision_recall(self, rng):
        for _ in range(200):
            n = int(rng.integers(1, 40))
            true = rng.integers(0, 7, size=n).tolist()
            pred = rng.integers(0, 7, size=n).tolist()
            cm = confusion(true, pred)
            accuracy = sum(t == p for t, p in zip(true, pred)) / n
            assert abs(micro_f1(cm) - accuracy) <= 1e-12
            if np.trace(cm.counts) > 0:
                assert abs(micro_f1(cm) - independent_micro_f1(cm.counts)) <= 1e-12

    def test_empty_matrix_rejected(self):
        with pytest.raises(DataError, match="empty"):
            micro_f1(ConfusionMatrix(np.zeros((7, 7), dtype=np.int64)))


class TestMacroF1:
    def test_perfect_predictions(self):
        cm = confusion([0, 3, 6], [0, 3, 6])
        assert macro_f1(cm) == 1.0

    def test_degenerate_single_column_hand_example(self):
        # Everything predicted class 0 against 10 examples per true class:
        # F1 for class 0 is 2*(1/7)*1 / (1/7 + 1) = 0.25, the other six
        # classes score 0, so the mean over 7 occurring classes is 0.25/7.
        true = [c for c in range(7) for _ in range(10)]
        pred = [0] * 70
        cm = confusion(true, pred)
        assert micro_f1(cm) == pytest.approx(1 / 7, abs=1e-9)
        assert macro_f1(cm) == pytest.approx(0.25 / 7, abs=1e-9)

    def test_two_class_hand_example_ignores_absent_classes(self):
        # Classes 2..6 appear in neither truth nor predictions, so the mean
        # runs over classes 0 and 1 only: both have F1 = 2/3.
        cm = confusion([0, 0, 1], [0, 1, 1])
        assert micro_f1(cm) == pytest.approx(2 / 3, abs=1e-9)
        assert macro_f1(cm) == pytest.approx(2 / 3, abs=1e-9)

    def test_invariant_under_class_relabeling(self, rng):
        for _ in range(30):
            n = int(rng.integers(2, 30))
            true = rng.integers(0, 7, size=n)
            pred = rng.integers(0, 7, size=n)
            perm = rng.permutation(7)
            base = confusion(true.tolist(), pred.tolist())
            mapped = confusion(perm[true].tolist(), perm[pred].tolist())
            assert macro_f1(base) == pytest.approx(macro_f1(mapped), abs=1e-12)
            assert micro_f1(base) == pytest.approx(micro_f1(mapped), abs=1e-12)

    def test_invariant_under_example_permutation(self, rng):
        true = rng.integers(0, 7, size=25)
        pred = rng.integers(0, 7, size=25)
        perm = rng.permutation(25)
        a = confusion(true.tolist(), pred.tolist())
        b = confusion(true[perm].tolist(), pred[perm].tolist())
        assert micro_f1(a) == micro_f1(b)
        assert macro_f1(a) == macro_f1(b)

    def test_bounded_in_unit_interval(self, rng):
        for _ in range(50):
            n = int(rng.integers(1, 20))
            cm = confusion(rng.integers(0, 7, size=n).tolist(),
                           rng.integers(0, 7, size=n).tolist())
            assert 0.0 <= micro_f1(cm) <= 1.0
            assert 0.0 <= macro_f1(cm) <= 1.0


class TestPerSdgReport:
    def test_single_sdg_average_equals_row(self):
        results = {7: {"brf": (0.9, 0.3)}}
        csv_text, table = per_sdg_report(results)
        assert "average,brf,0.9,0.3" in csv_text
        assert table.count("0.90") == 2  # the SDG row and the Average row

    def test_hand_filled_two_sdg_average(self):
        results = {
            7: {"brf": (0.8, 0.2), "gcn": (0.6, 0.1)},
            13: {"brf": (0.9, 0.4), "gcn": (0.8, 0.3)},
        }
        csv_text, table = per_sdg_report(results)
        lines = csv_text.strip().splitlines()
        assert lines[0] == "sdg,model,micro_f1,macro_f1"
        assert f"average,brf,{0.8500000000000001!r},{0.30000000000000004!r}" in lines or \
            "average,brf,0.85,0.3" in lines
        # Text table rounds the same averages to 2 decimals.
        avg_row = [ln for ln in table.splitlines() if ln.startswith("Average")][0]
        assert "0.85" in avg_row and "0.30" in avg_row
        assert "0.70" in avg_row and "0.20" in avg_row

    def test_csv_keeps_full_precision(self):
        micro = 1 / 3
        results = {7: {"brf": (micro, 0.0)}}
        csv_text, _ = per_sdg_report(results)
        assert repr(micro) in csv_text

    def test_fourteen_sdg_rows_plus_average(self):
        sdgs = (1, 2, 3, 5, 6, 7, 8, 9, 11, 12, 13, 14, 15, 16)
        results = {s: {"brf": (0.5, 0.5)} for s in sdgs}
        csv_text, table = per_sdg_report(results)
        assert len(csv_text.strip().splitlines()) == 1 + 14 + 1
        table_lines = table.strip().splitlines()
        assert len(table_lines) == 1 + 14 + 1
        assert table_lines[-1].startswith("Average")

    def test_missing_model_cell_rejected(self):
        results = {7: {"brf": (0.5, 0.5)}, 13: {}}
        with pytest.raises(DataError, match="lacks results"):
            per_sdg_report(results, models=["brf"])
