"""Classification metrics and the per-SDG results table.

Micro F1 uses the single-label multiclass identity (trace over total).
Macro F1 averages per-class F1 over the classes that actually occur, where
occurring means at least one true or one predicted instance; classes absent
from both sides carry no information and are left out of the mean, which is
what makes a two-class problem scored on a seven-class matrix come out the
same as on a two-class matrix.
"""

from dataclasses import dataclass

import numpy as np

from . import N_CLASSES
from .errors import DataError, DataRangeError


@dataclass
class ConfusionMatrix:
    counts: np.ndarray  # rows true class, columns predicted class

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.shape != (N_CLASSES, N_CLASSES):
            raise DataError(f"confusion matrix must be 7x7, got {self.counts.shape}")
        if (self.counts < 0).any():
            raise DataRangeError("confusion matrix counts must be non-negative")

    @property
    def total(self):
        return int(self.counts.sum())


def confusion(true, pred):
    true = list(true)
    pred = list(pred)
    if len(true) != len(pred):
        raise DataError(f"length mismatch: {len(true)} true vs {len(pred)} predicted")
    counts = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    for t, p in zip(true, pred):
        if not (0 <= t < N_CLASSES and 0 <= p < N_CLASSES):
            raise DataRangeError(f"class pair ({t}, {p}) outside 0..{N_CLASSES - 1}")
        counts[t, p] += 1
    return ConfusionMatrix(counts)


def micro_f1(cm):
    if cm.total == 0:
        raise DataError("empty confusion matrix")
    return float(np.trace(cm.counts)) / cm.total


def macro_f1(cm):
    if cm.total == 0:
        raise DataError("empty confusion matrix")
    scores = []
    for c in range(N_CLASSES):
        tp = float(cm.counts[c, c])
        fn = float(cm.counts[c].sum()) - tp
        fp = float(cm.counts[:, c].sum()) - tp
        if tp == 0.0 and fn == 0.0 and fp == 0.0:
            continue
        denom = 2.0 * tp + fp + fn
        scores.append(2.0 * tp / denom if denom > 0 else 0.0)
    return float(np.mean(scores))


def per_sdg_report(results, models=None):
    """Results table over SDGs and models.

    `results` maps sdg -> model -> (micro, macro). Returns (csv text,
    aligned text table); the text table rounds to 2 decimals, the CSV keeps
    full precision. The average row is the plain mean over SDG rows.
    """
    sdgs = sorted(results)
    if models is None:
        models = sorted({m for row in results.values() for m in row})
    for sdg in sdgs:
        missing = [m for m in models if m not in results[sdg]]
        if missing:
            raise DataError(f"SDG {sdg} lacks results for models {missing}")

    averages = {
        m: (
            float(np.mean([results[s][m][0] for s in sdgs])),
            float(np.mean([results[s][m][1] for s in sdgs])),
        )
        for m in models
    }

    csv_lines = ["sdg,model,micro_f1,macro_f1"]
    for sdg in sdgs:
        for m in models:
            micro, macro = results[sdg][m]
            csv_lines.append(f"{sdg},{m},{micro!r},{macro!r}")
    for m in models:
        micro, macro = averages[m]
        csv_lines.append(f"average,{m},{micro!r},{macro!r}")

    headers = ["SDG"]
    for m in models:
        headers.extend([f"{m} micro", f"{m} macro"])
    rows = []
    for sdg in sdgs:
        row = [str(sdg)]
        for m in models:
            micro, macro = results[sdg][m]
            row.extend([f"{micro:.2f}", f"{macro:.2f}"])
        rows.append(row)
    avg_row = ["Average"]
    for m in models:
        micro, macro = averages[m]
        avg_row.extend([f"{micro:.2f}", f"{macro:.2f}"])
    rows.append(avg_row)

    widths = [max(len(headers[i]), *(len(r[i]) for r in rows))
              for i in range(len(headers))]
    def fmt(cells):
        return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
    table = "\n".join([fmt(headers)] + [fmt(r) for r in rows])
    return "\n".join(csv_lines) + "\n", table + "\n"
