"""Accuracy, class-size-weighted F1, per-class breakdowns, confusion matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class EvalResult:
    """per_class rows are (n_c, precision, recall, f1); confusion is
    (m, m) with rows = gold class, columns = predicted class."""

    accuracy: float
    weighted_f1: float
    per_class: list[tuple[int, float, float, float]]
    confusion: np.ndarray

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "weighted_f1": self.weighted_f1,
            "per_class": [[n, p, r, f] for n, p, r, f in self.per_class],
            "confusion": self.confusion.tolist(),
        }


def evaluate(preds: list[int], golds: list[int], num_classes: int) -> EvalResult:
    """Weighted F1 = sum_c (n_c / N) * 2 P_c R_c / (P_c + R_c).

    Zero-denominator precision, recall, or F1 is defined as 0; classes
    absent from both preds and golds contribute 0 with n_c = 0.
    """
    if len(preds) != len(golds):
        raise ValueError(f"preds length {len(preds)} != golds length {len(golds)}")
    if len(golds) == 0:
        raise ValueError("cannot evaluate zero samples")
    confusion = np.zeros((num_classes, num_classes), dtype=np.int64)
    for p, g in zip(preds, golds):
        if not (0 <= p < num_classes and 0 <= g < num_classes):
            raise ValueError(f"class index out of range: pred={p} gold={g} m={num_classes}")
        confusion[g, p] += 1
    n = len(golds)
    per_class = []
    weighted_f1 = 0.0
    for c in range(num_classes):
        tp = int(confusion[c, c])
        n_c = int(confusion[c].sum())
        pred_c = int(confusion[:, c].sum())
        precision = tp / pred_c if pred_c > 0 else 0.0
        recall = tp / n_c if n_c > 0 else 0.0
        f1 = 2.0 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        per_class.append((n_c, precision, recall, f1))
        weighted_f1 += (n_c / n) * f1
    accuracy = float(np.trace(confusion)) / n
    return EvalResult(accuracy, weighted_f1, per_class, confusion)
