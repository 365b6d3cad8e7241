"""Binary-classification evaluation: confusion counts, precision, recall, F1.

"accept" is the positive class throughout. Zero-denominator metrics are
defined as 0 rather than raising, so a single-class epoch mid-training
does not abort the run.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError

ACCEPT = "accept"
REJECT = "reject"


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion(preds, labels) -> ConfusionCounts:
    """Count confusion cells over paired accept/reject sequences."""
    if len(preds) != len(labels):
        raise ValidationError(f"length mismatch: {len(preds)} preds vs {len(labels)} labels")
    if not preds:
        raise ValidationError("cannot evaluate an empty prediction set")
    tp = fp = tn = fn = 0
    for p, y in zip(preds, labels):
        if p == ACCEPT and y == ACCEPT:
            tp += 1
        elif p == ACCEPT and y == REJECT:
            fp += 1
        elif p == REJECT and y == REJECT:
            tn += 1
        elif p == REJECT and y == ACCEPT:
            fn += 1
        else:
            raise ValidationError(f"labels must be '{ACCEPT}' or '{REJECT}', got ({p!r}, {y!r})")
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def precision_recall_f1(c: ConfusionCounts) -> tuple[float, float, float]:
    """Precision, recall, and F1 with the zero-denominator -> 0 convention."""
    precision = c.tp / (c.tp + c.fp) if (c.tp + c.fp) > 0 else 0.0
    recall = c.tp / (c.tp + c.fn) if (c.tp + c.fn) > 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if (precision + recall) > 0 else 0.0
    return precision, recall, f1


def f1_from_pr(precision: float, recall: float) -> float:
    """F1 as the harmonic mean of an already-computed precision and recall."""
    if precision + recall <= 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)
