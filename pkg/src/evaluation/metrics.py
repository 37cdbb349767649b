"""
PrivAR Privacy Pipeline
Metrics Module

Binary classification metrics (sensitive is the positive class), character
error rate and privacy leakage rate, plus the integer search that recovers
confusion matrices consistent with published percentages.

Author: PrivAR Team
License: MIT
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import Levenshtein
import numpy as np

from src.common.exceptions import (
    CoverageError,
    EmptyEvaluationError,
    ParameterError,
    UndefinedReferenceError,
)
from src.risk_assessment.verdict import normalize_item

logger = logging.getLogger(__name__)

# Dataset split recovered by search_confusion_matrices from the rule-based
# row (432 items, Acc 39.58 / Prec 44.00 / Rec 8.63 / F1 14.43)
DERIVED_POSITIVES = 255
DERIVED_NEGATIVES = 177


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self) -> None:
        for name in ('tp', 'fp', 'tn', 'fn'):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def positives(self) -> int:
        return self.tp + self.fn

    def scaled(self, k: int) -> 'ConfusionCounts':
        return ConfusionCounts(self.tp * k, self.fp * k, self.tn * k, self.fn * k)


@dataclass(frozen=True)
class ClassificationMetrics:
    """Percentages; degenerate marks precision or F1 defined as 0 by convention."""
    accuracy: float
    precision: float
    recall: float
    f1: float
    degenerate: bool = False


def confusion(
    predictions: Union[Mapping[str, bool], Iterable[Tuple[str, bool]]],
    labels: Mapping[str, bool],
) -> ConfusionCounts:
    """
    Binary confusion counts.

    Args:
        predictions: (id, predicted sensitive) pairs or a mapping
        labels: id -> ground-truth sensitive

    Returns:
        ConfusionCounts over the label ids
    """
    predicted = dict(predictions.items() if isinstance(predictions, Mapping) else predictions)
    missing = set(labels) - set(predicted)
    extra = set(predicted) - set(labels)
    if missing or extra:
        raise CoverageError(missing, extra)

    tp = fp = tn = fn = 0
    for item_id, truth in labels.items():
        guess = bool(predicted[item_id])
        if truth and guess:
            tp += 1
        elif truth:
            fn += 1
        elif guess:
            fp += 1
        else:
            tn += 1
    return ConfusionCounts(tp, fp, tn, fn)


def f1_score(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall (same units in, same out)."""
    if precision + recall <= 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def classification_metrics(counts: ConfusionCounts) -> ClassificationMetrics:
    """
    Accuracy, precision, recall and F1 as percentages.

    Precision is 0 when nothing is predicted positive and recall is 0 when
    there are no positives; either case sets the degenerate flag.
    """
    if counts.total == 0:
        raise EmptyEvaluationError("no items to score")
    degenerate = False

    accuracy = 100.0 * (counts.tp + counts.tn) / counts.total
    if counts.tp + counts.fp == 0:
        precision = 0.0
        degenerate = True
    else:
        precision = 100.0 * counts.tp / (counts.tp + counts.fp)
    if counts.positives == 0:
        recall = 0.0
        degenerate = True
    else:
        recall = 100.0 * counts.tp / counts.positives
    if precision + recall == 0:
        degenerate = True
    return ClassificationMetrics(accuracy, precision, recall, f1_score(precision, recall), degenerate)


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance over Unicode code points."""
    return Levenshtein.distance(a, b)


def cer(reference: str, hypothesis: str) -> float:
    """Edit distance divided by reference length (unclamped)."""
    if not reference:
        raise UndefinedReferenceError("CER is undefined for an empty reference")
    return levenshtein(reference, hypothesis) / len(reference)


def mean_std(values: Sequence[float]) -> Tuple[float, float]:
    """Mean and sample standard deviation; std is 0 below two values."""
    if len(values) == 0:
        raise EmptyEvaluationError("no values to aggregate")
    array = np.asarray(values, dtype=np.float64)
    std = float(array.std(ddof=1)) if len(array) > 1 else 0.0
    return float(array.mean()), std


@dataclass(frozen=True)
class LeakagePair:
    """Sensitive items recovered from the original and the protected frame."""
    item_id: str
    items_from_original: Tuple[str, ...]
    items_from_obfuscated: Tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, 'items_from_original', tuple(normalize_item(i) for i in self.items_from_original)
        )
        object.__setattr__(
            self, 'items_from_obfuscated', tuple(normalize_item(i) for i in self.items_from_obfuscated)
        )

    @property
    def leaks(self) -> bool:
        """At least one identical item recovered from both frames."""
        return bool(set(self.items_from_original) & set(self.items_from_obfuscated))


def plr(pairs: Sequence[LeakagePair]) -> float:
    """Percentage of pairs whose normalized item lists intersect."""
    if not pairs:
        raise EmptyEvaluationError("PLR needs at least one pair")
    leaked = sum(1 for pair in pairs if pair.leaks)
    return 100.0 * leaked / len(pairs)


def search_confusion_matrices(
    total: int,
    accuracy: float,
    precision: float,
    recall: float,
    f1: Optional[float] = None,
    tolerance: float = 0.005,
) -> List[ConfusionCounts]:
    """
    All integer confusion matrices over total items whose percentages match
    the given (rounded) values within tolerance percentage points.

    Returns:
        Matching ConfusionCounts ordered by (tp, fp, fn)
    """
    if total <= 0:
        raise ParameterError("total must be positive")

    fp, fn = np.meshgrid(np.arange(total + 1), np.arange(total + 1), indexing='ij')
    matches: List[ConfusionCounts] = []
    for tp in range(total + 1):
        tn = total - tp - fp - fn
        valid = tn >= 0
        with np.errstate(divide='ignore', invalid='ignore'):
            acc = 100.0 * (tp + tn) / total
            prec = 100.0 * tp / (tp + fp)
            rec = 100.0 * tp / (tp + fn)
            valid &= np.abs(acc - accuracy) <= tolerance
            valid &= np.abs(prec - precision) <= tolerance
            valid &= np.abs(rec - recall) <= tolerance
            if f1 is not None:
                score = 200.0 * tp / (2 * tp + fp + fn)
                valid &= np.abs(score - f1) <= tolerance
        for i, j in zip(*np.nonzero(valid)):
            matches.append(ConfusionCounts(tp, int(fp[i, j]), int(tn[i, j]), int(fn[i, j])))
    logger.debug(f"Confusion search over {total} items: {len(matches)} matches")
    return matches
