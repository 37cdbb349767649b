"""
PrivAR Privacy Pipeline
Box Operations Module

IoU, clamping and fixpoint merging of axis-aligned text boxes.

Author: PrivAR Team
License: MIT
"""

from typing import Iterable, List, Optional, Sequence

from src.common.exceptions import ParameterError
from src.imaging.image import BoundingBox, sort_boxes


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union of two boxes."""
    return a.iou(b)


def clamp_boxes(
    boxes: Iterable[BoundingBox], width: int, height: int
) -> List[BoundingBox]:
    """Clip boxes to the image, dropping those left with no area."""
    clamped: List[Optional[BoundingBox]] = [
        BoundingBox.clamped(b.x, b.y, b.w, b.h, width, height) for b in boxes
    ]
    return [b for b in clamped if b is not None]


def merge_boxes(boxes: Sequence[BoundingBox], iou_threshold: float) -> List[BoundingBox]:
    """
    Merge overlapping boxes into their union rectangle until no pair qualifies.

    The first qualifying pair (i, j) in list order is merged on every pass;
    the union takes the place of i and j is removed.

    Args:
        boxes: Candidate boxes
        iou_threshold: Pairs with IoU at or above this are merged

    Returns:
        Merged boxes in (y, x) order
    """
    if not 0.0 <= iou_threshold <= 1.0:
        raise ParameterError(f"iou_threshold must lie in [0, 1], got {iou_threshold}")

    current = list(boxes)
    merged = True
    while merged:
        merged = False
        for i in range(len(current)):
            for j in range(i + 1, len(current)):
                if current[i].iou(current[j]) >= iou_threshold:
                    current[i] = current[i].union(current[j])
                    del current[j]
                    merged = True
                    break
            if merged:
                break
    return sort_boxes(current)
