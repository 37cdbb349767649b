"""
PrivAR Privacy Pipeline
Object Recognition Baseline Module

Replays recorded object-detector output and flags frames containing
objects commonly associated with private information.

Author: PrivAR Team
License: MIT
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Collection, Dict, List, Sequence, Union

import pandas as pd

from src.common.exceptions import ParameterError, SourceMissingError
from src.imaging.image import BoundingBox

logger = logging.getLogger(__name__)

DETECTION_COLUMNS = ['frame_id', 'class', 'confidence', 'x', 'y', 'w', 'h']

SENSITIVE_CLASSES = ('id-card', 'credit-card', 'laptop', 'cell-phone', 'document')


@dataclass(frozen=True)
class RecordedDetection:
    """One recorded object detection."""
    frame_id: str
    class_label: str
    confidence: float
    box: BoundingBox

    def __post_init__(self) -> None:
        if not 0.0 <= self.confidence <= 1.0:
            raise ParameterError(f"confidence must lie in [0, 1], got {self.confidence}")


def load_recorded_detections(path: Union[str, Path]) -> Dict[str, List[RecordedDetection]]:
    """Read a CSV sidecar frame_id,class,confidence,x,y,w,h grouped by frame id."""
    try:
        frame = pd.read_csv(path, dtype={'frame_id': str, 'class': str})
    except FileNotFoundError as e:
        raise SourceMissingError(f"detection sidecar not found: {path}") from e
    except (OSError, pd.errors.ParserError) as e:
        raise SourceMissingError(f"cannot read detection sidecar {path}: {e}") from e
    missing = [c for c in DETECTION_COLUMNS if c not in frame.columns]
    if missing:
        raise SourceMissingError(f"detection sidecar {path} lacks columns {missing}")

    detections: Dict[str, List[RecordedDetection]] = {}
    for row in frame.to_dict(orient='records'):
        detection = RecordedDetection(
            frame_id=row['frame_id'],
            class_label=row['class'],
            confidence=float(row['confidence']),
            box=BoundingBox(row['x'], row['y'], row['w'], row['h']),
        )
        detections.setdefault(detection.frame_id, []).append(detection)
    return detections


def object_recognition_classify(
    detections: Sequence[RecordedDetection],
    sensitive_classes: Collection[str] = SENSITIVE_CLASSES,
    confidence_threshold: float = 0.5,
) -> bool:
    """True iff some detection of a sensitive class reaches the threshold."""
    if not 0.0 <= confidence_threshold <= 1.0:
        raise ParameterError(
            f"confidence_threshold must lie in [0, 1], got {confidence_threshold}"
        )
    classes = set(sensitive_classes)
    return any(
        d.class_label in classes and d.confidence >= confidence_threshold
        for d in detections
    )


class ObjectRecognitionClassifier:
    """Looks an item's recorded detections up by item id."""

    name = 'object-recognition'

    def __init__(
        self,
        detections: Dict[str, List[RecordedDetection]],
        sensitive_classes: Collection[str] = SENSITIVE_CLASSES,
        confidence_threshold: float = 0.5,
    ):
        self.detections = detections
        self.sensitive_classes = tuple(sensitive_classes)
        self.confidence_threshold = confidence_threshold

    def classify(self, sample) -> bool:
        return object_recognition_classify(
            self.detections.get(sample.item.id, []),
            self.sensitive_classes,
            self.confidence_threshold,
        )
