"""
PrivAR Privacy Pipeline
Detection Sources Module

The TextDetector interface and its three implementations: the native
heuristic detector, ground-truth annotations (oracle-guided obfuscation)
and replayed output of an external neural detector.

Author: PrivAR Team
License: MIT
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Dict, List, Mapping, Optional, Protocol, Tuple, Union

import pandas as pd

from src.common.exceptions import (
    AnnotationMissingError,
    ConfigurationError,
    SourceMissingError,
)
from src.imaging.image import BoundingBox, Image
from .box_ops import clamp_boxes
from .heuristic_detector import DetectorConfig, detect_heuristic

if TYPE_CHECKING:
    from src.evaluation.manifest import DatasetItem

logger = logging.getLogger(__name__)

SIDECAR_COLUMNS = ['frame_id', 'x', 'y', 'w', 'h', 'confidence']


@dataclass(frozen=True)
class DetectionSource:
    """Where a box set came from."""
    kind: str  # 'heuristic', 'annotation', 'external-file'
    provenance: str


@dataclass(frozen=True)
class DetectionResult:
    """Boxes tagged with exactly one source."""
    boxes: List[BoundingBox]
    source: DetectionSource
    confidences: List[float] = field(default_factory=list)


class TextDetector(Protocol):
    kind: str

    def detect(self, image: Image, frame_id: Optional[str] = None) -> DetectionResult:
        ...


def load_annotated_boxes(
    item: 'DatasetItem',
    width: Optional[int] = None,
    height: Optional[int] = None,
) -> List[BoundingBox]:
    """
    Ground-truth text boxes of a dataset item, clamped to the image.

    Args:
        item: Dataset item carrying annotation records
        width: Image width, defaults to the item's recorded width
        height: Image height, defaults to the item's recorded height

    Returns:
        Annotated boxes in annotation order
    """
    if item.annotations is None:
        raise AnnotationMissingError(item.id)
    width = width if width is not None else item.width
    height = height if height is not None else item.height
    return clamp_boxes((a.box for a in item.annotations), width, height)


class HeuristicDetector:
    """Morphological detector running on the frame itself."""

    kind = 'heuristic'

    def __init__(self, config: Optional[DetectorConfig] = None):
        self.config = config or DetectorConfig()

    def detect(self, image: Image, frame_id: Optional[str] = None) -> DetectionResult:
        boxes = detect_heuristic(image, self.config)
        return DetectionResult(boxes, DetectionSource('heuristic', 'morphology-v1'))


class AnnotationDetector:
    """Looks the frame id up among dataset items and returns their annotations."""

    kind = 'annotation'

    def __init__(self, items: Mapping[str, 'DatasetItem'], provenance: str = 'manifest'):
        self.items = dict(items)
        self.provenance = provenance

    def detect(self, image: Image, frame_id: Optional[str] = None) -> DetectionResult:
        item = self.items.get(frame_id or '')
        if item is None:
            raise AnnotationMissingError(frame_id or '<none>')
        boxes = load_annotated_boxes(item, image.width, image.height)
        return DetectionResult(boxes, DetectionSource('annotation', self.provenance))


def load_detection_sidecar(
    path: Union[str, Path]
) -> Dict[str, List[Tuple[BoundingBox, float]]]:
    """
    Read an external detector sidecar.

    Args:
        path: CSV with header frame_id,x,y,w,h,confidence

    Returns:
        Boxes and confidences per frame id, in file order
    """
    try:
        frame = pd.read_csv(path, dtype={'frame_id': str})
    except FileNotFoundError as e:
        raise SourceMissingError(f"detection sidecar not found: {path}") from e
    except (OSError, pd.errors.ParserError) as e:
        raise SourceMissingError(f"cannot read detection sidecar {path}: {e}") from e

    missing = [c for c in SIDECAR_COLUMNS if c not in frame.columns]
    if missing:
        raise SourceMissingError(f"detection sidecar {path} lacks columns {missing}")

    records: Dict[str, List[Tuple[BoundingBox, float]]] = {}
    for row in frame.itertuples(index=False):
        box = BoundingBox(int(row.x), int(row.y), int(row.w), int(row.h))
        records.setdefault(str(row.frame_id), []).append((box, float(row.confidence)))
    logger.info(f"Loaded {len(frame)} external detections for {len(records)} frames")
    return records


class ExternalFileDetector:
    """Replays boxes recorded from an external detector."""

    kind = 'external-file'

    def __init__(
        self,
        records: Mapping[str, List[Tuple[BoundingBox, float]]],
        provenance: str = 'sidecar',
        min_confidence: float = 0.0,
    ):
        self.records = dict(records)
        self.provenance = provenance
        self.min_confidence = min_confidence

    @classmethod
    def from_file(cls, path: Union[str, Path], min_confidence: float = 0.0) -> 'ExternalFileDetector':
        return cls(load_detection_sidecar(path), str(path), min_confidence)

    def detect(self, image: Image, frame_id: Optional[str] = None) -> DetectionResult:
        boxes: List[BoundingBox] = []
        confidences: List[float] = []
        for box, conf in self.records.get(frame_id or '', []):
            if conf < self.min_confidence:
                continue
            clamped = BoundingBox.clamped(box.x, box.y, box.w, box.h, image.width, image.height)
            if clamped is None:
                continue
            boxes.append(clamped)
            confidences.append(conf)
        return DetectionResult(boxes, DetectionSource('external-file', self.provenance), confidences)


def create_detector(
    kind: str,
    settings=None,
    items: Optional[Mapping[str, 'DatasetItem']] = None,
) -> TextDetector:
    """
    Build the configured detector.

    Args:
        kind: 'heuristic', 'annotation' or 'external'
        settings: DetectorSettings section (defaults when omitted)
        items: Dataset items for the annotation detector; loaded from
            settings.manifest_path when omitted

    Returns:
        A TextDetector
    """
    if kind == 'heuristic':
        config = DetectorConfig.from_settings(settings) if settings else DetectorConfig()
        return HeuristicDetector(config)

    if kind == 'annotation':
        if items is None:
            if settings is None or not settings.manifest_path:
                raise ConfigurationError("annotation detector requires a manifest path")
            from src.evaluation.manifest import load_manifest

            manifest = load_manifest(settings.manifest_path)
            items = {item.id: item for item in manifest.items}
        return AnnotationDetector(items)

    if kind in ('external', 'external-file'):
        if settings is None or not settings.sidecar_path:
            raise ConfigurationError("external detector requires a sidecar path")
        return ExternalFileDetector.from_file(settings.sidecar_path)

    raise ConfigurationError(f"unknown detector kind '{kind}'")
