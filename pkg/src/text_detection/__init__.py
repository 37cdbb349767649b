"""
PrivAR Privacy Pipeline
Text Detection

Text-region boxes for the edge tier: heuristic detector, ground-truth
annotations and replayed external detector output.

Author: PrivAR Team
License: MIT
"""

from .box_ops import clamp_boxes, iou, merge_boxes
from .heuristic_detector import DetectorConfig, detect_heuristic
from .sources import (
    AnnotationDetector,
    DetectionResult,
    DetectionSource,
    ExternalFileDetector,
    HeuristicDetector,
    TextDetector,
    create_detector,
    load_annotated_boxes,
    load_detection_sidecar,
)

__all__ = [
    'DetectorConfig',
    'detect_heuristic',
    'merge_boxes',
    'clamp_boxes',
    'iou',
    'DetectionSource',
    'DetectionResult',
    'TextDetector',
    'HeuristicDetector',
    'AnnotationDetector',
    'ExternalFileDetector',
    'create_detector',
    'load_annotated_boxes',
    'load_detection_sidecar',
]
