"""
PrivAR Privacy Pipeline
Heuristic Text Detector Module

Morphological text-line detector used on the edge when no neural detector
output is available. Tuned for high-contrast horizontal Latin text.

Author: PrivAR Team
License: MIT
"""

import logging
from dataclasses import dataclass
from typing import List, Optional

import cv2
import numpy as np
from scipy import ndimage

from src.common.exceptions import ParameterError
from src.imaging.image import BoundingBox, Image, sort_boxes
from .box_ops import merge_boxes

logger = logging.getLogger(__name__)

# Otsu thresholds below this gradient are treated as a flat image
MIN_GRADIENT = 16


@dataclass(frozen=True)
class DetectorConfig:
    """Tuning for the heuristic detector."""
    min_area: int = 64
    max_area_fraction: float = 0.5
    min_aspect: float = 1.2
    max_aspect: float = 25.0
    binarization: str = 'otsu'
    threshold: int = 40
    merge_iou: float = 0.3
    line_gap: int = 25

    def __post_init__(self) -> None:
        if self.min_area < 1:
            raise ParameterError(f"min_area must be >= 1, got {self.min_area}")
        if not 0.0 < self.max_area_fraction <= 1.0:
            raise ParameterError(
                f"max_area_fraction must lie in (0, 1], got {self.max_area_fraction}"
            )
        if self.min_aspect > self.max_aspect:
            raise ParameterError(
                f"min_aspect {self.min_aspect} exceeds max_aspect {self.max_aspect}"
            )
        if not 0.0 <= self.merge_iou <= 1.0:
            raise ParameterError(f"merge_iou must lie in [0, 1], got {self.merge_iou}")
        if self.binarization not in ('otsu', 'fixed'):
            raise ParameterError(f"unknown binarization '{self.binarization}'")
        if not 0 <= self.threshold <= 255:
            raise ParameterError(f"threshold must lie in 0..255, got {self.threshold}")
        if self.line_gap < 1:
            raise ParameterError(f"line_gap must be >= 1, got {self.line_gap}")

    @classmethod
    def from_settings(cls, settings) -> 'DetectorConfig':
        """Build from a DetectorSettings section."""
        return cls(
            min_area=settings.min_area,
            max_area_fraction=settings.max_area_fraction,
            min_aspect=settings.min_aspect,
            max_aspect=settings.max_aspect,
            binarization=settings.binarization,
            threshold=settings.threshold,
            merge_iou=settings.merge_iou,
            line_gap=settings.line_gap,
        )


def _binarize(gradient: np.ndarray, config: DetectorConfig) -> np.ndarray:
    if config.binarization == 'fixed':
        _, binary = cv2.threshold(gradient, config.threshold, 255, cv2.THRESH_BINARY)
        return binary
    otsu, binary = cv2.threshold(gradient, 0, 255, cv2.THRESH_BINARY + cv2.THRESH_OTSU)
    if otsu < MIN_GRADIENT:
        _, binary = cv2.threshold(gradient, MIN_GRADIENT, 255, cv2.THRESH_BINARY)
    return binary


def _keep(box: BoundingBox, image_area: int, config: DetectorConfig) -> bool:
    if box.area < config.min_area:
        return False
    if box.area > config.max_area_fraction * image_area:
        return False
    aspect = box.w / float(box.h)
    return config.min_aspect <= aspect <= config.max_aspect


def detect_heuristic(
    image: Image, config: Optional[DetectorConfig] = None
) -> List[BoundingBox]:
    """
    Detect horizontal text lines.

    Args:
        image: Grayscale or RGB frame
        config: Detector tuning, defaults when omitted

    Returns:
        Text boxes in (y, x) order, empty when the frame holds no text
    """
    config = config or DetectorConfig()
    gray = np.ascontiguousarray(image.to_gray())

    square = cv2.getStructuringElement(cv2.MORPH_RECT, (3, 3))
    gradient = cv2.morphologyEx(gray, cv2.MORPH_GRADIENT, square)
    binary = _binarize(gradient, config)
    if not binary.any():
        return []

    line_kernel = cv2.getStructuringElement(cv2.MORPH_RECT, (config.line_gap, 1))
    lines = cv2.dilate(binary, line_kernel)
    count, labels = cv2.connectedComponents(lines, connectivity=8)

    # Box each line by its undilated stroke pixels
    stroke_labels = np.where(binary > 0, labels, 0)
    image_area = image.width * image.height
    candidates: List[BoundingBox] = []
    for rows, cols in filter(None, ndimage.find_objects(stroke_labels, max_label=count - 1)):
        box = BoundingBox(
            cols.start, rows.start, cols.stop - cols.start, rows.stop - rows.start
        )
        if _keep(box, image_area, config):
            candidates.append(box)

    boxes = merge_boxes(candidates, config.merge_iou)
    logger.debug(
        f"Heuristic detector: {count - 1} components, {len(candidates)} kept, "
        f"{len(boxes)} after merge"
    )
    return sort_boxes(boxes)

