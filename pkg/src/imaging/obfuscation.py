"""
PrivAR Privacy Pipeline
Obfuscation Module

Mask construction from text boxes and the compositing step
    out = (1 - M) * I + M * E(G(I; sigma); beta)
applied as per-pixel selection.

Author: PrivAR Team
License: MIT
"""

import logging
from typing import Sequence, Tuple

import numpy as np

from src.common.exceptions import ParameterError

from .codec import compress
from .filters import blur_float, quantize, warp_float
from .image import BinaryMask, BoundingBox, Image, ObfuscationParams

logger = logging.getLogger(__name__)


def build_mask(
    boxes: Sequence[BoundingBox],
    width: int,
    height: int,
    pad: int = 0,
) -> BinaryMask:
    """
    Rasterize the union of boxes dilated by pad, clamped to the image.

    Args:
        boxes: Text regions
        width: Mask width in pixels
        height: Mask height in pixels
        pad: Dilation applied on every side

    Returns:
        BinaryMask with bit 1 inside the padded union
    """
    if width <= 0 or height <= 0:
        raise ParameterError(f"mask dimensions must be positive, got {width}x{height}")
    bits = np.zeros((height, width), dtype=bool)
    for box in boxes:
        x0 = max(0, box.x - pad)
        y0 = max(0, box.y - pad)
        x1 = min(width, box.x2 + pad)
        y1 = min(height, box.y2 + pad)
        if x1 > x0 and y1 > y0:
            bits[y0:y1, x0:x1] = True
    return BinaryMask(bits)


def obfuscate(
    image: Image,
    boxes: Sequence[BoundingBox],
    params: ObfuscationParams,
) -> Image:
    """
    Blur and warp the text regions of an image.

    Pixels outside the padded box union are returned bit-identical.

    Args:
        image: Compressed frame
        boxes: Detected or annotated text regions
        params: Blur/warp strength, padding and seed

    Returns:
        Obfuscated image
    """
    mask = build_mask(boxes, image.width, image.height, params.pad)
    if mask.popcount == 0:
        return image.copy()

    blurred = blur_float(image.pixels, params.sigma)
    warped = quantize(warp_float(blurred, params.beta, params.seed, params.field_sigma))

    selector = mask.bits if image.channels == 1 else mask.bits[:, :, None]
    result = np.where(selector, warped, image.pixels)
    logger.debug(
        f"Obfuscated {len(boxes)} boxes covering {mask.fraction:.1%} of "
        f"{image.width}x{image.height}"
    )
    return Image(result.astype(np.uint8))


def protect_frame(
    image: Image,
    boxes: Sequence[BoundingBox],
    params: ObfuscationParams,
    quality: int,
) -> Tuple[bytes, BinaryMask]:
    """
    Obfuscate a decoded frame and re-encode it for transmission.

    Returns:
        (JPEG bytes at quality, the mask that was applied)
    """
    mask = build_mask(boxes, image.width, image.height, params.pad)
    protected = obfuscate(image, boxes, params)
    return compress(protected, quality), mask
