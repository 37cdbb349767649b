"""
PrivAR Privacy Pipeline
Raster Codec Module

JPEG compression round-trip for the capture path plus PNG helpers for
lossless fixtures and debug masks.

Author: PrivAR Team
License: MIT
"""

import io
import logging
from pathlib import Path
from typing import Tuple, Union

import numpy as np
from PIL import Image as PILImage
from PIL import UnidentifiedImageError

from src.common.exceptions import DecodeError, ImageDimensionError, ParameterError
from .image import BinaryMask, Image

logger = logging.getLogger(__name__)


def _to_pil(image: Image) -> PILImage.Image:
    mode = 'L' if image.channels == 1 else 'RGB'
    return PILImage.fromarray(np.asarray(image.pixels), mode=mode)


def _from_pil(pil: PILImage.Image) -> Image:
    if pil.mode not in ('L', 'RGB'):
        pil = pil.convert('RGB')
    return Image(np.array(pil, dtype=np.uint8))


def compress(image: Image, quality: int) -> bytes:
    """
    Encode an image as baseline JPEG.

    Args:
        image: Raster to encode
        quality: JPEG quality factor, 1..100

    Returns:
        Encoded JPEG bytes
    """
    if not isinstance(image, Image) or image.width == 0 or image.height == 0:
        raise ImageDimensionError("cannot compress a zero-sized image")
    if not 1 <= int(quality) <= 100:
        raise ParameterError(f"quality must lie in 1..100, got {quality}")
    buffer = io.BytesIO()
    _to_pil(image).save(buffer, format='JPEG', quality=int(quality))
    return buffer.getvalue()


def encode_png(image: Image) -> bytes:
    buffer = io.BytesIO()
    _to_pil(image).save(buffer, format='PNG')
    return buffer.getvalue()


def decompress(data: bytes, expected_format: str = '') -> Image:
    """
    Decode a JPEG or PNG stream.

    Args:
        data: Encoded bytes
        expected_format: Optional 'jpeg' or 'png' the stream must match

    Returns:
        Decoded Image (grayscale or RGB)
    """
    if not data:
        raise DecodeError("empty stream", 0)
    buffer = io.BytesIO(data)
    try:
        pil = PILImage.open(buffer)
        if expected_format and pil.format and pil.format.lower() != expected_format.lower():
            raise DecodeError(
                f"stream is {pil.format}, expected {expected_format}", 0
            )
        pil.load()
    except DecodeError:
        raise
    except UnidentifiedImageError as e:
        raise DecodeError(f"unrecognized raster stream: {e}", 0) from e
    except (OSError, SyntaxError, ValueError) as e:
        raise DecodeError(f"malformed raster stream: {e}", buffer.tell()) from e
    return _from_pil(pil)


def probe_size(data: bytes) -> Tuple[int, int]:
    """(width, height) from the stream header without decoding pixels."""
    try:
        with PILImage.open(io.BytesIO(data)) as pil:
            return pil.size
    except (UnidentifiedImageError, OSError) as e:
        raise DecodeError(f"unrecognized raster stream: {e}", 0) from e


def load_image(path: Union[str, Path]) -> Image:
    with open(path, 'rb') as f:
        return decompress(f.read())


def save_png(image: Image, path: Union[str, Path]) -> None:
    _to_pil(image).save(str(path), format='PNG')


def mask_to_png(mask: BinaryMask, path: Union[str, Path]) -> None:
    """Write a mask as a 1-bit PNG for debugging."""
    PILImage.fromarray(np.asarray(mask.bits)).convert('1').save(str(path), format='PNG')
    logger.debug(f"Wrote mask {mask.width}x{mask.height} ({mask.popcount} set) to {path}")
