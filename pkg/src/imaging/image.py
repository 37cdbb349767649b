"""
PrivAR Privacy Pipeline
Image Types Module

Raster, box, mask and obfuscation-parameter types shared by every tier.

Author: PrivAR Team
License: MIT
"""

import hashlib
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional

import numpy as np

from src.common.exceptions import ImageDimensionError, ParameterError


@dataclass(frozen=True)
class Image:
    """Decoded 8-bit raster, shape (height, width) or (height, width, 3)."""
    pixels: np.ndarray

    def __post_init__(self) -> None:
        pixels = np.asarray(self.pixels)
        if pixels.dtype != np.uint8:
            raise ImageDimensionError(f"expected uint8 samples, got {pixels.dtype}")
        if pixels.ndim == 3 and pixels.shape[2] == 1:
            pixels = pixels[:, :, 0]
        if pixels.ndim not in (2, 3) or (pixels.ndim == 3 and pixels.shape[2] != 3):
            raise ImageDimensionError(f"unsupported raster shape {pixels.shape}")
        if pixels.shape[0] == 0 or pixels.shape[1] == 0:
            raise ImageDimensionError(f"zero-sized raster {pixels.shape}")
        pixels = np.array(pixels, copy=True, order='C')
        pixels.setflags(write=False)
        object.__setattr__(self, 'pixels', pixels)

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def channels(self) -> int:
        return 1 if self.pixels.ndim == 2 else 3

    def copy(self) -> 'Image':
        return Image(self.pixels.copy())

    def to_gray(self) -> np.ndarray:
        """Luma as a uint8 array (ITU-R 601 weights)."""
        if self.channels == 1:
            return self.pixels
        rgb = self.pixels.astype(np.float64)
        luma = rgb[..., 0] * 0.299 + rgb[..., 1] * 0.587 + rgb[..., 2] * 0.114
        return np.clip(np.rint(luma), 0, 255).astype(np.uint8)

    def to_rgb(self) -> 'Image':
        if self.channels == 3:
            return self
        return Image(np.repeat(self.pixels[:, :, None], 3, axis=2))


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned text region in pixel coordinates."""
    x: int
    y: int
    w: int
    h: int

    def __post_init__(self) -> None:
        for name in ('x', 'y', 'w', 'h'):
            object.__setattr__(self, name, int(getattr(self, name)))
        if self.w <= 0 or self.h <= 0:
            raise ParameterError(f"box must have positive size, got {self}")
        if self.x < 0 or self.y < 0:
            raise ParameterError(f"box origin must be non-negative, got {self}")

    @property
    def x2(self) -> int:
        return self.x + self.w

    @property
    def y2(self) -> int:
        return self.y + self.h

    @property
    def area(self) -> int:
        return self.w * self.h

    def within(self, width: int, height: int) -> bool:
        return self.x2 <= width and self.y2 <= height

    def contains(self, px: int, py: int, pad: int = 0) -> bool:
        return (self.x - pad <= px < self.x2 + pad) and (self.y - pad <= py < self.y2 + pad)

    def union(self, other: 'BoundingBox') -> 'BoundingBox':
        x = min(self.x, other.x)
        y = min(self.y, other.y)
        return BoundingBox(x, y, max(self.x2, other.x2) - x, max(self.y2, other.y2) - y)

    def intersection_area(self, other: 'BoundingBox') -> int:
        iw = min(self.x2, other.x2) - max(self.x, other.x)
        ih = min(self.y2, other.y2) - max(self.y, other.y)
        return max(0, iw) * max(0, ih)

    def iou(self, other: 'BoundingBox') -> float:
        inter = self.intersection_area(other)
        if inter == 0:
            return 0.0
        return inter / float(self.area + other.area - inter)

    def to_dict(self) -> dict:
        return {'x': self.x, 'y': self.y, 'w': self.w, 'h': self.h}

    @classmethod
    def from_dict(cls, data: dict) -> 'BoundingBox':
        return cls(data['x'], data['y'], data['w'], data['h'])

    @classmethod
    def clamped(
        cls, x: int, y: int, w: int, h: int, width: int, height: int
    ) -> Optional['BoundingBox']:
        """Clip raw coordinates to the image; None when nothing remains."""
        x0 = max(0, int(x))
        y0 = max(0, int(y))
        x1 = min(int(width), int(x) + int(w))
        y1 = min(int(height), int(y) + int(h))
        if x1 <= x0 or y1 <= y0:
            return None
        return cls(x0, y0, x1 - x0, y1 - y0)


@dataclass(frozen=True)
class BinaryMask:
    """Rasterized union of (padded) boxes; bits is a bool array (height, width)."""
    bits: np.ndarray

    def __post_init__(self) -> None:
        bits = np.array(self.bits, dtype=bool, copy=True)
        if bits.ndim != 2:
            raise ImageDimensionError(f"mask must be 2-D, got {bits.shape}")
        bits.setflags(write=False)
        object.__setattr__(self, 'bits', bits)

    @property
    def height(self) -> int:
        return int(self.bits.shape[0])

    @property
    def width(self) -> int:
        return int(self.bits.shape[1])

    @property
    def popcount(self) -> int:
        return int(self.bits.sum())

    @property
    def fraction(self) -> float:
        return self.popcount / float(self.bits.size)


@dataclass(frozen=True)
class ObfuscationParams:
    """Blur/warp strength, mask dilation and warp seed."""
    sigma: float = 5.0
    beta: float = 40.0
    pad: int = 4
    seed: int = 0
    field_sigma: float = 8.0

    def __post_init__(self) -> None:
        for name in ('sigma', 'beta', 'pad'):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ParameterError(f"{name} must be finite and non-negative, got {value}")
        if not math.isfinite(self.field_sigma) or self.field_sigma <= 0:
            raise ParameterError(f"field_sigma must be positive, got {self.field_sigma}")
        object.__setattr__(self, 'seed', int(self.seed) & 0xFFFFFFFFFFFFFFFF)

    def echo(self) -> dict:
        """Parameters without the seed, as echoed to the cloud."""
        return {'sigma': self.sigma, 'beta': self.beta, 'pad': self.pad}


def image_fingerprint(image: Image) -> str:
    """SHA-256 over shape and pixel content."""
    digest = hashlib.sha256()
    digest.update(f"{image.height}x{image.width}x{image.channels}:".encode('ascii'))
    digest.update(image.pixels.tobytes())
    return digest.hexdigest()


def frame_seed(frame_id: str) -> int:
    """Stable 64-bit seed derived from a frame id."""
    digest = hashlib.blake2b(frame_id.encode('utf-8'), digest_size=8).digest()
    return int.from_bytes(digest, 'big')


def sort_boxes(boxes: Iterable[BoundingBox]) -> List[BoundingBox]:
    """Reading order: top to bottom, then left to right."""
    return sorted(boxes, key=lambda b: (b.y, b.x, b.h, b.w))
