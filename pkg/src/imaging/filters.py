"""
PrivAR Privacy Pipeline
Filters Module

Gaussian low-pass filtering and elastic deformation. Intermediate results
stay in float64 and are quantized to 8 bit once, at the public boundary.

Author: PrivAR Team
License: MIT
"""

import logging
import math
from typing import Tuple

import numpy as np
from scipy import ndimage

from src.common.exceptions import ParameterError
from .image import Image

logger = logging.getLogger(__name__)

# Std-dev (pixels) of the Gaussian that smooths the raw warp noise
FIELD_SIGMA = 8.0


def quantize(values: np.ndarray) -> np.ndarray:
    """Round to nearest and clip into uint8."""
    return np.clip(np.rint(values), 0, 255).astype(np.uint8)


def gaussian_kernel(sigma: float) -> np.ndarray:
    """1-D kernel truncated at radius ceil(3*sigma), normalized to sum 1."""
    radius = int(math.ceil(3.0 * sigma))
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-0.5 * (offsets / sigma) ** 2)
    return kernel / kernel.sum()


def blur_float(pixels: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian over the two spatial axes with reflect borders."""
    result = pixels.astype(np.float64)
    if sigma == 0:
        return result
    kernel = gaussian_kernel(sigma)
    result = ndimage.correlate1d(result, kernel, axis=0, mode='reflect')
    return ndimage.correlate1d(result, kernel, axis=1, mode='reflect')


def gaussian_blur(image: Image, sigma: float) -> Image:
    """
    Gaussian low-pass filter.

    Args:
        image: Input raster
        sigma: Kernel std-dev in pixels; 0 returns an identical copy

    Returns:
        Blurred image
    """
    if not math.isfinite(sigma) or sigma < 0:
        raise ParameterError(f"sigma must be finite and non-negative, got {sigma}")
    if sigma == 0:
        return image.copy()
    return Image(quantize(blur_float(image.pixels, sigma)))


def displacement_field(
    height: int,
    width: int,
    beta: float,
    seed: int,
    field_sigma: float = FIELD_SIGMA,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Seeded warp field scaled so the largest displacement is exactly beta.

    Returns:
        (dx, dy) float64 arrays of shape (height, width)
    """
    rng = np.random.default_rng(seed)
    noise = rng.uniform(-1.0, 1.0, size=(2, height, width))
    dx = ndimage.gaussian_filter(noise[0], field_sigma, mode='reflect')
    dy = ndimage.gaussian_filter(noise[1], field_sigma, mode='reflect')
    peak = float(np.max(np.hypot(dx, dy)))
    if peak > 0:
        dx = dx / peak
        dy = dy / peak
    return dx * beta, dy * beta


def warp_float(
    pixels: np.ndarray,
    beta: float,
    seed: int,
    field_sigma: float = FIELD_SIGMA,
) -> np.ndarray:
    """Backward bilinear warp with coordinates clamped to the raster."""
    values = pixels.astype(np.float64)
    if beta == 0:
        return values
    height, width = values.shape[:2]
    dx, dy = displacement_field(height, width, beta, seed, field_sigma)
    rows, cols = np.meshgrid(
        np.arange(height, dtype=np.float64),
        np.arange(width, dtype=np.float64),
        indexing='ij',
    )
    coords = np.stack([
        np.clip(rows + dy, 0, height - 1),
        np.clip(cols + dx, 0, width - 1),
    ])
    if values.ndim == 2:
        return ndimage.map_coordinates(values, coords, order=1, mode='nearest')
    channels = [
        ndimage.map_coordinates(values[..., c], coords, order=1, mode='nearest')
        for c in range(values.shape[2])
    ]
    return np.stack(channels, axis=-1)


def elastic_deform(
    image: Image,
    beta: float,
    seed: int,
    field_sigma: float = FIELD_SIGMA,
) -> Image:
    """
    Elastic deformation via a seeded random warp field.

    Args:
        image: Input raster
        beta: Maximum displacement in pixels; 0 returns an identical copy
        seed: RNG seed for the warp noise
        field_sigma: Smoothing of the warp noise

    Returns:
        Warped image, deterministic in (image, beta, seed)
    """
    if not math.isfinite(beta) or beta < 0:
        raise ParameterError(f"beta must be finite and non-negative, got {beta}")
    if beta == 0:
        return image.copy()
    return Image(quantize(warp_float(image.pixels, beta, seed, field_sigma)))
