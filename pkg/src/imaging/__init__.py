"""
PrivAR Privacy Pipeline
Imaging Core

Pure pixel operations: codec round-trip, Gaussian blur, elastic deformation,
mask construction and the obfuscation compositing step.

Author: PrivAR Team
License: MIT
"""

from .bitmap_font import render_text, text_mask, text_size
from .codec import (
    compress,
    decompress,
    encode_png,
    load_image,
    mask_to_png,
    probe_size,
    save_png,
)
from .filters import displacement_field, elastic_deform, gaussian_blur, gaussian_kernel
from .image import (
    BinaryMask,
    BoundingBox,
    Image,
    ObfuscationParams,
    frame_seed,
    image_fingerprint,
    sort_boxes,
)
from .obfuscation import build_mask, obfuscate, protect_frame

__all__ = [
    'Image',
    'BoundingBox',
    'BinaryMask',
    'ObfuscationParams',
    'image_fingerprint',
    'frame_seed',
    'sort_boxes',
    'compress',
    'decompress',
    'encode_png',
    'load_image',
    'save_png',
    'mask_to_png',
    'probe_size',
    'gaussian_blur',
    'gaussian_kernel',
    'elastic_deform',
    'displacement_field',
    'build_mask',
    'obfuscate',
    'protect_frame',
    'render_text',
    'text_mask',
    'text_size',
]

# Defaults for the obfuscation stage
IMAGING_CONFIG = {
    'quality': 75,
    'sigma': 5.0,
    'beta': 40.0,
    'pad': 4,
    'field_sigma': 8.0,
}
