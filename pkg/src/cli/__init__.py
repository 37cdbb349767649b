"""
PrivAR Privacy Pipeline
Command Line and Warnings

Author: PrivAR Team
License: MIT
"""

from .warnings import (
    FlashSchedule,
    WarningMode,
    flash_visible,
    render_sequence,
    render_warning,
    warning_geometry,
)

__all__ = [
    'WarningMode',
    'FlashSchedule',
    'flash_visible',
    'render_warning',
    'render_sequence',
    'warning_geometry',
]
