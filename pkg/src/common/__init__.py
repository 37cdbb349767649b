"""PrivAR Privacy Pipeline

Common Module

Shared settings, logging setup and the exception hierarchy used by every tier.

Author: PrivAR Team
License: MIT"""

from .exceptions import PrivARError
from .config import Settings, load_settings
from .logging_setup import configure_logging

__all__ = [
    'PrivARError',
    'Settings',
    'load_settings',
    'configure_logging',
]
