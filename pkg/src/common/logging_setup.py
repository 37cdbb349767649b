"""
PrivAR Privacy Pipeline
Logging Setup Module

Applies the YAML logging section: console handler, optional rotating file
handler, plain or JSON-lines formatting.

Author: PrivAR Team
License: MIT
"""

import logging
import logging.config
from typing import Any, Dict

from .config import LoggingSettings


def configure_logging(settings: LoggingSettings) -> None:
    """Configure root logging from settings."""
    if settings.json_format:
        formatter: Dict[str, Any] = {
            '()': 'pythonjsonlogger.jsonlogger.JsonFormatter',
            'fmt': settings.format,
        }
    else:
        formatter = {'format': settings.format}

    handlers: Dict[str, Dict[str, Any]] = {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'default',
            'stream': 'ext://sys.stderr',
        }
    }
    if settings.file:
        handlers['file'] = {
            'class': 'logging.handlers.RotatingFileHandler',
            'formatter': 'default',
            'filename': settings.file,
            'maxBytes': settings.max_bytes,
            'backupCount': settings.backup_count,
            'encoding': 'utf-8',
        }

    logging.config.dictConfig({
        'version': 1,
        'disable_existing_loggers': False,
        'formatters': {'default': formatter},
        'handlers': handlers,
        'root': {
            'level': settings.level.upper(),
            'handlers': list(handlers),
        },
    })
    logging.getLogger(__name__).debug(
        f"Logging configured: level={settings.level} handlers={list(handlers)}"
    )
