"""
PrivAR Privacy Pipeline
Service Runtime Module

Pieces shared by the edge and cloud apps: the bounded request gate and
the ServiceError -> JSON response mapping.

Author: PrivAR Team
License: MIT
"""

import logging
import threading
from contextlib import contextmanager
from typing import Any, Dict, Iterator

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from src.common.exceptions import ServiceError

logger = logging.getLogger(__name__)


class ConcurrencyGate:
    """Caps in-flight requests; waiting longer than queue_timeout_s yields 503."""

    def __init__(self, max_concurrency: int, queue_timeout_s: float):
        if max_concurrency < 1:
            raise ValueError(f"max_concurrency must be >= 1, got {max_concurrency}")
        self.max_concurrency = max_concurrency
        self.queue_timeout_s = queue_timeout_s
        self._slots = threading.BoundedSemaphore(max_concurrency)

    @contextmanager
    def slot(self, frame_id: str = '') -> Iterator[None]:
        if not self._slots.acquire(timeout=self.queue_timeout_s):
            logger.warning(f"Frame {frame_id}: no slot free after {self.queue_timeout_s}s")
            raise ServiceError(503, {'detail': 'service busy', 'frame_id': frame_id or None})
        try:
            yield
        finally:
            self._slots.release()


def error_body(error: ServiceError) -> Dict[str, Any]:
    if isinstance(error.detail, dict):
        body = {k: v for k, v in error.detail.items() if v is not None}
        body.setdefault('detail', str(error))
        return body
    return {'detail': str(error.detail)}


def add_error_handlers(app: FastAPI) -> None:
    @app.exception_handler(ServiceError)
    async def _service_error(request: Request, exc: ServiceError) -> JSONResponse:
        return JSONResponse(status_code=exc.status_code, content=error_body(exc))
