"""
PrivAR Privacy Pipeline
Cloud Service Module

Receives obfuscated frames from the edge and runs the three-stage risk
assessment. Frames not marked as obfuscated are refused.

Author: PrivAR Team
License: MIT
"""

import logging
import time
from typing import Optional

from fastapi import FastAPI
from fastapi.concurrency import run_in_threadpool

from src import __version__
from src.common.config import Settings
from src.common.exceptions import BackendError, DecodeError, ScenarioMissingError, ServiceError
from src.imaging.codec import probe_size
from src.risk_assessment.assessor import RiskAssessor
from src.risk_assessment.backends import VLMBackend, create_backend

from .runtime import ConcurrencyGate, add_error_handlers
from .schemas import (
    AssessRequest,
    AssessResponse,
    HealthResponse,
    RiskAssessmentModel,
    decode_image,
)

logger = logging.getLogger(__name__)


class CloudService:
    """Risk assessment tier."""

    def __init__(self, assessor: RiskAssessor, max_concurrency: int = 8, queue_timeout_s: float = 5.0):
        self.assessor = assessor
        self.gate = ConcurrencyGate(max_concurrency, queue_timeout_s)

    def handle_assess(self, request: AssessRequest) -> AssessResponse:
        """
        Assess one obfuscated frame.

        Args:
            request: AssessRequest from the edge

        Returns:
            AssessResponse with the cloud processing time filled in
        """
        frame_id = request.frame_id
        if not request.obfuscation_applied:
            logger.warning(f"Frame {frame_id}: refused, obfuscation_applied is false")
            raise ServiceError(403, {'detail': 'unobfuscated frame refused', 'frame_id': frame_id})

        data = decode_image(request.obfuscated_image, frame_id)
        try:
            width, height = probe_size(data)
        except DecodeError as e:
            raise ServiceError(400, {'detail': f"cannot decode image: {e}", 'frame_id': frame_id}) from e

        boxes = [model.to_box() for model in request.boxes]
        for index, box in enumerate(boxes):
            if not box.within(width, height):
                raise ServiceError(422, {
                    'detail': f"box {index} {box.to_dict()} exceeds image bounds {width}x{height}",
                    'frame_id': frame_id,
                })

        with self.gate.slot(frame_id):
            started = time.perf_counter()
            try:
                assessment = self.assessor.assess(data, boxes, frame_id)
            except BackendError as e:
                logger.error(f"Frame {frame_id}: backend failed at stage {e.stage}: {e}")
                raise ServiceError(502, {'detail': str(e), 'frame_id': frame_id, 'stage': e.stage}) from e
            except ScenarioMissingError as e:
                logger.error(f"Frame {frame_id}: {e}")
                raise ServiceError(502, {'detail': str(e), 'frame_id': frame_id, 'stage': 'scene'}) from e
            elapsed = (time.perf_counter() - started) * 1000

        return AssessResponse(
            frame_id=frame_id,
            assessment=RiskAssessmentModel.from_assessment(assessment),
            processing_ms={'cloud': round(elapsed, 3)},
        )


def build_cloud_service(settings: Settings, backend: Optional[VLMBackend] = None) -> CloudService:
    backend = backend or create_backend(settings.backend)
    logger.info(f"Cloud service using backend {backend.backend_id}")
    return CloudService(
        RiskAssessor(backend),
        max_concurrency=settings.services.max_concurrency,
        queue_timeout_s=settings.services.queue_timeout_s,
    )


def create_cloud_app(service: CloudService) -> FastAPI:
    """FastAPI app exposing the cloud tier."""
    app = FastAPI(
        title="PrivAR Cloud",
        description="Risk assessment over obfuscated frames",
        version=__version__,
    )
    add_error_handlers(app)
    app.state.service = service

    @app.get("/v1/health", response_model=HealthResponse)
    async def health():
        return HealthResponse(tier='cloud', version=__version__)

    @app.post("/v1/assess", response_model=AssessResponse)
    async def assess_frame(request: AssessRequest):
        return await run_in_threadpool(service.handle_assess, request)

    return app
