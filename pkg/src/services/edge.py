"""
PrivAR Privacy Pipeline
Edge Service Module

Receives raw frames from the device, detects text, obfuscates the text
regions and forwards only the obfuscated frame to the cloud. The raw
frame is neither persisted nor forwarded.

Author: PrivAR Team
License: MIT
"""

import logging
import time
from dataclasses import replace
from typing import Optional, Protocol

import httpx
from fastapi import FastAPI
from fastapi.concurrency import run_in_threadpool

from src import __version__
from src.common.config import Settings
from src.common.exceptions import DecodeError, PrivARError, ServiceError
from src.imaging.codec import decompress
from src.imaging.image import ObfuscationParams, frame_seed
from src.imaging.obfuscation import protect_frame
from src.text_detection.sources import TextDetector, create_detector

from .cloud import CloudService
from .runtime import ConcurrencyGate, add_error_handlers
from .schemas import (
    AssessRequest,
    AssessResponse,
    BoxModel,
    FrameEnvelope,
    HealthResponse,
    ParamsEcho,
    decode_image,
    encode_image,
)

logger = logging.getLogger(__name__)


class CloudLink(Protocol):
    def assess(self, request: AssessRequest) -> AssessResponse:
        ...


class InProcessCloudLink:
    """Calls a CloudService in the same process."""

    def __init__(self, service: CloudService):
        self.service = service

    def assess(self, request: AssessRequest) -> AssessResponse:
        return self.service.handle_assess(request)


class HttpCloudLink:
    """POSTs AssessRequests to a remote cloud service."""

    def __init__(self, base_url: str, timeout_s: float = 30.0, client: Optional[httpx.Client] = None):
        self.base_url = base_url.rstrip('/')
        self.timeout_s = timeout_s
        self.client = client or httpx.Client(timeout=timeout_s)

    def assess(self, request: AssessRequest) -> AssessResponse:
        url = f"{self.base_url}/v1/assess"
        try:
            response = self.client.post(
                url, content=request.model_dump_json(),
                headers={'Content-Type': 'application/json'}, timeout=self.timeout_s,
            )
        except httpx.TimeoutException as e:
            logger.error(f"Frame {request.frame_id}: cloud timed out after {self.timeout_s}s")
            raise ServiceError(504, {'detail': 'cloud timed out', 'frame_id': request.frame_id}) from e
        except httpx.HTTPError as e:
            logger.error(f"Frame {request.frame_id}: cloud unreachable: {e}")
            raise ServiceError(502, {'detail': f"cloud unreachable: {e}", 'frame_id': request.frame_id}) from e

        if response.status_code != 200:
            try:
                detail = response.json()
            except ValueError:
                detail = {'detail': response.text}
            if not isinstance(detail, dict):
                detail = {'detail': str(detail)}
            detail.setdefault('frame_id', request.frame_id)
            raise ServiceError(response.status_code, detail)
        return AssessResponse.model_validate_json(response.content)

    def close(self) -> None:
        self.client.close()


class EdgeService:
    """Detection and obfuscation tier."""

    def __init__(
        self,
        detector: TextDetector,
        cloud: CloudLink,
        params: Optional[ObfuscationParams] = None,
        max_concurrency: int = 8,
        queue_timeout_s: float = 5.0,
    ):
        self.detector = detector
        self.cloud = cloud
        self.params = params or ObfuscationParams()
        self.gate = ConcurrencyGate(max_concurrency, queue_timeout_s)

    def prepare(self, envelope: FrameEnvelope) -> AssessRequest:
        """Decode, detect and obfuscate one frame into the request sent to the cloud."""
        frame_id = envelope.frame_id
        data = decode_image(envelope.image_data, frame_id)
        try:
            image = decompress(data, envelope.format)
        except DecodeError as e:
            raise ServiceError(400, {'detail': f"cannot decode frame: {e}", 'frame_id': frame_id}) from e

        try:
            boxes = self.detector.detect(image, frame_id).boxes
        except PrivARError as e:
            logger.error(f"Frame {frame_id}: text detection failed: {e}")
            raise ServiceError(500, {'detail': f"text detection failed: {e}", 'frame_id': frame_id}) from e

        params = replace(self.params, seed=frame_seed(frame_id))
        protected, mask = protect_frame(image, boxes, params, envelope.quality)
        logger.debug(
            f"Frame {frame_id}: {len(boxes)} regions, mask {mask.fraction:.3f}, {len(protected)} bytes"
        )
        return AssessRequest(
            frame_id=frame_id,
            obfuscated_image=encode_image(protected),
            format='jpeg',
            boxes=[BoxModel.from_box(box) for box in boxes],
            obfuscation_applied=True,
            params_echo=ParamsEcho(**params.echo()),
        )

    def handle_frame(self, envelope: FrameEnvelope) -> AssessResponse:
        """
        Protect one frame and return the cloud's assessment.

        Args:
            envelope: FrameEnvelope from the device

        Returns:
            AssessResponse with edge and cloud processing times
        """
        with self.gate.slot(envelope.frame_id):
            started = time.perf_counter()
            request = self.prepare(envelope)
            edge_ms = (time.perf_counter() - started) * 1000

        response = self.cloud.assess(request)
        timings = dict(response.processing_ms)
        timings['edge'] = round(edge_ms, 3)
        logger.info(
            f"Frame {envelope.frame_id}: risk={response.assessment.risk} "
            f"edge={edge_ms:.1f} ms cloud={timings.get('cloud', 0.0):.1f} ms"
        )
        return response.model_copy(update={'processing_ms': timings})


def build_edge_service(settings: Settings, cloud: Optional[CloudLink] = None) -> EdgeService:
    """EdgeService from settings; the cloud link defaults to HTTP at services.cloud_addr."""
    pipeline = settings.pipeline
    params = ObfuscationParams(
        sigma=pipeline.sigma, beta=pipeline.beta, pad=pipeline.pad,
        field_sigma=pipeline.field_sigma,
    )
    if cloud is None:
        cloud = HttpCloudLink(settings.services.cloud_url, settings.services.cloud_timeout_s)
    return EdgeService(
        detector=create_detector(settings.detector.kind, settings.detector),
        cloud=cloud,
        params=params,
        max_concurrency=settings.services.max_concurrency,
        queue_timeout_s=settings.services.queue_timeout_s,
    )


def create_edge_app(service: EdgeService) -> FastAPI:
    """FastAPI app exposing the edge tier."""
    app = FastAPI(
        title="PrivAR Edge",
        description="Text detection and obfuscation before cloud assessment",
        version=__version__,
    )
    add_error_handlers(app)
    app.state.service = service

    @app.get("/v1/health", response_model=HealthResponse)
    async def health():
        return HealthResponse(tier='edge', version=__version__)

    @app.post("/v1/frames", response_model=AssessResponse)
    async def submit_frame(envelope: FrameEnvelope):
        return await run_in_threadpool(service.handle_frame, envelope)

    return app
