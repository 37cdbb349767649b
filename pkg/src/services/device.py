"""
PrivAR Privacy Pipeline
Device Client Module

Compresses a captured frame and submits it to the edge service. The device
never retries; transport failures surface to the caller.

Author: PrivAR Team
License: MIT
"""

import logging
import uuid
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Union

import httpx

from src.common.exceptions import ServiceError, TransportError
from src.imaging.codec import compress, load_image
from src.imaging.image import Image

from .schemas import AssessResponse, FrameEnvelope, encode_image

logger = logging.getLogger(__name__)


def new_frame_id(prefix: str = 'frame') -> str:
    """Session-unique frame id, e.g. 'desk-3f9c0a1b2d4e'."""
    return f"{prefix}-{uuid.uuid4().hex[:12]}"


def build_envelope(
    image: Image,
    frame_id: str,
    quality: int = 75,
    captured_at: Optional[datetime] = None,
) -> FrameEnvelope:
    """JPEG-compress a frame into the envelope sent to the edge."""
    return FrameEnvelope(
        frame_id=frame_id,
        captured_at=captured_at or datetime.now(timezone.utc),
        format='jpeg',
        image_data=encode_image(compress(image, quality)),
        quality=quality,
    )


def submit_envelope(
    envelope: FrameEnvelope,
    edge_url: str,
    client: Optional[httpx.Client] = None,
    timeout_s: float = 35.0,
) -> AssessResponse:
    """
    POST one envelope to the edge.

    Raises:
        TransportError: The edge could not be reached or timed out
        ServiceError: The edge answered with an error status
    """
    url = f"{edge_url.rstrip('/')}/v1/frames"
    owned = client is None
    client = client or httpx.Client(timeout=timeout_s)
    try:
        response = client.post(
            url, content=envelope.model_dump_json(),
            headers={'Content-Type': 'application/json'}, timeout=timeout_s,
        )
    except httpx.HTTPError as e:
        logger.error(f"Frame {envelope.frame_id}: edge at {edge_url} unreachable: {e}")
        raise TransportError(f"edge at {edge_url} unreachable: {e}") from e
    finally:
        if owned:
            client.close()

    if response.status_code != 200:
        try:
            detail = response.json()
        except ValueError:
            detail = {'detail': response.text}
        logger.warning(f"Frame {envelope.frame_id}: edge answered {response.status_code}")
        raise ServiceError(response.status_code, detail)
    return AssessResponse.model_validate_json(response.content)


def device_submit(
    image_path: Union[str, Path],
    edge_url: str,
    quality: int = 75,
    client: Optional[httpx.Client] = None,
    timeout_s: float = 35.0,
    frame_id: Optional[str] = None,
) -> AssessResponse:
    """
    Load an image from disk and submit it to the edge.

    Args:
        image_path: PNG or JPEG file
        edge_url: Edge base URL
        quality: JPEG quality for the uplink
        client: Optional httpx client (tests pass a TestClient)
        timeout_s: Request timeout
        frame_id: Explicit id for replays; a fresh unique id otherwise

    Returns:
        AssessResponse
    """
    path = Path(image_path)
    envelope = build_envelope(load_image(path), frame_id or new_frame_id(path.stem), quality)
    return submit_envelope(envelope, edge_url, client, timeout_s)
