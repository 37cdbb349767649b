"""
PrivAR Privacy Pipeline
Services

Device client, edge service and cloud service.

Author: PrivAR Team
License: MIT
"""

from .cloud import CloudService, build_cloud_service, create_cloud_app
from .device import build_envelope, device_submit, new_frame_id, submit_envelope
from .edge import (
    EdgeService,
    HttpCloudLink,
    InProcessCloudLink,
    build_edge_service,
    create_edge_app,
)
from .runtime import ConcurrencyGate
from .schemas import (
    AssessRequest,
    AssessResponse,
    BoxModel,
    FrameEnvelope,
    ParamsEcho,
    RiskAssessmentModel,
    decode_image,
    encode_image,
)

__all__ = [
    'CloudService',
    'EdgeService',
    'InProcessCloudLink',
    'HttpCloudLink',
    'ConcurrencyGate',
    'build_cloud_service',
    'build_edge_service',
    'create_cloud_app',
    'create_edge_app',
    'build_envelope',
    'submit_envelope',
    'device_submit',
    'new_frame_id',
    'FrameEnvelope',
    'AssessRequest',
    'AssessResponse',
    'BoxModel',
    'ParamsEcho',
    'RiskAssessmentModel',
    'encode_image',
    'decode_image',
]
