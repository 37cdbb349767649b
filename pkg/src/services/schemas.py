"""
PrivAR Privacy Pipeline
Service Schemas Module

Request/response models exchanged between device, edge and cloud.
Images travel base64-encoded inside JSON bodies.

Author: PrivAR Team
License: MIT
"""

import base64
import binascii
from datetime import datetime, timezone
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field

from src.common.exceptions import ServiceError
from src.imaging.image import BoundingBox
from src.risk_assessment.assessor import RiskAssessment


class BoxModel(BaseModel):
    x: int = Field(ge=0)
    y: int = Field(ge=0)
    w: int = Field(gt=0)
    h: int = Field(gt=0)

    def to_box(self) -> BoundingBox:
        return BoundingBox(self.x, self.y, self.w, self.h)

    @classmethod
    def from_box(cls, box: BoundingBox) -> 'BoxModel':
        return cls(x=box.x, y=box.y, w=box.w, h=box.h)


class FrameEnvelope(BaseModel):
    """Device -> edge."""
    frame_id: str = Field(min_length=1)
    captured_at: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))
    format: Literal['jpeg', 'png'] = 'jpeg'
    image_data: str
    quality: int = Field(75, ge=1, le=100)


class ParamsEcho(BaseModel):
    """Obfuscation parameters without the seed."""
    sigma: float = Field(ge=0)
    beta: float = Field(ge=0)
    pad: int = Field(ge=0)


class AssessRequest(BaseModel):
    """Edge -> cloud."""
    frame_id: str = Field(min_length=1)
    obfuscated_image: str
    format: Literal['jpeg', 'png'] = 'jpeg'
    boxes: List[BoxModel] = Field(default_factory=list)
    obfuscation_applied: bool
    params_echo: ParamsEcho


class RiskAssessmentModel(BaseModel):
    frame_id: str
    scene_label: str
    scene_rationale: str
    topic_inference: str
    topic_rationale: str = ''
    risk: bool
    risk_rationale: str
    regions: List[BoxModel] = Field(default_factory=list)
    backend_id: str

    @classmethod
    def from_assessment(cls, assessment: RiskAssessment) -> 'RiskAssessmentModel':
        return cls.model_validate(assessment.to_dict())

    def to_assessment(self) -> RiskAssessment:
        return RiskAssessment.from_dict(self.model_dump())


class AssessResponse(BaseModel):
    """Cloud -> edge -> device."""
    frame_id: str
    assessment: RiskAssessmentModel
    processing_ms: Dict[str, float] = Field(default_factory=dict)


class ErrorBody(BaseModel):
    detail: str
    frame_id: Optional[str] = None
    stage: Optional[str] = None


class HealthResponse(BaseModel):
    status: str = 'ok'
    tier: str
    version: str


def encode_image(data: bytes) -> str:
    return base64.b64encode(data).decode('ascii')


def decode_image(data: str, frame_id: Optional[str] = None) -> bytes:
    """Strict base64 decode; failures map to HTTP 400."""
    try:
        return base64.b64decode(data, validate=True)
    except (binascii.Error, ValueError) as e:
        raise ServiceError(400, {'detail': f"image is not valid base64: {e}", 'frame_id': frame_id}) from e
