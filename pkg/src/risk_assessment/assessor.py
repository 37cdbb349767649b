"""
PrivAR Privacy Pipeline
Risk Assessor Module

Runs the three chain-of-thought stages (scene description, text topic
inference, privacy risk decision) against a backend. Stages within one
frame run strictly in order; each output is threaded into the next prompt.

Author: PrivAR Team
License: MIT
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Sequence

from src.common.exceptions import BackendError
from src.imaging.image import BoundingBox
from .backends import VLMBackend
from .prompts import CotPromptBuilder, CotStagePrompt
from .verdict import parse_scene, parse_topic, parse_verdict

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RiskAssessment:
    """Outcome of the three-stage assessment of one frame."""
    frame_id: str
    scene_label: str
    scene_rationale: str
    topic_inference: str
    risk: bool
    risk_rationale: str
    regions: List[BoundingBox] = field(default_factory=list)
    backend_id: str = ''
    topic_rationale: str = ''

    def to_dict(self) -> Dict[str, Any]:
        return {
            'frame_id': self.frame_id,
            'scene_label': self.scene_label,
            'scene_rationale': self.scene_rationale,
            'topic_inference': self.topic_inference,
            'topic_rationale': self.topic_rationale,
            'risk': self.risk,
            'risk_rationale': self.risk_rationale,
            'regions': [box.to_dict() for box in self.regions],
            'backend_id': self.backend_id,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'RiskAssessment':
        return cls(
            frame_id=data['frame_id'],
            scene_label=data['scene_label'],
            scene_rationale=data['scene_rationale'],
            topic_inference=data['topic_inference'],
            topic_rationale=data.get('topic_rationale', ''),
            risk=bool(data['risk']),
            risk_rationale=data['risk_rationale'],
            regions=[BoundingBox.from_dict(box) for box in data.get('regions', [])],
            backend_id=data.get('backend_id', ''),
        )


def _run_stage(backend: VLMBackend, prompt: CotStagePrompt) -> str:
    try:
        output = backend.complete(prompt)
    except BackendError as e:
        if e.stage is None:
            e.stage = prompt.stage.value
        raise
    if not output or not output.strip():
        raise BackendError("backend returned an empty answer", prompt.stage.value)
    return output.strip()


def assess(
    obfuscated_image: bytes,
    boxes: Sequence[BoundingBox],
    backend: VLMBackend,
    frame_id: str = '',
) -> RiskAssessment:
    """
    Three-stage privacy risk assessment of an obfuscated frame.

    Args:
        obfuscated_image: Encoded frame whose text regions are already obfuscated
        boxes: The obfuscated regions, echoed into the result
        backend: VLM backend answering each stage
        frame_id: Identifier carried into the result

    Returns:
        RiskAssessment
    """
    started = time.perf_counter()
    builder = CotPromptBuilder(obfuscated_image, boxes)

    scene_output = _run_stage(backend, builder.scene())
    topic_output = _run_stage(backend, builder.topic(scene_output))
    risk_output = _run_stage(backend, builder.risk(scene_output, topic_output))

    try:
        risk, risk_rationale = parse_verdict(risk_output)
    except BackendError:
        logger.error(f"Frame {frame_id}: unparseable verdict from {backend.backend_id}")
        raise

    scene_label, scene_rationale = parse_scene(scene_output)
    topic, topic_rationale = parse_topic(topic_output)

    logger.info(
        f"Frame {frame_id}: scene={scene_label} risk={risk} regions={len(boxes)} "
        f"({(time.perf_counter() - started) * 1000:.1f} ms)"
    )
    return RiskAssessment(
        frame_id=frame_id,
        scene_label=scene_label or scene_output,
        scene_rationale=scene_rationale,
        topic_inference=topic or topic_output,
        topic_rationale=topic_rationale,
        risk=risk,
        risk_rationale=risk_rationale,
        regions=list(boxes),
        backend_id=backend.backend_id,
    )


class RiskAssessor:
    """Binds a backend so the cloud service can call assess per request."""

    def __init__(self, backend: VLMBackend):
        self.backend = backend

    def assess(self, obfuscated_image: bytes, boxes: Sequence[BoundingBox], frame_id: str = '') -> RiskAssessment:
        return assess(obfuscated_image, boxes, self.backend, frame_id)
