"""
PrivAR Privacy Pipeline
Scene Captioning Baseline Module

Captions the obfuscated frame with the vision backend, then classifies the
caption text alone with a text-only backend.

Author: PrivAR Team
License: MIT
"""

import logging
from typing import Optional, Tuple

from src.common.exceptions import BackendError
from src.risk_assessment.backends import VLMBackend
from src.risk_assessment.prompts import caption_prompt, caption_verdict_prompt
from src.risk_assessment.verdict import parse_verdict

logger = logging.getLogger(__name__)


def caption_and_verdict(
    obfuscated_image: bytes,
    vlm_backend: VLMBackend,
    llm_backend: VLMBackend,
) -> Tuple[str, bool, str]:
    """(caption, risk, rationale) for one frame."""
    try:
        caption = vlm_backend.complete(caption_prompt(obfuscated_image)).strip()
    except BackendError as e:
        e.stage = e.stage or 'caption'
        raise
    if not caption:
        raise BackendError("empty caption", 'caption')
    try:
        risk, rationale = parse_verdict(llm_backend.complete(caption_verdict_prompt(caption)))
    except BackendError as e:
        e.stage = 'caption-verdict'
        raise
    return caption, risk, rationale


def caption_then_classify(
    obfuscated_image: bytes,
    vlm_backend: VLMBackend,
    llm_backend: Optional[VLMBackend] = None,
) -> bool:
    """
    Caption-based privacy risk decision.

    Args:
        obfuscated_image: Encoded protected frame
        vlm_backend: Backend producing the caption
        llm_backend: Text-only backend judging the caption (defaults to vlm_backend)

    Returns:
        Binary risk
    """
    _, risk, _ = caption_and_verdict(obfuscated_image, vlm_backend, llm_backend or vlm_backend)
    return risk


class SceneCaptioningClassifier:
    """Classifies the protected frame through its caption only."""

    name = 'scene-captioning'

    def __init__(self, vlm_backend: VLMBackend, llm_backend: Optional[VLMBackend] = None):
        self.vlm_backend = vlm_backend
        self.llm_backend = llm_backend or vlm_backend

    def classify(self, sample) -> bool:
        return caption_then_classify(sample.protected_bytes, self.vlm_backend, self.llm_backend)
