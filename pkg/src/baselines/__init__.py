"""
PrivAR Privacy Pipeline
Baselines

Comparison detectors: rule-based pattern matching, sensitive-object
recognition replay and scene captioning with text-only classification.
Each exposes classify(sample) -> bool for the evaluation harness.

Author: PrivAR Team
License: MIT
"""

from .object_recognition import (
    SENSITIVE_CLASSES,
    ObjectRecognitionClassifier,
    RecordedDetection,
    load_recorded_detections,
    object_recognition_classify,
)
from .rule_based import (
    PatternRule,
    RuleBasedClassifier,
    load_rules,
    luhn_valid,
    phone_digits_valid,
    rule_based_classify,
)
from .scene_captioning import SceneCaptioningClassifier, caption_and_verdict, caption_then_classify
from .text_extraction import OcrSource, RecordedOcrSource, TranscriptOcrSource, extract_text

__all__ = [
    'PatternRule',
    'load_rules',
    'luhn_valid',
    'phone_digits_valid',
    'rule_based_classify',
    'RuleBasedClassifier',
    'OcrSource',
    'TranscriptOcrSource',
    'RecordedOcrSource',
    'extract_text',
    'RecordedDetection',
    'SENSITIVE_CLASSES',
    'load_recorded_detections',
    'object_recognition_classify',
    'ObjectRecognitionClassifier',
    'caption_and_verdict',
    'caption_then_classify',
    'SceneCaptioningClassifier',
]
