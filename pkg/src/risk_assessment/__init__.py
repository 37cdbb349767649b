"""
PrivAR Privacy Pipeline
Risk Assessment

Cloud-side chain-of-thought privacy risk assessment over a pluggable
vision-language backend.

Author: PrivAR Team
License: MIT
"""

from .assessor import RiskAssessment, RiskAssessor, assess
from .backends import (
    MockScenario,
    MockVLMBackend,
    RemoteVLMBackend,
    ScenarioTable,
    VLMBackend,
    create_backend,
    mock_lookup,
)
from .prompts import (
    PROMPT_VERSION,
    CotPromptBuilder,
    CotStagePrompt,
    Stage,
    build_cot_prompts,
    caption_prompt,
    caption_verdict_prompt,
    leakage_prompt,
)
from .verdict import normalize_item, parse_leakage_items, parse_scene, parse_topic, parse_verdict

__all__ = [
    'RiskAssessment',
    'RiskAssessor',
    'assess',
    'VLMBackend',
    'MockScenario',
    'MockVLMBackend',
    'RemoteVLMBackend',
    'ScenarioTable',
    'create_backend',
    'mock_lookup',
    'PROMPT_VERSION',
    'Stage',
    'CotStagePrompt',
    'CotPromptBuilder',
    'build_cot_prompts',
    'caption_prompt',
    'caption_verdict_prompt',
    'leakage_prompt',
    'parse_verdict',
    'parse_scene',
    'parse_topic',
    'parse_leakage_items',
    'normalize_item',
]
