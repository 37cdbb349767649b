"""
PrivAR Privacy Pipeline
Prompt Templates Module

Versioned prompt templates for the three-stage chain-of-thought assessment
and for the auxiliary captioning and leakage-extraction stages.

Author: PrivAR Team
License: MIT
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

from src.imaging.codec import probe_size
from src.imaging.image import BoundingBox

PROMPT_VERSION = 'cot-v1'


class Stage(str, Enum):
    """Backend call kinds."""
    SCENE = 'scene'
    TOPIC = 'topic'
    RISK = 'risk'
    CAPTION = 'caption'
    CAPTION_VERDICT = 'caption-verdict'
    LEAKAGE = 'leakage'


SCENE_TEMPLATE = (
    "You are assisting an augmented-reality privacy monitor. Text regions in "
    "this image have been deliberately blurred and warped.\n"
    "Step 1 of 3: classify the environment the AR user is in (for example "
    "office, living room, bedroom, cafe, kitchen) and describe the scene "
    "features that support your classification.\n"
    "Answer on one line in the form:\n"
    "SCENE: <environment> - <short description of the scene>"
)

TOPIC_TEMPLATE = (
    "You are assisting an augmented-reality privacy monitor. Text regions in "
    "this image have been deliberately blurred and warped so they cannot be read.\n"
    "Scene description from step 1:\n"
    "{scene_output}\n"
    "Obfuscated text regions (fractions of image width/height):\n"
    "{regions}\n"
    "Step 2 of 3: using the scene and the pixels around each obfuscated "
    "region (the surface it is on, nearby objects), infer the most likely "
    "topic of the hidden text.\n"
    "Answer on one line in the form:\n"
    "TOPIC: <likely topic> - <reasoning>"
)

RISK_TEMPLATE = (
    "You are assisting an augmented-reality privacy monitor.\n"
    "Scene description from step 1:\n"
    "{scene_output}\n"
    "Text topic inference from step 2:\n"
    "{topic_output}\n"
    "Step 3 of 3: combine the scene with the inferred text topic and decide "
    "whether capturing this frame may expose private information (passwords, "
    "identity or payment cards, transcripts, medical records, private "
    "messages or similar).\n"
    "Start your answer with exactly one of the tokens 'RISK: YES' or "
    "'RISK: NO', followed by ' - ' and a one-sentence rationale."
)

CAPTION_TEMPLATE = (
    "Describe this image in one detailed paragraph, covering the setting, "
    "the salient objects and anything written or displayed in it."
)

CAPTION_VERDICT_TEMPLATE = (
    "The following is a description of a photo taken by an augmented-reality "
    "headset:\n"
    "{caption}\n"
    "Decide whether the photo may expose private information (passwords, "
    "identity or payment cards, transcripts, medical records, private "
    "messages or similar).\n"
    "Start your answer with exactly one of the tokens 'RISK: YES' or "
    "'RISK: NO', followed by ' - ' and a one-sentence rationale."
)

LEAKAGE_TEMPLATE = (
    "List every piece of sensitive information you can read or identify in "
    "this image (passwords, card numbers, identity numbers, names with "
    "grades, diagnoses, private messages or similar). Write each item on its "
    "own line as 'ITEM: <content>'. If there is none, answer 'NONE'."
)

NO_REGIONS_CLAUSE = "(no text regions detected)"


@dataclass(frozen=True)
class CotStagePrompt:
    """One backend call: instruction, optional image and the outputs it builds on."""
    stage: Stage
    instruction_text: str
    attached_image: Optional[bytes] = None
    prior_stage_outputs: Tuple[str, ...] = ()
    version: str = PROMPT_VERSION


def region_descriptors(
    boxes: Sequence[BoundingBox], width: int, height: int
) -> List[str]:
    """Resolution-independent description of each box."""
    descriptors = []
    for i, box in enumerate(boxes, start=1):
        descriptors.append(
            f"region {i}: left={box.x / width:.2f}, top={box.y / height:.2f}, "
            f"width={box.w / width:.2f}, height={box.h / height:.2f}"
        )
    return descriptors


class CotPromptBuilder:
    """Builds the stage prompts for one obfuscated frame."""

    def __init__(
        self,
        image: bytes,
        boxes: Sequence[BoundingBox],
        width: Optional[int] = None,
        height: Optional[int] = None,
    ):
        if width is None or height is None:
            width, height = probe_size(image)
        self.image = image
        self.boxes = list(boxes)
        self.width = width
        self.height = height

    def regions_text(self) -> str:
        lines = region_descriptors(self.boxes, self.width, self.height)
        return '\n'.join(lines) if lines else NO_REGIONS_CLAUSE

    def scene(self) -> CotStagePrompt:
        return CotStagePrompt(Stage.SCENE, SCENE_TEMPLATE, self.image)

    def topic(self, scene_output: str) -> CotStagePrompt:
        text = TOPIC_TEMPLATE.format(scene_output=scene_output, regions=self.regions_text())
        return CotStagePrompt(Stage.TOPIC, text, self.image, (scene_output,))

    def risk(self, scene_output: str, topic_output: str) -> CotStagePrompt:
        text = RISK_TEMPLATE.format(scene_output=scene_output, topic_output=topic_output)
        return CotStagePrompt(Stage.RISK, text, self.image, (scene_output, topic_output))


def build_cot_prompts(
    obfuscated_image: bytes,
    boxes: Sequence[BoundingBox],
    scene_output: str = '',
    topic_output: str = '',
) -> Tuple[CotStagePrompt, CotStagePrompt, CotStagePrompt]:
    """
    All three stage prompts for a frame.

    Stage 2 and 3 embed earlier outputs, so a live run builds them one at a
    time through CotPromptBuilder; this helper takes the outputs up front.
    """
    builder = CotPromptBuilder(obfuscated_image, boxes)
    return (
        builder.scene(),
        builder.topic(scene_output),
        builder.risk(scene_output, topic_output),
    )


def caption_prompt(image: bytes) -> CotStagePrompt:
    return CotStagePrompt(Stage.CAPTION, CAPTION_TEMPLATE, image)


def caption_verdict_prompt(caption: str) -> CotStagePrompt:
    """Text-only classification of a caption."""
    return CotStagePrompt(
        Stage.CAPTION_VERDICT,
        CAPTION_VERDICT_TEMPLATE.format(caption=caption),
        None,
        (caption,),
    )


def leakage_prompt(image: bytes) -> CotStagePrompt:
    return CotStagePrompt(Stage.LEAKAGE, LEAKAGE_TEMPLATE, image)
