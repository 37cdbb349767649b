"""
PrivAR Privacy Pipeline
Warning Renderer Module

Draws the three warning modes onto frames and emits flashing warning
episodes as numbered PNG sequences.

Author: PrivAR Team
License: MIT
"""

import json
import logging
import math
from dataclasses import asdict, dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, List, Sequence, Union

import numpy as np

from src.common.exceptions import ContractError, ParameterError
from src.imaging.bitmap_font import render_text, text_size
from src.imaging.codec import save_png
from src.imaging.image import BoundingBox, Image
from src.risk_assessment.assessor import RiskAssessment

logger = logging.getLogger(__name__)

WARNING_TEXT = "PRIVACY WARNING!"
RED = (255, 0, 0)
WHITE = (255, 255, 255)
OUTLINE_PX = 3


class WarningMode(str, Enum):
    CENTER_SCREEN = 'center-screen'
    TOP_SCREEN = 'top-screen'
    REGION_OVERLAY = 'region-overlay'


@dataclass(frozen=True)
class FlashSchedule:
    """On/off flashing: on_s visible at the start of every cycle, for total_s."""
    cycle_s: float = 2.0
    on_s: float = 1.0
    total_s: float = 6.0

    def __post_init__(self) -> None:
        if self.cycle_s <= 0 or self.on_s <= 0 or self.total_s <= 0:
            raise ParameterError(f"schedule durations must be positive: {self}")
        if self.on_s > self.cycle_s:
            raise ParameterError(f"on_s {self.on_s} exceeds cycle_s {self.cycle_s}")
        cycles = self.total_s / self.cycle_s
        if abs(cycles - round(cycles)) > 1e-9:
            raise ParameterError(f"total_s {self.total_s} is not a multiple of cycle_s {self.cycle_s}")

    @classmethod
    def from_settings(cls, settings) -> 'FlashSchedule':
        return cls(cycle_s=settings.cycle_s, on_s=settings.on_s, total_s=settings.total_s)


def flash_visible(t: float, schedule: FlashSchedule = FlashSchedule()) -> bool:
    """True iff the warning is shown t seconds into an episode."""
    if t < 0 or not math.isfinite(t):
        raise ParameterError(f"t must be finite and non-negative, got {t}")
    return t < schedule.total_s and math.fmod(t, schedule.cycle_s) < schedule.on_s


def _text_scale(width: int, height: int) -> int:
    text_w, text_h = text_size(WARNING_TEXT)
    return max(1, min((width * 3 // 4) // text_w, (height // 4) // text_h))


def _banner_geometry(width: int, height: int):
    """Text scale, padding and text size shared by the two text modes."""
    scale = _text_scale(width, height)
    text_w, text_h = text_size(WARNING_TEXT, scale)
    return scale, 4 * scale, text_w, text_h


def _outline_bands(box: BoundingBox, thickness: int) -> List[BoundingBox]:
    if box.w <= 2 * thickness or box.h <= 2 * thickness:
        return [box]
    inner_h = box.h - 2 * thickness
    return [
        BoundingBox(box.x, box.y, box.w, thickness),
        BoundingBox(box.x, box.y2 - thickness, box.w, thickness),
        BoundingBox(box.x, box.y + thickness, thickness, inner_h),
        BoundingBox(box.x2 - thickness, box.y + thickness, thickness, inner_h),
    ]


def warning_geometry(
    mode: Union[WarningMode, str],
    width: int,
    height: int,
    regions: Sequence[BoundingBox] = (),
    outline_px: int = OUTLINE_PX,
) -> List[BoundingBox]:
    """
    Rectangles a warning mode may touch on a width x height frame.

    Region outlines are drawn inward, so they never leave their boxes.
    """
    mode = WarningMode(mode)
    if mode is WarningMode.REGION_OVERLAY:
        bands: List[BoundingBox] = []
        for region in regions:
            clipped = BoundingBox.clamped(region.x, region.y, region.w, region.h, width, height)
            if clipped is not None:
                bands.extend(_outline_bands(clipped, outline_px))
        return bands

    _, pad, text_w, text_h = _banner_geometry(width, height)
    if mode is WarningMode.CENTER_SCREEN:
        box_w, box_h = text_w + 2 * pad, text_h + 2 * pad
        rect = BoundingBox.clamped(
            (width - box_w) // 2, (height - box_h) // 2, box_w, box_h, width, height
        )
    else:
        rect = BoundingBox.clamped(0, 0, width, text_h + 2 * pad, width, height)
    return [rect] if rect is not None else []


def render_warning(
    frame: Image,
    assessment: RiskAssessment,
    mode: Union[WarningMode, str],
    t: float,
    schedule: FlashSchedule = FlashSchedule(),
    outline_px: int = OUTLINE_PX,
) -> Image:
    """
    Draw the warning for a risky frame at time t into the episode.

    Args:
        frame: Frame to annotate (grayscale frames are promoted to RGB when drawn on)
        assessment: Assessment with risk=True
        mode: Warning mode
        t: Seconds since the episode started
        schedule: Flashing schedule

    Returns:
        Annotated frame, or the input itself during the off phase
    """
    if not assessment.risk:
        raise ContractError(f"frame {assessment.frame_id} carries no risk; nothing to warn about")
    mode = WarningMode(mode)
    if not flash_visible(t, schedule):
        return frame

    canvas = frame.to_rgb().pixels.copy()
    geometry = warning_geometry(mode, frame.width, frame.height, assessment.regions, outline_px)

    if mode is WarningMode.REGION_OVERLAY:
        for band in geometry:
            canvas[band.y:band.y2, band.x:band.x2] = RED
    elif geometry:
        rect = geometry[0]
        scale, _, text_w, text_h = _banner_geometry(frame.width, frame.height)
        text_x = rect.x + (rect.w - text_w) // 2
        text_y = rect.y + (rect.h - text_h) // 2
        if mode is WarningMode.CENTER_SCREEN:
            canvas[rect.y:rect.y2, rect.x:rect.x2] = RED
            render_text(canvas, WARNING_TEXT, text_x, text_y, WHITE, scale)
        else:
            # Glyphs are clipped to the band.
            band = canvas[rect.y:rect.y2, rect.x:rect.x2]
            render_text(band, WARNING_TEXT, text_x - rect.x, text_y - rect.y, RED, scale)
    return Image(canvas)


def render_sequence(
    frame: Image,
    assessment: RiskAssessment,
    mode: Union[WarningMode, str],
    out_dir: Union[str, Path],
    fps: float = 10.0,
    schedule: FlashSchedule = FlashSchedule(),
    outline_px: int = OUTLINE_PX,
) -> List[Path]:
    """
    Write one warning episode as frame_%04d.png plus frames.json.

    Returns:
        Paths of the written frames in order
    """
    if fps <= 0:
        raise ParameterError(f"fps must be positive, got {fps}")
    mode = WarningMode(mode)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    count = int(round(schedule.total_s * fps))
    paths: List[Path] = []
    entries: List[Dict[str, object]] = []
    for index in range(count):
        t = index / fps
        visible = flash_visible(t, schedule)
        rendered = render_warning(frame, assessment, mode, t, schedule, outline_px)
        path = out / f"frame_{index:04d}.png"
        save_png(rendered, path)
        paths.append(path)
        entries.append({'index': index, 'file': path.name, 't': round(t, 6), 'visible': visible})

    manifest = {
        'frame_id': assessment.frame_id,
        'mode': mode.value,
        'fps': fps,
        'schedule': asdict(schedule),
        'frames': entries,
    }
    with open(out / 'frames.json', 'w', encoding='utf-8') as f:
        json.dump(manifest, f, indent=2)
        f.write('\n')

    logger.info(f"Rendered {count} {mode.value} frames for {assessment.frame_id} into {out}")
    return paths
