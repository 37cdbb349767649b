"""
PrivAR Privacy Pipeline
Synthetic Fixture Module

Generates the 12-frame mini dataset used for offline end-to-end runs:
rendered PNG frames, the manifest, a mock scenario table covering every
protection mode, recorded OCR, recorded object detections and recorded
text-detector boxes.

Scenario fingerprints are computed by running the same compression,
detection and obfuscation code the edge runs, so mock lookups hit for
every frame the pipeline can produce from these images.

Author: PrivAR Team
License: MIT
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from src.imaging.bitmap_font import render_text, text_size
from src.imaging.codec import compress, decompress, save_png
from src.imaging.image import BoundingBox, Image, ObfuscationParams, frame_seed, image_fingerprint
from src.imaging.obfuscation import protect_frame
from src.risk_assessment.backends import MockScenario, ScenarioTable
from src.text_detection.heuristic_detector import DetectorConfig, detect_heuristic
from .manifest import Annotation, DatasetItem, DatasetManifest, save_manifest

logger = logging.getLogger(__name__)

FRAME_WIDTH = 256
FRAME_HEIGHT = 176
TEXT_SCALE = 2
TEXT_COLOR = (24, 24, 32)

BACKGROUNDS = {
    'office': (214, 220, 228),
    'living-room': (226, 214, 196),
    'bedroom': (206, 212, 226),
    'café': (222, 206, 190),
}


@dataclass(frozen=True)
class FixtureSpec:
    """One synthetic frame and the responses a model would give for it."""
    id: str
    scene: str
    label: str
    lines: Tuple[str, ...]
    topic: str
    risk: bool
    caption: str
    caption_risk: bool
    sensitive_types: Tuple[str, ...] = ()
    sensitive_items: Tuple[str, ...] = ()
    leaked_items: Tuple[str, ...] = ()
    objects: Tuple[Tuple[str, float], ...] = ()
    rationale: str = ''


MINI_FIXTURE: Tuple[FixtureSpec, ...] = (
    FixtureSpec(
        'office-01', 'office', 'sensitive', ('PASSWORD HUNTER',),
        'password note', True,
        'An office desk with a monitor and a small sticky note on its edge.', False,
        ('password-note',), ('PASSWORD HUNTER',), (), (('laptop', 0.92),),
        'A note stuck to a monitor in an office commonly holds a login password.',
    ),
    FixtureSpec(
        'office-02', 'office', 'sensitive', ('4111 1111 1111 1111',),
        'payment card number', True,
        'A hand holding a payment card above an office desk.', True,
        ('credit-card',), ('4111 1111 1111 1111',), (), (('credit-card', 0.88),),
        'A payment card number can be used for fraud.',
    ),
    FixtureSpec(
        'office-03', 'office', 'non-sensitive', (),
        'no text', False,
        'An empty office wall.', False,
        rationale='Nothing in the frame carries private information.',
    ),
    FixtureSpec(
        'office-04', 'office', 'sensitive', ('Q3 BUDGET CUTS', 'LAYOFF LIST'),
        'meeting agenda', True,
        'A meeting room screen showing a presentation slide.', False,
        ('on-screen-text',), ('LAYOFF LIST',), (), (('laptop', 0.45),),
        'The scene is an office, and the text is a meeting agenda. Since meeting '
        'agendas can contain sensitive information, capturing this may constitute '
        'a privacy risk.',
    ),
    FixtureSpec(
        'living-01', 'living-room', 'sensitive', ('ID: 123-45-6789',),
        'identity card', True,
        'An identity card lying on a coffee table.', True,
        ('id-card',), ('ID: 123-45-6789',), (), (('id-card', 0.91),),
        'Identity numbers enable identity theft.',
    ),
    FixtureSpec(
        'living-02', 'living-room', 'non-sensitive', ('HOME SWEET HOME',),
        'decorative sign', False,
        'A decorative sign hanging on a living room wall.', False,
        objects=(('document', 0.30),),
        rationale='A decorative poster carries no private information.',
    ),
    FixtureSpec(
        'living-03', 'living-room', 'sensitive', ('WIFI KEY GREENFROG',),
        'wifi password label', True,
        'A router on a shelf next to a sofa.', False,
        ('password-note',), ('WIFI KEY GREENFROG',), ('WIFI KEY GREENFROG',), (),
        'A label next to a router usually carries the network password.',
    ),
    FixtureSpec(
        'bedroom-01', 'bedroom', 'sensitive', ('DIAGNOSIS ASTHMA',),
        'medical report', True,
        'A printed medical report lying on a bed.', True,
        ('medical-report',), ('DIAGNOSIS ASTHMA',), (), (('document', 0.77),),
        'Medical reports reveal health information.',
    ),
    FixtureSpec(
        'bedroom-02', 'bedroom', 'non-sensitive', (),
        'no text', False,
        'A plain bedroom wall.', False,
        rationale='Nothing in the frame carries private information.',
    ),
    FixtureSpec(
        'cafe-01', 'café', 'non-sensitive', ('PUBLISHED PAPER', 'ABSTRACT'),
        'academic transcript', True,
        'A printed document on a cafe table.', True,
        (), (), (), (('document', 0.81),),
        'A printed sheet with a header and columns resembles a grade transcript.',
    ),
    FixtureSpec(
        'cafe-02', 'café', 'sensitive', ('GRADE TRANSCRIPT', 'MATH A PHYS B'),
        'academic transcript', True,
        'A sheet of paper next to a coffee cup.', False,
        ('transcript',), ('MATH A PHYS B',), (), (),
        'Grade transcripts reveal personal academic records.',
    ),
    FixtureSpec(
        'cafe-03', 'café', 'non-sensitive', ('MENU COFFEE TEA',),
        'menu board', False,
        'A menu board above a cafe counter.', False,
        rationale='A public menu carries no private information.',
    ),
)


@dataclass
class MiniFixture:
    """Paths of a generated fixture."""
    root: Path
    manifest: Path
    scenarios: Path
    ocr: Path
    detections: Path
    text_boxes: Path
    images: Dict[str, Path] = field(default_factory=dict)


def layout_lines(lines: Sequence[str]) -> List[BoundingBox]:
    """Centered line rectangles for a frame."""
    if not lines:
        return []
    line_height = text_size('A', TEXT_SCALE)[1]
    gap = 26
    block = len(lines) * line_height + (len(lines) - 1) * gap
    top = (FRAME_HEIGHT - block) // 2
    boxes = []
    for i, line in enumerate(lines):
        width, height = text_size(line, TEXT_SCALE)
        boxes.append(BoundingBox((FRAME_WIDTH - width) // 2, top + i * (line_height + gap), width, height))
    return boxes


def render_frame(spec: FixtureSpec) -> Image:
    """Dark text lines on a uniform scene-colored background."""
    canvas = np.empty((FRAME_HEIGHT, FRAME_WIDTH, 3), dtype=np.uint8)
    canvas[:] = BACKGROUNDS[spec.scene]
    for line, box in zip(spec.lines, layout_lines(spec.lines)):
        render_text(canvas, line, box.x, box.y, TEXT_COLOR, TEXT_SCALE)
    return Image(canvas)


def _garble(text: str, seed_key: str, keep_initials: bool) -> str:
    """Recorded OCR reading of obfuscated text."""
    rng = np.random.default_rng(frame_seed(seed_key))
    alphabet = 'ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789'
    out = []
    for i, char in enumerate(text):
        if char == ' ':
            out.append(' ')
        elif keep_initials and (i == 0 or text[i - 1] == ' '):
            out.append(char)
        else:
            out.append(alphabet[int(rng.integers(len(alphabet)))])
    return ''.join(out)


def _scenario(spec: FixtureSpec, fingerprint: str, items: Sequence[str]) -> MockScenario:
    where = 'near the obfuscated region' if spec.lines else 'with no visible text'
    return MockScenario(
        fingerprint=fingerprint,
        scene=spec.scene,
        topic=spec.topic,
        risk=spec.risk,
        rationales={
            'scene': f"The user is experiencing AR in a {spec.scene} setting.",
            'topic': f"Given that the scene is a {spec.scene} and the layout {where}, "
                     f"the text is likely a {spec.topic}.",
            'risk': spec.rationale,
        },
        caption=spec.caption,
        caption_risk=spec.caption_risk,
        sensitive_items=tuple(items),
    )


def generate_mini_fixture(
    out_dir: Union[str, Path],
    quality: int = 75,
    params: Optional[ObfuscationParams] = None,
    detector_config: Optional[DetectorConfig] = None,
    specs: Sequence[FixtureSpec] = MINI_FIXTURE,
) -> MiniFixture:
    """
    Write the synthetic fixture.

    Args:
        out_dir: Target directory
        quality: Device and edge JPEG quality the scenarios are computed for
        params: Obfuscation strength (seed is derived per frame id)
        detector_config: Heuristic detector tuning used by the edge

    Returns:
        MiniFixture with the written paths
    """
    root = Path(out_dir)
    image_dir = root / 'images'
    image_dir.mkdir(parents=True, exist_ok=True)
    params = params or ObfuscationParams()
    detector_config = detector_config or DetectorConfig()

    items: List[DatasetItem] = []
    scenarios: Dict[str, MockScenario] = {}
    ocr_rows: List[dict] = []
    object_rows: List[dict] = []
    text_box_rows: List[dict] = []
    images: Dict[str, Path] = {}

    def register(scenario: MockScenario) -> None:
        scenarios.setdefault(scenario.fingerprint, scenario)

    def record_ocr(fingerprint: str, boxes: Sequence[BoundingBox], texts: Sequence[str]) -> None:
        if not boxes:
            ocr_rows.append({'fingerprint': fingerprint, 'x': 0, 'y': 0, 'w': 0, 'h': 0, 'text': ''})
        for box, text in zip(boxes, texts):
            ocr_rows.append(dict(box.to_dict(), fingerprint=fingerprint, text=text))

    for spec in specs:
        frame = render_frame(spec)
        path = image_dir / f"{spec.id}.png"
        save_png(frame, path)
        images[spec.id] = path
        gt_boxes = layout_lines(spec.lines)

        items.append(DatasetItem(
            id=spec.id,
            image_path=path,
            label=spec.label,
            scene=spec.scene,
            width=frame.width,
            height=frame.height,
            fingerprint=image_fingerprint(frame),
            sensitive_types=spec.sensitive_types,
            annotations=tuple(Annotation(b, t) for b, t in zip(gt_boxes, spec.lines)),
            transcript='\n'.join(spec.lines),
        ))

        # Device capture: what the edge decodes
        original = decompress(compress(frame, quality))
        original_fp = image_fingerprint(original)
        register(_scenario(spec, original_fp, spec.sensitive_items))
        record_ocr(original_fp, gt_boxes, spec.lines)

        seeded = ObfuscationParams(params.sigma, params.beta, params.pad, frame_seed(spec.id), params.field_sigma)
        detected = detect_heuristic(original, detector_config)
        for box in detected:
            text_box_rows.append(dict(box.to_dict(), frame_id=spec.id, confidence=0.99))

        for mode, boxes in (('privar', detected), ('oracle-guided', gt_boxes)):
            protected_bytes, _ = protect_frame(original, boxes, seeded, quality)
            protected_fp = image_fingerprint(decompress(protected_bytes))
            if protected_fp in scenarios:
                continue
            register(_scenario(spec, protected_fp, spec.leaked_items))
            garbled = [_garble(t, f"{spec.id}/{mode}", mode == 'oracle-guided') for t in spec.lines]
            record_ocr(protected_fp, gt_boxes, garbled)

        for label, confidence in spec.objects:
            object_rows.append({
                'frame_id': spec.id, 'class': label, 'confidence': confidence,
                'x': 16, 'y': 16, 'w': FRAME_WIDTH - 32, 'h': FRAME_HEIGHT - 32,
            })

    fixture = MiniFixture(
        root=root,
        manifest=root / 'manifest.json',
        scenarios=root / 'scenarios.json',
        ocr=root / 'ocr.csv',
        detections=root / 'objects.csv',
        text_boxes=root / 'text_boxes.csv',
        images=images,
    )
    save_manifest(DatasetManifest(items=items, root=root), fixture.manifest)
    ScenarioTable(list(scenarios.values())).save(fixture.scenarios)
    pd.DataFrame(ocr_rows, columns=['fingerprint', 'x', 'y', 'w', 'h', 'text']).to_csv(
        fixture.ocr, index=False, lineterminator='\n'
    )
    pd.DataFrame(object_rows, columns=['frame_id', 'class', 'confidence', 'x', 'y', 'w', 'h']).to_csv(
        fixture.detections, index=False, lineterminator='\n'
    )
    pd.DataFrame(text_box_rows, columns=['frame_id', 'x', 'y', 'w', 'h', 'confidence']).to_csv(
        fixture.text_boxes, index=False, lineterminator='\n'
    )
    logger.info(f"Wrote {len(items)}-frame fixture with {len(scenarios)} scenarios to {root}")
    return fixture
