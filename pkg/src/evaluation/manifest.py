"""
PrivAR Privacy Pipeline
Dataset Manifest Module

Loads and validates the evaluation manifest: one record per captured frame
with its ground-truth label, scene, annotated text regions and transcript.

Author: PrivAR Team
License: MIT
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from src.common.exceptions import DecodeError, ManifestError
from src.imaging.codec import load_image
from src.imaging.image import BoundingBox, image_fingerprint

logger = logging.getLogger(__name__)

MANIFEST_VERSION = 1

LABELS = ('sensitive', 'non-sensitive')
SCENES = ('office', 'living-room', 'bedroom', 'café')
SENSITIVE_TYPES = (
    'id-card',
    'credit-card',
    'password-note',
    'transcript',
    'medical-report',
    'on-screen-text',
)
SCENE_ALIASES = {'cafe': 'café', 'living room': 'living-room'}


class _AnnotationModel(BaseModel):
    x: int
    y: int
    w: int = Field(gt=0)
    h: int = Field(gt=0)
    text: Optional[str] = None


class _ItemModel(BaseModel):
    id: str = Field(min_length=1)
    image: str
    label: str
    scene: str
    sensitive_types: List[str] = Field(default_factory=list)
    annotations: Optional[List[_AnnotationModel]] = None
    transcript: Optional[str] = None
    fingerprint: Optional[str] = None
    width: Optional[int] = Field(None, gt=0)
    height: Optional[int] = Field(None, gt=0)

    @field_validator('label')
    @classmethod
    def _check_label(cls, value: str) -> str:
        if value not in LABELS:
            raise ValueError(f"label must be one of {LABELS}")
        return value

    @field_validator('scene')
    @classmethod
    def _check_scene(cls, value: str) -> str:
        value = SCENE_ALIASES.get(value, value)
        if value not in SCENES:
            raise ValueError(f"scene must be one of {SCENES}")
        return value

    @field_validator('sensitive_types')
    @classmethod
    def _check_types(cls, value: List[str]) -> List[str]:
        unknown = sorted(set(value) - set(SENSITIVE_TYPES))
        if unknown:
            raise ValueError(f"unknown sensitive types {unknown}")
        return value

    @model_validator(mode='after')
    def _check_consistency(self) -> '_ItemModel':
        if self.label == 'non-sensitive' and self.sensitive_types:
            raise ValueError('non-sensitive items cannot list sensitive types')
        return self


class _ManifestModel(BaseModel):
    version: int = MANIFEST_VERSION
    items: List[_ItemModel]


@dataclass(frozen=True)
class Annotation:
    """One annotated text region with its optional transcription."""
    box: BoundingBox
    text: Optional[str] = None


@dataclass(frozen=True)
class DatasetItem:
    """A captured frame with its ground truth."""
    id: str
    image_path: Path
    label: str
    scene: str
    width: int
    height: int
    fingerprint: str
    sensitive_types: Tuple[str, ...] = ()
    annotations: Optional[Tuple[Annotation, ...]] = None
    transcript: Optional[str] = None

    @property
    def is_sensitive(self) -> bool:
        return self.label == 'sensitive'

    @property
    def gt_boxes(self) -> List[BoundingBox]:
        if self.annotations is None:
            return []
        return [a.box for a in self.annotations]

    def region_texts(self) -> List[str]:
        """Annotated transcriptions in reading order."""
        if not self.annotations:
            return []
        ordered = sorted(self.annotations, key=lambda a: (a.box.y, a.box.x))
        return [a.text for a in ordered if a.text]


@dataclass
class DatasetManifest:
    """Validated manifest with item paths resolved against its directory."""
    items: List[DatasetItem]
    version: int = MANIFEST_VERSION
    root: Path = field(default_factory=Path.cwd)

    def by_id(self) -> Dict[str, DatasetItem]:
        return {item.id: item for item in self.items}

    @property
    def positives(self) -> int:
        return sum(1 for item in self.items if item.is_sensitive)


def _build_item(raw: _ItemModel, root: Path) -> DatasetItem:
    image_path = Path(raw.image)
    if not image_path.is_absolute():
        image_path = root / image_path

    width, height, fingerprint = raw.width, raw.height, raw.fingerprint
    if width is None or height is None or fingerprint is None:
        try:
            image = load_image(image_path)
        except (OSError, DecodeError) as e:
            raise ManifestError(f"item '{raw.id}': cannot read image {image_path}: {e}") from e
        width, height = image.width, image.height
        fingerprint = fingerprint or image_fingerprint(image)

    annotations = None
    if raw.annotations is not None:
        annotations = []
        for a in raw.annotations:
            box = BoundingBox.clamped(a.x, a.y, a.w, a.h, width, height)
            if box is None:
                logger.warning(f"Item '{raw.id}': annotation {a} lies outside the image, dropped")
                continue
            annotations.append(Annotation(box, a.text))
        annotations = tuple(annotations)

    return DatasetItem(
        id=raw.id,
        image_path=image_path,
        label=raw.label,
        scene=raw.scene,
        width=width,
        height=height,
        fingerprint=fingerprint,
        sensitive_types=tuple(raw.sensitive_types),
        annotations=annotations,
        transcript=raw.transcript,
    )


def parse_manifest(data: Any, root: Union[str, Path] = '.') -> DatasetManifest:
    """Validate an already-decoded manifest document."""
    try:
        model = _ManifestModel.model_validate(data)
    except ValidationError as e:
        raise ManifestError(f"invalid manifest: {e}") from e
    if model.version != MANIFEST_VERSION:
        raise ManifestError(f"unsupported manifest version {model.version}")

    seen = set()
    for raw in model.items:
        if raw.id in seen:
            raise ManifestError(f"duplicate item id '{raw.id}'")
        seen.add(raw.id)

    root = Path(root)
    items = [_build_item(raw, root) for raw in model.items]
    return DatasetManifest(items=items, version=model.version, root=root)


def load_manifest(path: Union[str, Path]) -> DatasetManifest:
    """
    Load a manifest file.

    Args:
        path: UTF-8 JSON file {version, items: [...]}; image paths are
            resolved relative to the file's directory

    Returns:
        DatasetManifest
    """
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except OSError as e:
        raise ManifestError(f"cannot read manifest {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ManifestError(f"manifest {path} is not valid JSON: {e}") from e
    manifest = parse_manifest(data, path.parent)
    logger.info(
        f"Loaded manifest {path}: {len(manifest.items)} items, "
        f"{manifest.positives} sensitive"
    )
    return manifest


def item_to_dict(item: DatasetItem, root: Optional[Path] = None) -> Dict[str, Any]:
    image = item.image_path
    if root is not None:
        try:
            image = image.relative_to(root)
        except ValueError:
            pass
    record: Dict[str, Any] = {
        'id': item.id,
        'image': image.as_posix(),
        'label': item.label,
        'scene': item.scene,
        'sensitive_types': list(item.sensitive_types),
        'width': item.width,
        'height': item.height,
        'fingerprint': item.fingerprint,
    }
    if item.annotations is not None:
        record['annotations'] = [
            dict(a.box.to_dict(), **({'text': a.text} if a.text is not None else {}))
            for a in item.annotations
        ]
    if item.transcript is not None:
        record['transcript'] = item.transcript
    return record


def save_manifest(manifest: DatasetManifest, path: Union[str, Path]) -> None:
    path = Path(path)
    document = {
        'version': manifest.version,
        'items': [item_to_dict(item, path.parent) for item in manifest.items],
    }
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(document, f, indent=2, ensure_ascii=False)
        f.write('\n')
