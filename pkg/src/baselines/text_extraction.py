"""
PrivAR Privacy Pipeline
Text Extraction Module

OCR sources for the rule-based baseline and the CER evaluation: ground-truth
transcripts from the manifest, or recorded OCR output keyed by image hash.

Author: PrivAR Team
License: MIT
"""

import logging
from pathlib import Path
from typing import TYPE_CHECKING, Dict, List, Optional, Protocol, Tuple, Union

import pandas as pd

from src.common.exceptions import SourceMissingError
from src.imaging.image import Image, image_fingerprint

if TYPE_CHECKING:
    from src.evaluation.manifest import DatasetItem

logger = logging.getLogger(__name__)

OCR_COLUMNS = ['fingerprint', 'x', 'y', 'w', 'h', 'text']


class OcrSource(Protocol):
    kind: str

    def read(self, image: Optional[Image], item: Optional['DatasetItem'] = None) -> str:
        ...


class TranscriptOcrSource:
    """Perfect OCR: the item's transcript, else its annotated region texts."""

    kind = 'transcript'

    def read(self, image: Optional[Image], item: Optional['DatasetItem'] = None) -> str:
        if item is None:
            raise SourceMissingError("transcript source requires a dataset item")
        if item.transcript is not None:
            return item.transcript
        regions = item.region_texts()
        if regions:
            return '\n'.join(regions)
        raise SourceMissingError(f"item '{item.id}' has no transcript")


class RecordedOcrSource:
    """Replays OCR output recorded per image content hash."""

    kind = 'external-file'

    def __init__(self, records: Dict[str, List[Tuple[int, int, str]]], provenance: str = 'sidecar'):
        self.records = records
        self.provenance = provenance

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> 'RecordedOcrSource':
        """
        Load an OCR sidecar.

        Args:
            path: CSV with header fingerprint,x,y,w,h,text; a row with empty
                text records that OCR found nothing

        Returns:
            RecordedOcrSource
        """
        try:
            frame = pd.read_csv(path, dtype={'fingerprint': str, 'text': str}, keep_default_na=False)
        except FileNotFoundError as e:
            raise SourceMissingError(f"OCR sidecar not found: {path}") from e
        except (OSError, pd.errors.ParserError) as e:
            raise SourceMissingError(f"cannot read OCR sidecar {path}: {e}") from e
        missing = [c for c in OCR_COLUMNS if c not in frame.columns]
        if missing:
            raise SourceMissingError(f"OCR sidecar {path} lacks columns {missing}")

        records: Dict[str, List[Tuple[int, int, str]]] = {}
        for row in frame.itertuples(index=False):
            records.setdefault(row.fingerprint, []).append((int(row.y), int(row.x), row.text))
        logger.info(f"Loaded recorded OCR for {len(records)} images from {path}")
        return cls(records, str(path))

    def read_fingerprint(self, fingerprint: str) -> str:
        if fingerprint not in self.records:
            raise SourceMissingError(f"no recorded OCR for image {fingerprint}")
        regions = sorted(self.records[fingerprint], key=lambda r: (r[0], r[1]))
        return '\n'.join(text for _, _, text in regions if text)

    def read(self, image: Optional[Image], item: Optional['DatasetItem'] = None) -> str:
        if image is None:
            raise SourceMissingError("recorded OCR source requires the image")
        return self.read_fingerprint(image_fingerprint(image))


def extract_text(
    image: Optional[Image],
    ocr_source: OcrSource,
    item: Optional['DatasetItem'] = None,
) -> str:
    """
    Text of all regions in reading order (top to bottom, then left to right).

    Args:
        image: Decoded frame the OCR would see
        ocr_source: Transcript or recorded OCR source
        item: Dataset item, required by the transcript source

    Returns:
        Extracted text, regions separated by newlines
    """
    return ocr_source.read(image, item)
