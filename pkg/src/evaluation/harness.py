"""
PrivAR Privacy Pipeline
Evaluation Harness Module

Runs a classifier over every manifest item under one protection mode and
collects classification metrics, CER over recorded OCR and the privacy
leakage rate of the protected frames.

Author: PrivAR Team
License: MIT
"""

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import List, Optional, Protocol

from tqdm import tqdm

from src.baselines.text_extraction import OcrSource
from src.common.exceptions import EmptyEvaluationError, PrivARError, UndefinedReferenceError
from src.imaging.codec import compress, decompress, load_image
from src.imaging.image import BoundingBox, Image, ObfuscationParams, frame_seed
from src.imaging.obfuscation import protect_frame
from src.risk_assessment.assessor import assess
from src.risk_assessment.backends import VLMBackend
from src.risk_assessment.prompts import leakage_prompt
from src.risk_assessment.verdict import parse_leakage_items
from src.text_detection.sources import TextDetector, load_annotated_boxes
from .manifest import DatasetItem, DatasetManifest
from .metrics import (
    ClassificationMetrics,
    ConfusionCounts,
    LeakagePair,
    cer,
    classification_metrics,
    confusion,
    mean_std,
    plr,
)

logger = logging.getLogger(__name__)


class ProtectionMode(str, Enum):
    """Which boxes drive obfuscation before the frame leaves the edge."""
    PRIVAR = 'privar'
    ORACLE = 'oracle-guided'
    NONE = 'no-obfuscation'


@dataclass(frozen=True)
class EvaluationSample:
    """What a classifier sees for one item."""
    item: DatasetItem
    original_bytes: bytes
    protected_bytes: bytes
    boxes: List[BoundingBox]
    mask_fraction: float
    original_image: Image
    protected_image: Image


class Classifier(Protocol):
    name: str

    def classify(self, sample: EvaluationSample) -> bool:
        ...


class PrivARClassifier:
    """Three-stage chain-of-thought assessment of the protected frame."""

    name = 'privar'

    def __init__(self, backend: VLMBackend):
        self.backend = backend

    def classify(self, sample: EvaluationSample) -> bool:
        result = assess(sample.protected_bytes, sample.boxes, self.backend, sample.item.id)
        return result.risk


@dataclass
class EvaluationConfig:
    """Run parameters; seed is derived per item from its id."""
    params: ObfuscationParams = field(default_factory=ObfuscationParams)
    quality: int = 75
    workers: int = 4
    detector: Optional[TextDetector] = None
    cer_source: Optional[OcrSource] = None
    leakage_backend: Optional[VLMBackend] = None
    progress: bool = False


@dataclass
class ItemResult:
    """One report row."""
    id: str
    label: str
    scene: str
    predicted: Optional[bool] = None
    n_boxes: int = 0
    mask_fraction: float = 0.0
    cer: Optional[float] = None
    leakage: Optional[LeakagePair] = None
    error: Optional[str] = None

    @property
    def leak_counted(self) -> bool:
        """Only pairs whose original frame yields sensitive items count."""
        return self.leakage is not None and bool(self.leakage.items_from_original)

    @property
    def leaked(self) -> Optional[bool]:
        return self.leakage.leaks if self.leak_counted else None

    @property
    def correct(self) -> Optional[bool]:
        if self.predicted is None:
            return None
        return self.predicted == (self.label == 'sensitive')


@dataclass
class EvaluationReport:
    method: str
    mode: ProtectionMode
    rows: List[ItemResult]
    confusion: Optional[ConfusionCounts] = None
    metrics: Optional[ClassificationMetrics] = None
    cer_mean: Optional[float] = None
    cer_std: Optional[float] = None
    cer_count: int = 0
    plr: Optional[float] = None
    plr_pairs: int = 0
    cer_source: Optional[str] = None

    @property
    def errors(self) -> List[ItemResult]:
        return [row for row in self.rows if row.error is not None]


def prepare_sample(
    item: DatasetItem,
    mode: ProtectionMode,
    config: EvaluationConfig,
) -> EvaluationSample:
    """
    Device compression followed by the mode's edge processing.

    Args:
        item: Dataset item
        mode: Protection mode
        config: Run configuration (detector required for privar mode)

    Returns:
        EvaluationSample
    """
    original_bytes = compress(load_image(item.image_path), config.quality)
    original = decompress(original_bytes)

    if mode == ProtectionMode.NONE:
        return EvaluationSample(item, original_bytes, original_bytes, [], 0.0, original, original)

    if mode == ProtectionMode.ORACLE:
        boxes = load_annotated_boxes(item, original.width, original.height)
    else:
        if config.detector is None:
            raise PrivARError("privar mode requires a text detector")
        boxes = config.detector.detect(original, item.id).boxes

    params = replace(config.params, seed=frame_seed(item.id))
    protected_bytes, mask = protect_frame(original, boxes, params, config.quality)
    return EvaluationSample(
        item,
        original_bytes,
        protected_bytes,
        list(boxes),
        mask.fraction,
        original,
        decompress(protected_bytes),
    )


def _leakage_pair(sample: EvaluationSample, backend: VLMBackend) -> LeakagePair:
    original_items = parse_leakage_items(backend.complete(leakage_prompt(sample.original_bytes)))
    protected_items = parse_leakage_items(backend.complete(leakage_prompt(sample.protected_bytes)))
    return LeakagePair(sample.item.id, tuple(original_items), tuple(protected_items))


def _evaluate_item(
    item: DatasetItem,
    classifier: Classifier,
    mode: ProtectionMode,
    config: EvaluationConfig,
) -> ItemResult:
    row = ItemResult(id=item.id, label=item.label, scene=item.scene)
    try:
        sample = prepare_sample(item, mode, config)
        row.n_boxes = len(sample.boxes)
        row.mask_fraction = sample.mask_fraction
        row.predicted = bool(classifier.classify(sample))

        if config.cer_source is not None:
            reference = item.transcript if item.transcript is not None else '\n'.join(item.region_texts())
            hypothesis = config.cer_source.read(sample.protected_image, item)
            try:
                row.cer = cer(reference, hypothesis)
            except UndefinedReferenceError:
                row.cer = None

        if config.leakage_backend is not None:
            row.leakage = _leakage_pair(sample, config.leakage_backend)
    except Exception as e:
        logger.exception(f"Item {item.id} failed: {e}")
        row.error = f"{type(e).__name__}: {e}"
    return row


def _summarize(report: EvaluationReport) -> EvaluationReport:
    scored = [row for row in report.rows if row.predicted is not None and row.error is None]
    if scored:
        counts = confusion(
            {row.id: bool(row.predicted) for row in scored},
            {row.id: row.label == 'sensitive' for row in scored},
        )
        report.confusion = counts
        report.metrics = classification_metrics(counts)

    cer_values = [row.cer for row in report.rows if row.cer is not None]
    if cer_values:
        report.cer_mean, report.cer_std = mean_std(cer_values)
        report.cer_count = len(cer_values)

    pairs = [row.leakage for row in report.rows if row.leak_counted and row.error is None]
    if pairs:
        report.plr = plr(pairs)
        report.plr_pairs = len(pairs)
    return report


def run_evaluation(
    manifest: DatasetManifest,
    classifier: Classifier,
    protection_mode: ProtectionMode,
    config: Optional[EvaluationConfig] = None,
) -> EvaluationReport:
    """
    Evaluate a classifier over a manifest.

    Per-item failures are recorded on the row and never abort the run; rows
    are ordered by item id regardless of completion order.

    Args:
        manifest: Validated dataset manifest
        classifier: Object exposing classify(sample) -> bool
        protection_mode: privar, oracle-guided or no-obfuscation
        config: Run configuration

    Returns:
        EvaluationReport
    """
    config = config or EvaluationConfig()
    mode = ProtectionMode(protection_mode)
    if not manifest.items:
        raise EmptyEvaluationError("manifest has no items")

    rows: List[ItemResult] = []
    with ThreadPoolExecutor(max_workers=config.workers) as executor:
        futures = [
            executor.submit(_evaluate_item, item, classifier, mode, config)
            for item in manifest.items
        ]
        progress = tqdm(
            as_completed(futures),
            total=len(futures),
            desc=f"{classifier.name}/{mode.value}",
            disable=not config.progress,
        )
        for future in progress:
            rows.append(future.result())

    rows.sort(key=lambda row: row.id)
    report = EvaluationReport(
        method=classifier.name,
        mode=mode,
        rows=rows,
        cer_source=getattr(config.cer_source, 'kind', None),
    )
    _summarize(report)
    logger.info(
        f"Evaluated {len(rows)} items with {classifier.name} ({mode.value}): "
        f"{len(report.errors)} errors"
    )
    return report
