"""
PrivAR Privacy Pipeline
Evaluation

Dataset manifests, classification and privacy metrics, the evaluation
harness for the three protection modes, reports and the synthetic
mini-fixture generator.

Author: PrivAR Team
License: MIT
"""

from .harness import (
    Classifier,
    EvaluationConfig,
    EvaluationReport,
    EvaluationSample,
    ItemResult,
    PrivARClassifier,
    ProtectionMode,
    prepare_sample,
    run_evaluation,
)
from .manifest import Annotation, DatasetItem, DatasetManifest, load_manifest, parse_manifest, save_manifest
from .metrics import (
    DERIVED_NEGATIVES,
    DERIVED_POSITIVES,
    ClassificationMetrics,
    ConfusionCounts,
    LeakagePair,
    cer,
    classification_metrics,
    confusion,
    f1_score,
    levenshtein,
    mean_std,
    plr,
    search_confusion_matrices,
)
from .report import items_frame, summary_markdown, write_report
from .synthetic import MINI_FIXTURE, FixtureSpec, MiniFixture, generate_mini_fixture

__all__ = [
    'Annotation',
    'DatasetItem',
    'DatasetManifest',
    'load_manifest',
    'parse_manifest',
    'save_manifest',
    'ConfusionCounts',
    'ClassificationMetrics',
    'LeakagePair',
    'confusion',
    'classification_metrics',
    'f1_score',
    'levenshtein',
    'cer',
    'mean_std',
    'plr',
    'search_confusion_matrices',
    'DERIVED_POSITIVES',
    'DERIVED_NEGATIVES',
    'ProtectionMode',
    'EvaluationSample',
    'EvaluationConfig',
    'EvaluationReport',
    'ItemResult',
    'Classifier',
    'PrivARClassifier',
    'prepare_sample',
    'run_evaluation',
    'items_frame',
    'summary_markdown',
    'write_report',
    'FixtureSpec',
    'MiniFixture',
    'MINI_FIXTURE',
    'generate_mini_fixture',
]
