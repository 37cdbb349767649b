"""
PrivAR Privacy Pipeline
Exceptions Module

Exception hierarchy shared by the imaging core, detectors, backends,
evaluation harness and services.

Author: PrivAR Team
License: MIT
"""

from typing import Any, Iterable, Optional


class PrivARError(Exception):
    """Base class for every error raised by the pipeline."""


class ConfigurationError(PrivARError):
    """Invalid or unreadable configuration."""


class ImageDimensionError(PrivARError):
    """Image buffer does not describe a non-empty raster."""


class ParameterError(PrivARError):
    """Operation parameter outside its domain."""


class DecodeError(PrivARError):
    """Encoded raster could not be decoded."""

    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class ManifestError(PrivARError):
    """Dataset manifest is malformed."""


class AnnotationMissingError(PrivARError):
    """Dataset item carries no annotation records."""

    def __init__(self, item_id: str):
        super().__init__(f"item '{item_id}' has no annotation records")
        self.item_id = item_id


class SourceMissingError(PrivARError):
    """Transcript, sidecar or recorded output is missing."""


class ScenarioMissingError(PrivARError):
    """Mock backend has no scenario for an image fingerprint."""

    def __init__(self, fingerprint: str):
        super().__init__(f"no mock scenario for fingerprint {fingerprint}")
        self.fingerprint = fingerprint


class BackendError(PrivARError):
    """Failure while talking to a VLM/LLM backend."""

    def __init__(self, message: str, stage: Optional[str] = None):
        super().__init__(message)
        self.stage = stage


class BackendTransportError(BackendError):
    """Backend timed out, was unreachable or answered with an error status."""


class VerdictParseError(BackendError):
    """Final stage output lacks the machine-readable RISK token."""

    def __init__(self, raw_text: str, stage: Optional[str] = 'risk'):
        super().__init__(f"could not parse verdict from: {raw_text!r}", stage)
        self.raw_text = raw_text


class CoverageError(PrivARError):
    """Predictions and labels do not cover the same ids."""

    def __init__(self, missing: Iterable[str], extra: Iterable[str] = ()):
        self.missing = sorted(missing)
        self.extra = sorted(extra)
        super().__init__(
            f"prediction ids do not cover labels; missing={self.missing} "
            f"extra={self.extra}"
        )


class EmptyEvaluationError(PrivARError):
    """Metric requested over zero items."""


class UndefinedReferenceError(PrivARError):
    """CER requested against an empty reference string."""


class ContractError(PrivARError):
    """Caller violated an operation precondition."""


class TransportError(PrivARError):
    """Device could not reach the edge service."""


class ServiceError(PrivARError):
    """Request-level failure that maps to an HTTP status code."""

    def __init__(self, status_code: int, detail: Any):
        super().__init__(f"{status_code}: {detail}")
        self.status_code = status_code
        self.detail = detail
