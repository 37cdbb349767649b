"""
PrivAR Privacy Pipeline
Configuration Module

Loads the layered YAML configuration (default, environment, explicit file),
applies PRIVAR_* environment overrides and validates the result.

Author: PrivAR Team
License: MIT
"""

import copy
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Union

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, model_validator

from .exceptions import ConfigurationError

logger = logging.getLogger(__name__)

# Shipped layers next to the source tree; absent once the package is installed
CONFIG_DIR = Path(__file__).resolve().parents[2] / 'config'


def config_dir(environ: Optional[Mapping[str, str]] = None) -> Path:
    """PRIVAR_CONFIG_DIR, else the source tree's config/, else ./config."""
    environ = os.environ if environ is None else environ
    if environ.get('PRIVAR_CONFIG_DIR'):
        return Path(environ['PRIVAR_CONFIG_DIR'])
    if CONFIG_DIR.is_dir():
        return CONFIG_DIR
    return Path.cwd() / 'config'


def default_rules_path(environ: Optional[Mapping[str, str]] = None) -> Path:
    return config_dir(environ) / 'pattern_rules.json'

# Environment variable -> (section, key)
ENV_OVERRIDES = {
    'PRIVAR_EDGE_ADDR': ('services', 'edge_addr'),
    'PRIVAR_CLOUD_ADDR': ('services', 'cloud_addr'),
    'PRIVAR_SIGMA': ('pipeline', 'sigma'),
    'PRIVAR_BETA': ('pipeline', 'beta'),
    'PRIVAR_PAD': ('pipeline', 'pad'),
    'PRIVAR_QUALITY': ('pipeline', 'quality'),
    'PRIVAR_DETECTOR': ('detector', 'kind'),
    'PRIVAR_BACKEND': ('backend', 'kind'),
    'PRIVAR_VLM_URL': ('backend', 'vlm_url'),
    'PRIVAR_VLM_MODEL': ('backend', 'vlm_model'),
    'PRIVAR_VLM_KEY': ('backend', 'vlm_key'),
    'PRIVAR_SCENARIO_TABLE': ('backend', 'scenario_table'),
}


class PipelineSettings(BaseModel):
    """Capture and obfuscation parameters."""
    quality: int = Field(75, ge=1, le=100)
    sigma: float = Field(5.0, ge=0)
    beta: float = Field(40.0, ge=0)
    pad: int = Field(4, ge=0)
    field_sigma: float = Field(8.0, gt=0)


class DetectorSettings(BaseModel):
    """Text detector selection and heuristic tuning."""
    kind: Literal['heuristic', 'annotation', 'external'] = 'heuristic'
    min_area: int = Field(64, ge=1)
    max_area_fraction: float = Field(0.5, gt=0, le=1)
    min_aspect: float = Field(1.2, gt=0)
    max_aspect: float = Field(25.0, gt=0)
    binarization: Literal['otsu', 'fixed'] = 'otsu'
    threshold: int = Field(40, ge=0, le=255)
    merge_iou: float = Field(0.3, ge=0, le=1)
    line_gap: int = Field(25, ge=1)
    manifest_path: Optional[str] = None
    sidecar_path: Optional[str] = None

    @model_validator(mode='after')
    def _check_aspect(self) -> 'DetectorSettings':
        if self.min_aspect > self.max_aspect:
            raise ValueError('min_aspect must not exceed max_aspect')
        return self


class ServiceSettings(BaseModel):
    """Edge and cloud HTTP services."""
    edge_addr: str = '127.0.0.1:8700'
    cloud_addr: str = '127.0.0.1:8800'
    cloud_timeout_s: float = Field(30.0, gt=0)
    edge_timeout_s: float = Field(35.0, gt=0)
    max_concurrency: int = Field(8, ge=1)
    queue_timeout_s: float = Field(5.0, gt=0)

    @property
    def cloud_url(self) -> str:
        return _as_url(self.cloud_addr)

    @property
    def edge_url(self) -> str:
        return _as_url(self.edge_addr)


class BackendSettings(BaseModel):
    """VLM backend selection."""
    kind: Literal['mock', 'remote'] = 'mock'
    scenario_table: Optional[str] = None
    vlm_url: Optional[str] = None
    vlm_model: str = 'gpt-4o-mini'
    vlm_key: Optional[str] = Field(None, repr=False)
    timeout_s: float = Field(30.0, gt=0)
    max_in_flight: int = Field(4, ge=1)
    transcript_path: Optional[str] = None


class EvaluationSettings(BaseModel):
    """Evaluation harness defaults."""
    workers: int = Field(4, ge=1)
    sensitive_classes: List[str] = Field(
        default_factory=lambda: [
            'id-card', 'credit-card', 'laptop', 'cell-phone', 'document'
        ]
    )
    confidence_threshold: float = Field(0.5, ge=0, le=1)
    rules_path: Optional[str] = None


class WarningSettings(BaseModel):
    """Warning renderer and flashing schedule."""
    cycle_s: float = Field(2.0, gt=0)
    on_s: float = Field(1.0, gt=0)
    total_s: float = Field(6.0, gt=0)
    fps: float = Field(10.0, gt=0)
    outline_px: int = Field(3, ge=1)


class LoggingSettings(BaseModel):
    """Logging handlers and format."""
    level: str = 'INFO'
    format: str = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    json_format: bool = Field(False, alias='json')
    file: Optional[str] = None
    max_bytes: int = 10485760
    backup_count: int = 5

    model_config = {'populate_by_name': True}


class Settings(BaseModel):
    """Validated, merged configuration."""
    pipeline: PipelineSettings = Field(default_factory=PipelineSettings)
    detector: DetectorSettings = Field(default_factory=DetectorSettings)
    services: ServiceSettings = Field(default_factory=ServiceSettings)
    backend: BackendSettings = Field(default_factory=BackendSettings)
    evaluation: EvaluationSettings = Field(default_factory=EvaluationSettings)
    warnings: WarningSettings = Field(default_factory=WarningSettings)
    logging: LoggingSettings = Field(default_factory=LoggingSettings)


def _as_url(addr: str) -> str:
    if addr.startswith(('http://', 'https://')):
        return addr.rstrip('/')
    return f"http://{addr}"


def _deep_merge(base: Dict[str, Any], update: Mapping[str, Any]) -> Dict[str, Any]:
    """Recursively merge update into a copy of base."""
    merged = copy.deepcopy(base)
    for key, value in update.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _read_yaml(path: Path) -> Dict[str, Any]:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ConfigurationError(f"cannot read config {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigurationError(f"config {path} must be a mapping")
    return data


def load_settings(
    config_path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> Settings:
    """
    Build Settings from the configuration layers.

    Args:
        config_path: Explicit YAML file merged after default and environment files
        overrides: Section mapping merged last (CLI flags)
        environ: Environment to read PRIVAR_* variables from (defaults to os.environ)

    Returns:
        Validated Settings
    """
    if environ is None:
        load_dotenv()
        environ = os.environ

    raw: Dict[str, Any] = {}
    layers = config_dir(environ)
    default_file = layers / 'default.yml'
    if default_file.exists():
        raw = _read_yaml(default_file)

    env_name = environ.get('PRIVAR_ENV')
    if env_name:
        env_file = layers / f"{env_name}.yml"
        if env_file.exists():
            raw = _deep_merge(raw, _read_yaml(env_file))
        else:
            logger.warning(f"No config layer for PRIVAR_ENV={env_name}")

    explicit = config_path or environ.get('PRIVAR_CONFIG')
    if explicit:
        raw = _deep_merge(raw, _read_yaml(Path(explicit)))

    for var, (section, key) in ENV_OVERRIDES.items():
        if var in environ and environ[var] != '':
            raw.setdefault(section, {})[key] = environ[var]

    if overrides:
        raw = _deep_merge(raw, overrides)

    try:
        return Settings.model_validate(raw)
    except ValidationError as e:
        raise ConfigurationError(f"invalid configuration: {e}") from e
