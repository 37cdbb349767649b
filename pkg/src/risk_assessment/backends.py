"""
PrivAR Privacy Pipeline
VLM Backends Module

Backends answer one stage prompt at a time. The mock backend replays a
scenario table keyed by image content hash; the remote backend speaks an
OpenAI-compatible chat-completions API.

Author: PrivAR Team
License: MIT
"""

import base64
import hashlib
import json
import logging
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Protocol, Sequence, Union

import httpx

from src.common.exceptions import (
    BackendError,
    BackendTransportError,
    ConfigurationError,
    DecodeError,
    ScenarioMissingError,
)
from src.imaging.codec import decompress
from src.imaging.image import image_fingerprint
from .prompts import CotStagePrompt, Stage

logger = logging.getLogger(__name__)


class VLMBackend(Protocol):
    backend_id: str

    def complete(self, prompt: CotStagePrompt) -> str:
        ...


@dataclass(frozen=True)
class MockScenario:
    """Staged responses for one image."""
    fingerprint: str
    scene: str
    topic: str
    risk: bool
    rationales: Mapping[str, str] = field(default_factory=dict)
    caption: Optional[str] = None
    caption_risk: Optional[bool] = None
    sensitive_items: Sequence[str] = ()

    def rationale(self, stage: str) -> str:
        return self.rationales.get(stage) or f"{stage} inferred from the visible scene"

    def to_dict(self) -> Dict[str, Any]:
        record: Dict[str, Any] = {
            'fingerprint': self.fingerprint,
            'scene': self.scene,
            'topic': self.topic,
            'risk': self.risk,
            'rationales': dict(self.rationales),
        }
        if self.caption is not None:
            record['caption'] = self.caption
        if self.caption_risk is not None:
            record['caption_risk'] = self.caption_risk
        record['sensitive_items'] = list(self.sensitive_items)
        return record

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'MockScenario':
        try:
            return cls(
                fingerprint=str(data['fingerprint']),
                scene=str(data['scene']),
                topic=str(data['topic']),
                risk=bool(data['risk']),
                rationales=dict(data.get('rationales') or {}),
                caption=data.get('caption'),
                caption_risk=data.get('caption_risk'),
                sensitive_items=tuple(data.get('sensitive_items') or ()),
            )
        except (KeyError, TypeError) as e:
            raise ConfigurationError(f"malformed mock scenario {data!r}: {e}") from e


class ScenarioTable:
    """Immutable fingerprint -> scenario table."""

    def __init__(self, scenarios: Sequence[MockScenario]):
        self._scenarios: Dict[str, MockScenario] = {}
        for scenario in scenarios:
            if scenario.fingerprint in self._scenarios:
                raise ConfigurationError(
                    f"duplicate fingerprint {scenario.fingerprint} in scenario table"
                )
            self._scenarios[scenario.fingerprint] = scenario

        # Caption text -> verdict, for the text-only caption classifier
        self._caption_verdicts: Dict[str, bool] = {}
        for scenario in scenarios:
            if scenario.caption is None:
                continue
            verdict = scenario.risk if scenario.caption_risk is None else scenario.caption_risk
            known = self._caption_verdicts.get(scenario.caption)
            if known is not None and known != verdict:
                raise ConfigurationError(
                    f"caption '{scenario.caption}' maps to conflicting verdicts"
                )
            self._caption_verdicts[scenario.caption] = verdict

    def __len__(self) -> int:
        return len(self._scenarios)

    def __contains__(self, fingerprint: str) -> bool:
        return fingerprint in self._scenarios

    def get(self, fingerprint: str) -> MockScenario:
        scenario = self._scenarios.get(fingerprint)
        if scenario is None:
            raise ScenarioMissingError(fingerprint)
        return scenario

    def caption_verdict(self, caption: str) -> bool:
        if caption not in self._caption_verdicts:
            key = hashlib.sha256(caption.encode('utf-8')).hexdigest()
            raise ScenarioMissingError(f"caption:{key}")
        return self._caption_verdicts[caption]

    def scenarios(self) -> List[MockScenario]:
        return list(self._scenarios.values())

    @classmethod
    def load(cls, path: Union[str, Path]) -> 'ScenarioTable':
        """Read a UTF-8 JSON array of scenario records."""
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError(f"cannot read scenario table {path}: {e}") from e
        if not isinstance(data, list):
            raise ConfigurationError(f"scenario table {path} must be a JSON array")
        table = cls([MockScenario.from_dict(record) for record in data])
        logger.info(f"Loaded {len(table)} mock scenarios from {path}")
        return table

    def save(self, path: Union[str, Path]) -> None:
        records = sorted((s.to_dict() for s in self._scenarios.values()),
                         key=lambda r: r['fingerprint'])
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(records, f, indent=2, ensure_ascii=False)
            f.write('\n')


def mock_lookup(table: ScenarioTable, image_fingerprint: str) -> MockScenario:
    """Exact-match scenario lookup; a miss raises ScenarioMissingError."""
    return table.get(image_fingerprint)


@lru_cache(maxsize=256)
def _fingerprint_encoded(data: bytes) -> str:
    return image_fingerprint(decompress(data))


class MockVLMBackend:
    """Deterministic backend replaying a scenario table."""

    def __init__(self, table: ScenarioTable, backend_id: str = 'mock'):
        self.table = table
        self.backend_id = backend_id

    def _scenario(self, prompt: CotStagePrompt) -> MockScenario:
        if prompt.attached_image is None:
            raise BackendError("mock stage requires an attached image", prompt.stage.value)
        try:
            fingerprint = _fingerprint_encoded(prompt.attached_image)
        except DecodeError as e:
            raise BackendError(f"mock backend cannot decode image: {e}", prompt.stage.value) from e
        return mock_lookup(self.table, fingerprint)

    def complete(self, prompt: CotStagePrompt) -> str:
        stage = prompt.stage
        if stage == Stage.CAPTION_VERDICT:
            caption = prompt.prior_stage_outputs[0] if prompt.prior_stage_outputs else ''
            verdict = self.table.caption_verdict(caption)
            if verdict:
                return "RISK: YES — the description mentions potentially private content"
            return "RISK: NO — nothing in the description suggests private content"

        scenario = self._scenario(prompt)
        if stage == Stage.SCENE:
            return f"SCENE: {scenario.scene} — {scenario.rationale('scene')}"
        if stage == Stage.TOPIC:
            return f"TOPIC: {scenario.topic} — {scenario.rationale('topic')}"
        if stage == Stage.RISK:
            token = 'YES' if scenario.risk else 'NO'
            return f"RISK: {token} — {scenario.rationale('risk')}"
        if stage == Stage.CAPTION:
            return scenario.caption or f"A photo taken in a {scenario.scene}."
        if stage == Stage.LEAKAGE:
            if not scenario.sensitive_items:
                return 'NONE'
            return '\n'.join(f"ITEM: {item}" for item in scenario.sensitive_items)
        raise BackendError(f"unsupported stage {stage}", stage.value)


class RemoteVLMBackend:
    """OpenAI-compatible chat-completions client with a max-in-flight cap."""

    def __init__(
        self,
        url: str,
        model: str,
        api_key: Optional[str] = None,
        timeout_s: float = 30.0,
        max_in_flight: int = 4,
        transcript_path: Optional[Union[str, Path]] = None,
        client: Optional[httpx.Client] = None,
    ):
        self.url = url
        self.model = model
        self.backend_id = f"remote:{model}"
        self.timeout_s = timeout_s
        headers = {'Authorization': f"Bearer {api_key}"} if api_key else {}
        self.client = client or httpx.Client(timeout=timeout_s, headers=headers)
        self._slots = threading.BoundedSemaphore(max_in_flight)
        self._transcript_lock = threading.Lock()
        self.transcript_path = Path(transcript_path) if transcript_path else None

    def _request_body(self, prompt: CotStagePrompt) -> Dict[str, Any]:
        content: List[Dict[str, Any]] = [{'type': 'text', 'text': prompt.instruction_text}]
        if prompt.attached_image is not None:
            encoded = base64.b64encode(prompt.attached_image).decode('ascii')
            mime = 'image/png' if prompt.attached_image[:8] == b'\x89PNG\r\n\x1a\n' else 'image/jpeg'
            content.append({
                'type': 'image_url',
                'image_url': {'url': f"data:{mime};base64,{encoded}"},
            })
        return {
            'model': self.model,
            'temperature': 0,
            'messages': [{'role': 'user', 'content': content}],
        }

    def _log_transcript(self, prompt: CotStagePrompt, response: str) -> None:
        if self.transcript_path is None:
            return
        record = {
            'model': self.model,
            'stage': prompt.stage.value,
            'prompt_version': prompt.version,
            'prompt': prompt.instruction_text,
            'response': response,
        }
        with self._transcript_lock:
            with open(self.transcript_path, 'a', encoding='utf-8') as f:
                f.write(json.dumps(record, ensure_ascii=False) + '\n')

    def complete(self, prompt: CotStagePrompt) -> str:
        stage = prompt.stage.value
        with self._slots:
            try:
                response = self.client.post(self.url, json=self._request_body(prompt))
            except httpx.TimeoutException as e:
                raise BackendTransportError(f"backend timed out after {self.timeout_s}s", stage) from e
            except httpx.HTTPError as e:
                raise BackendTransportError(f"backend unreachable: {e}", stage) from e

        if response.status_code >= 400:
            raise BackendTransportError(
                f"backend answered HTTP {response.status_code}", stage
            )
        try:
            text = response.json()['choices'][0]['message']['content']
        except (ValueError, KeyError, IndexError, TypeError) as e:
            raise BackendError(f"unexpected backend response: {e}", stage) from e
        if not isinstance(text, str):
            raise BackendError("backend response content is not text", stage)

        self._log_transcript(prompt, text)
        return text

    def close(self) -> None:
        self.client.close()


def create_backend(settings) -> VLMBackend:
    """
    Build the configured backend.

    Args:
        settings: BackendSettings section

    Returns:
        MockVLMBackend or RemoteVLMBackend
    """
    if settings.kind == 'mock':
        if not settings.scenario_table:
            raise ConfigurationError("mock backend requires a scenario table (PRIVAR_SCENARIO_TABLE)")
        return MockVLMBackend(ScenarioTable.load(settings.scenario_table))
    if settings.kind == 'remote':
        if not settings.vlm_url:
            raise ConfigurationError("remote backend requires PRIVAR_VLM_URL")
        return RemoteVLMBackend(
            url=settings.vlm_url,
            model=settings.vlm_model,
            api_key=settings.vlm_key,
            timeout_s=settings.timeout_s,
            max_in_flight=settings.max_in_flight,
            transcript_path=settings.transcript_path,
        )
    raise ConfigurationError(f"unknown backend kind '{settings.kind}'")
