"""
PrivAR Privacy Pipeline
Verdict Parsing Module

Parsers for backend stage outputs. Only the final verdict is strict.

Author: PrivAR Team
License: MIT
"""

import re
from typing import List, Tuple

from src.common.exceptions import VerdictParseError

EMPTY_RATIONALE = 'no rationale given'

_SEPARATORS = ' \t*_—–-:.,;'
_VERDICT = re.compile(r'\W*RISK\s*:\s*(YES|NO)(?=[ \t*_]*(?:$|\n|[—–:.,;-]))(.*)', re.IGNORECASE | re.DOTALL)
_LABELED = r'^\W*{token}\s*:\s*(.*)'
_ITEM = re.compile(r'^\s*[-*]?\s*ITEM\s*:\s*(.+?)\s*$', re.IGNORECASE | re.MULTILINE)
_LABEL_SPLIT = re.compile(r'\s+[—–-]\s+')


def parse_verdict(raw_text: str) -> Tuple[bool, str]:
    """
    Extract the binary verdict from a risk-stage answer.

    Args:
        raw_text: Backend output; must start with 'RISK: YES|NO'

    Returns:
        (risk, rationale)
    """
    match = _VERDICT.match((raw_text or '').strip())
    if match is None:
        raise VerdictParseError(raw_text)
    risk = match.group(1).upper() == 'YES'
    rationale = match.group(2).strip().lstrip(_SEPARATORS).strip()
    return risk, rationale or EMPTY_RATIONALE


def _parse_labeled(raw_text: str, token: str) -> Tuple[str, str]:
    text = (raw_text or '').strip()
    match = re.search(_LABELED.format(token=token), text, re.IGNORECASE | re.MULTILINE | re.DOTALL)
    body = match.group(1).strip() if match else text
    parts = _LABEL_SPLIT.split(body, maxsplit=1)
    label = parts[0].strip().splitlines()[0].strip() if parts[0].strip() else ''
    rationale = parts[1].strip() if len(parts) > 1 else body
    return label, rationale or text


def parse_scene(raw_text: str) -> Tuple[str, str]:
    """(scene label, rationale); falls back to the first line as label."""
    return _parse_labeled(raw_text, 'SCENE')


def parse_topic(raw_text: str) -> Tuple[str, str]:
    return _parse_labeled(raw_text, 'TOPIC')


def normalize_item(item: str) -> str:
    """Case-fold and collapse whitespace."""
    return ' '.join(item.casefold().split())


def parse_leakage_items(raw_text: str) -> List[str]:
    """Normalized 'ITEM:' entries; 'NONE' or no entries yields []."""
    items = [normalize_item(m) for m in _ITEM.findall(raw_text or '')]
    return [item for item in items if item and item != 'none']
