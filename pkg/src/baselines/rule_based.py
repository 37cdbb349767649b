"""
PrivAR Privacy Pipeline
Rule-Based Baseline Module

Structured-pattern matching over extracted text: credit card numbers
(Luhn-checked), identity numbers and phone numbers.

Author: PrivAR Team
License: MIT
"""

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from src.common.config import default_rules_path
from src.common.exceptions import ConfigurationError
from src.imaging.codec import decompress
from .text_extraction import OcrSource, extract_text

logger = logging.getLogger(__name__)


def luhn_valid(number: str) -> bool:
    """Luhn checksum over the digits of number."""
    digits = [int(c) for c in number if c.isdigit()]
    if len(digits) < 2:
        return False
    total = 0
    for i, digit in enumerate(reversed(digits)):
        if i % 2 == 1:
            digit *= 2
            if digit > 9:
                digit -= 9
        total += digit
    return total % 10 == 0


def phone_digits_valid(number: str) -> bool:
    """7 to 15 digits, the E.164 range."""
    return 7 <= sum(c.isdigit() for c in number) <= 15


VALIDATORS: Dict[str, Callable[[str], bool]] = {
    'luhn': luhn_valid,
    'phone-digits': phone_digits_valid,
}


@dataclass(frozen=True)
class PatternRule:
    """Named regular expression with an optional checksum validator."""
    name: str
    pattern: str
    validator: Optional[str] = None
    regex: 're.Pattern[str]' = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        try:
            compiled = re.compile(self.pattern)
        except re.error as e:
            raise ConfigurationError(f"rule '{self.name}' does not compile: {e}") from e
        if self.validator is not None and self.validator not in VALIDATORS:
            raise ConfigurationError(f"rule '{self.name}' names unknown validator '{self.validator}'")
        object.__setattr__(self, 'regex', compiled)

    def accepts(self, span: str) -> bool:
        if self.validator is None:
            return True
        return VALIDATORS[self.validator](span)


def load_rules(path: Optional[Union[str, Path]] = None) -> List[PatternRule]:
    """
    Load a rule set.

    Args:
        path: UTF-8 JSON array of {name, pattern, validator}; the shipped
            config/pattern_rules.json when omitted

    Returns:
        Rules in file order
    """
    path = Path(path) if path else default_rules_path()
    try:
        with open(path, 'r', encoding='utf-8') as f:
            records = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigurationError(f"cannot read rule set {path}: {e}") from e

    try:
        rules = [PatternRule(r['name'], r['pattern'], r.get('validator')) for r in records]
    except (KeyError, TypeError, AttributeError) as e:
        raise ConfigurationError(f"malformed rule record in {path}: {e}") from e
    names = [rule.name for rule in rules]
    duplicates = sorted({n for n in names if names.count(n) > 1})
    if duplicates:
        raise ConfigurationError(f"duplicate rule names {duplicates} in {path}")
    return rules


def rule_based_classify(
    extracted_text: str, rules: Sequence[PatternRule]
) -> Tuple[bool, List[Tuple[str, str]]]:
    """
    Match structured sensitive patterns in text.

    Rules run in order and a match may not overlap characters already
    claimed by an earlier match.

    Args:
        extracted_text: OCR or transcript text
        rules: Compiled rule set

    Returns:
        (risk, [(rule name, matched span), ...])
    """
    claimed: List[Tuple[int, int]] = []
    matches: List[Tuple[str, str]] = []
    for rule in rules:
        for match in rule.regex.finditer(extracted_text):
            start, end = match.span()
            if any(start < c_end and c_start < end for c_start, c_end in claimed):
                continue
            span = match.group(0)
            if not rule.accepts(span):
                continue
            claimed.append((start, end))
            matches.append((rule.name, span))
    return bool(matches), matches


class RuleBasedClassifier:
    """Text extraction followed by pattern matching on the unprotected frame."""

    name = 'rule-based'

    def __init__(self, ocr_source: OcrSource, rules: Optional[Sequence[PatternRule]] = None):
        self.ocr_source = ocr_source
        self.rules = list(rules) if rules is not None else load_rules()

    def classify(self, sample) -> bool:
        image = decompress(sample.original_bytes)
        text = extract_text(image, self.ocr_source, sample.item)
        risk, matches = rule_based_classify(text, self.rules)
        if matches:
            logger.debug(f"Item {sample.item.id}: rule matches {[name for name, _ in matches]}")
        return risk
