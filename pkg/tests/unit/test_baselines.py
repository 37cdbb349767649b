"""PrivAR Privacy Pipeline

Baselines Test Suite

Rule-based pattern matching, OCR sources, recorded object recognition and
caption-then-classify.

Author: PrivAR Team
License: MIT"""

import json
import unittest
from pathlib import Path
from types import SimpleNamespace

import numpy as np
import pytest

from src.baselines import (
    SENSITIVE_CLASSES,
    ObjectRecognitionClassifier,
    PatternRule,
    RecordedDetection,
    RecordedOcrSource,
    RuleBasedClassifier,
    SceneCaptioningClassifier,
    TranscriptOcrSource,
    caption_then_classify,
    extract_text,
    load_recorded_detections,
    load_rules,
    luhn_valid,
    object_recognition_classify,
    rule_based_classify,
)
from src.common.exceptions import BackendError, ConfigurationError, ParameterError, SourceMissingError
from src.evaluation.manifest import Annotation, DatasetItem
from src.imaging import BoundingBox, Image, compress, decompress, encode_png, image_fingerprint
from src.risk_assessment import MockScenario, MockVLMBackend, ScenarioTable


def make_item(transcript=None, annotations=None, item_id='i-1'):
    return DatasetItem(
        id=item_id, image_path=Path('i.png'), label='sensitive', scene='office',
        width=64, height=32, fingerprint='0' * 64, annotations=annotations, transcript=transcript,
    )


class TestRuleBased(unittest.TestCase):
    def setUp(self):
        self.rules = load_rules()

    def test_shipped_rule_order(self):
        self.assertEqual([r.name for r in self.rules], ['credit-card', 'id-number', 'phone-number'])

    def test_luhn(self):
        self.assertTrue(luhn_valid('4111 1111 1111 1111'))
        self.assertFalse(luhn_valid('4111 1111 1111 1112'))
        self.assertFalse(luhn_valid('7'))

    def test_card_number_claims_span_before_phone_rule(self):
        risk, matches = rule_based_classify('pay with 4111 1111 1111 1111 today', self.rules)
        self.assertTrue(risk)
        self.assertEqual(matches, [('credit-card', '4111 1111 1111 1111')])

    def test_invalid_checksum_is_not_a_card(self):
        risk, matches = rule_based_classify('4111 1111 1111 1112', self.rules)
        self.assertFalse(risk)
        self.assertEqual(matches, [])

    def test_identity_numbers(self):
        self.assertEqual(rule_based_classify('ID: 123-45-6789', self.rules)[1][0][0], 'id-number')
        self.assertEqual(rule_based_classify('SSN 123-45-6789', self.rules)[1][0][0], 'id-number')

    def test_phone_number(self):
        risk, matches = rule_based_classify('call +1 555 123 4567 after six', self.rules)
        self.assertTrue(risk)
        self.assertEqual(matches[0][0], 'phone-number')

    def test_prose_passwords_are_missed(self):
        for text in ('PASSWORD HUNTER', 'WIFI KEY GREENFROG', 'DIAGNOSIS ASTHMA', ''):
            self.assertEqual(rule_based_classify(text, self.rules), (False, []))

    def test_bad_rules(self):
        with self.assertRaises(ConfigurationError):
            PatternRule('broken', '(unclosed')
        with self.assertRaises(ConfigurationError):
            PatternRule('x', r'\d+', 'crc32')


def test_duplicate_rule_names(tmp_path):
    path = tmp_path / 'rules.json'
    path.write_text(json.dumps([
        {'name': 'a', 'pattern': 'x'},
        {'name': 'a', 'pattern': 'y'},
    ]))
    with pytest.raises(ConfigurationError):
        load_rules(path)


def test_default_rules_follow_config_dir(tmp_path, monkeypatch):
    (tmp_path / 'pattern_rules.json').write_text(json.dumps([{'name': 'badge', 'pattern': r'BADGE-\d{4}'}]))
    monkeypatch.setenv('PRIVAR_CONFIG_DIR', str(tmp_path))
    assert [rule.name for rule in load_rules()] == ['badge']


def test_rule_based_classifier_reads_transcript():
    classifier = RuleBasedClassifier(TranscriptOcrSource())
    frame = compress(Image(np.full((32, 64), 200, dtype=np.uint8)), 75)
    card = SimpleNamespace(item=make_item('CARD 4111 1111 1111 1111'), original_bytes=frame)
    note = SimpleNamespace(item=make_item('PASSWORD HUNTER'), original_bytes=frame)
    assert classifier.classify(card) is True
    assert classifier.classify(note) is False


class TestOcrSources(unittest.TestCase):
    def test_transcript_preferred(self):
        item = make_item('LINE ONE\nLINE TWO', (Annotation(BoundingBox(0, 0, 5, 5), 'IGNORED'),))
        self.assertEqual(extract_text(None, TranscriptOcrSource(), item), 'LINE ONE\nLINE TWO')

    def test_region_texts_in_reading_order(self):
        item = make_item(annotations=(
            Annotation(BoundingBox(0, 20, 5, 5), 'SECOND'),
            Annotation(BoundingBox(30, 2, 5, 5), 'FIRST'),
        ))
        self.assertEqual(extract_text(None, TranscriptOcrSource(), item), 'FIRST\nSECOND')

    def test_transcript_missing(self):
        with self.assertRaises(SourceMissingError):
            TranscriptOcrSource().read(None, make_item())
        with self.assertRaises(SourceMissingError):
            TranscriptOcrSource().read(None, None)

    def test_recorded_source_keys_by_content(self):
        image = Image(np.full((8, 8), 10, dtype=np.uint8))
        fp = image_fingerprint(image)
        source = RecordedOcrSource({fp: [(9, 0, 'BOTTOM'), (1, 5, 'TOP'), (1, 40, '')]})
        self.assertEqual(source.read(image), 'TOP\nBOTTOM')
        with self.assertRaises(SourceMissingError):
            source.read(Image(np.zeros((8, 8), dtype=np.uint8)))


def test_recorded_ocr_sidecar(tmp_path):
    image = decompress(encode_png(Image(np.full((8, 8, 3), 50, dtype=np.uint8))))
    fp = image_fingerprint(image)
    path = tmp_path / 'ocr.csv'
    path.write_text(
        'fingerprint,x,y,w,h,text\n'
        f'{fp},10,30,5,5,LOWER\n'
        f'{fp},10,2,5,5,UPPER\n'
        'blank,0,0,0,0,\n'
    )
    source = RecordedOcrSource.from_file(path)
    assert source.read(image) == 'UPPER\nLOWER'
    assert source.read_fingerprint('blank') == ''
    with pytest.raises(SourceMissingError):
        RecordedOcrSource.from_file(tmp_path / 'absent.csv')


class TestObjectRecognition(unittest.TestCase):
    def detection(self, label, confidence):
        return RecordedDetection('f', label, confidence, BoundingBox(0, 0, 4, 4))

    def test_threshold_is_inclusive(self):
        self.assertTrue(object_recognition_classify([self.detection('laptop', 0.5)]))
        self.assertFalse(object_recognition_classify([self.detection('laptop', 0.49)]))

    def test_non_sensitive_classes_ignored(self):
        self.assertFalse(object_recognition_classify([self.detection('cup', 0.99)]))
        self.assertIn('document', SENSITIVE_CLASSES)

    def test_no_detections(self):
        self.assertFalse(object_recognition_classify([]))

    def test_validation(self):
        with self.assertRaises(ParameterError):
            self.detection('laptop', 1.5)
        with self.assertRaises(ParameterError):
            object_recognition_classify([], confidence_threshold=2)


def test_recorded_detections_classifier(tmp_path):
    path = tmp_path / 'objects.csv'
    path.write_text(
        'frame_id,class,confidence,x,y,w,h\n'
        'a,laptop,0.92,0,0,10,10\n'
        'b,document,0.30,0,0,10,10\n'
    )
    detections = load_recorded_detections(path)
    classifier = ObjectRecognitionClassifier(detections)
    assert classifier.classify(SimpleNamespace(item=make_item(item_id='a'))) is True
    assert classifier.classify(SimpleNamespace(item=make_item(item_id='b'))) is False
    assert classifier.classify(SimpleNamespace(item=make_item(item_id='c'))) is False
    strict = ObjectRecognitionClassifier(detections, confidence_threshold=0.95)
    assert strict.classify(SimpleNamespace(item=make_item(item_id='a'))) is False


class TestSceneCaptioning(unittest.TestCase):
    def setUp(self):
        self.image = compress(Image(np.full((16, 16, 3), 120, dtype=np.uint8)), 75)
        scenario = MockScenario(
            image_fingerprint(decompress(self.image)), 'bedroom', 'medical report', True,
            caption='A printed medical report lying on a bed.', caption_risk=True,
        )
        self.backend = MockVLMBackend(ScenarioTable([scenario]))

    def test_caption_verdict(self):
        self.assertTrue(caption_then_classify(self.image, self.backend))

    def test_classifier_uses_protected_bytes(self):
        classifier = SceneCaptioningClassifier(self.backend)
        sample = SimpleNamespace(item=make_item(), protected_bytes=self.image, original_bytes=b'')
        self.assertTrue(classifier.classify(sample))

    def test_unparseable_verdict_names_stage(self):
        class Evasive:
            backend_id = 'evasive'

            def complete(self, prompt):
                return 'It is hard to say.'

        with self.assertRaises(BackendError) as ctx:
            caption_then_classify(self.image, self.backend, Evasive())
        self.assertEqual(ctx.exception.stage, 'caption-verdict')
