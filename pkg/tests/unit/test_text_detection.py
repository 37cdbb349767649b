"""PrivAR Privacy Pipeline

Text Detection Test Suite

Box post-processing, the morphological detector and the three detection
sources.

Author: PrivAR Team
License: MIT"""

import itertools
import unittest
from pathlib import Path

import numpy as np
import pytest

from src.common.config import DetectorSettings
from src.common.exceptions import AnnotationMissingError, ConfigurationError, ParameterError, SourceMissingError
from src.evaluation.manifest import Annotation, DatasetItem
from src.imaging import BoundingBox, Image, compress, decompress, render_text, sort_boxes, text_size
from src.text_detection import (
    AnnotationDetector,
    DetectorConfig,
    ExternalFileDetector,
    HeuristicDetector,
    clamp_boxes,
    create_detector,
    detect_heuristic,
    iou,
    load_annotated_boxes,
    load_detection_sidecar,
    merge_boxes,
)


def frame_with_lines(lines, width=256, height=140, scale=2, top=20, gap=30):
    canvas = np.full((height, width, 3), 220, dtype=np.uint8)
    boxes = []
    for i, line in enumerate(lines):
        w, h = text_size(line, scale)
        x, y = (width - w) // 2, top + i * gap
        render_text(canvas, line, x, y, (15, 15, 15), scale)
        boxes.append(BoundingBox(x, y, w, h))
    return Image(canvas), boxes


def make_item(item_id='f-1', annotations=None):
    return DatasetItem(
        id=item_id, image_path=Path('x.png'), label='sensitive', scene='office',
        width=100, height=50, fingerprint='0' * 64, sensitive_types=('password-note',),
        annotations=annotations,
    )


def reference_merge(boxes, threshold):
    """Merge the first qualifying pair, then start over, until none is left."""
    for i, j in itertools.combinations(range(len(boxes)), 2):
        if iou(boxes[i], boxes[j]) >= threshold:
            rest = [b for k, b in enumerate(boxes) if k != j]
            rest[i] = boxes[i].union(boxes[j])
            return reference_merge(rest, threshold)
    return list(boxes)


class TestBoxOps(unittest.TestCase):
    def test_iou(self):
        a = BoundingBox(0, 0, 10, 10)
        b = BoundingBox(5, 0, 10, 10)
        self.assertAlmostEqual(iou(a, b), 50 / 150)

    def test_clamp_drops_outside_boxes(self):
        boxes = [BoundingBox(90, 40, 20, 20), BoundingBox(200, 0, 5, 5)]
        self.assertEqual(clamp_boxes(boxes, 100, 50), [BoundingBox(90, 40, 10, 10)])

    def test_merge_overlapping_pairs(self):
        boxes = [BoundingBox(0, 0, 10, 10), BoundingBox(2, 0, 10, 10), BoundingBox(50, 50, 5, 5)]
        merged = merge_boxes(boxes, 0.3)
        self.assertEqual(merged, [BoundingBox(0, 0, 12, 10), BoundingBox(50, 50, 5, 5)])

    def test_merge_runs_to_fixpoint(self):
        # The outer pair overlaps too little to merge on its own
        boxes = [BoundingBox(0, 0, 10, 10), BoundingBox(4, 0, 10, 10), BoundingBox(8, 0, 10, 10)]
        self.assertEqual(merge_boxes(boxes, 0.3), [BoundingBox(0, 0, 18, 10)])

    def test_merge_threshold_validation(self):
        with self.assertRaises(ParameterError):
            merge_boxes([], 1.5)

    def test_merge_output_is_reading_ordered(self):
        boxes = [BoundingBox(40, 30, 5, 5), BoundingBox(0, 30, 5, 5), BoundingBox(20, 0, 5, 5)]
        self.assertEqual([b.x for b in merge_boxes(boxes, 0.5)], [20, 0, 40])

    def test_merge_matches_pairwise_reference(self):
        rng = np.random.default_rng(21)
        for trial in range(60):
            boxes = [
                BoundingBox(int(x), int(y), int(w), int(h))
                for x, y, w, h in zip(
                    rng.integers(0, 60, 10), rng.integers(0, 60, 10),
                    rng.integers(1, 25, 10), rng.integers(1, 25, 10),
                )
            ]
            threshold = float(rng.choice([0.05, 0.2, 0.4]))
            merged = merge_boxes(boxes, threshold)

            self.assertEqual(merged, sort_boxes(reference_merge(boxes, threshold)), trial)
            self.assertEqual(merge_boxes(merged, threshold), merged)
            for a, b in itertools.combinations(merged, 2):
                self.assertLess(iou(a, b), threshold)
            for box in boxes:
                self.assertTrue(any(
                    m.x <= box.x and m.y <= box.y and box.x2 <= m.x2 and box.y2 <= m.y2 for m in merged
                ))


class TestHeuristicDetector(unittest.TestCase):
    def test_single_line(self):
        image, (truth,) = frame_with_lines(['PASSWORD HUNTER'])
        boxes = detect_heuristic(image)
        self.assertEqual(len(boxes), 1)
        self.assertGreater(iou(boxes[0], truth), 0.7)

    def test_two_lines_stay_separate(self):
        image, truth = frame_with_lines(['GRADE TRANSCRIPT', 'MATH A PHYS B'])
        boxes = detect_heuristic(image)
        self.assertEqual(len(boxes), 2)
        for found, expected in zip(boxes, truth):
            self.assertGreater(iou(found, expected), 0.7)

    def test_blank_frame_has_no_text(self):
        image = Image(np.full((120, 160, 3), 200, dtype=np.uint8))
        self.assertEqual(detect_heuristic(image), [])

    def test_survives_jpeg_round_trip(self):
        image, (truth,) = frame_with_lines(['4111 1111 1111 1111'])
        boxes = detect_heuristic(decompress(compress(image, 75)))
        self.assertEqual(len(boxes), 1)
        self.assertGreater(iou(boxes[0], truth), 0.6)

    def test_min_area_filters_small_marks(self):
        canvas = np.full((100, 100), 220, dtype=np.uint8)
        canvas[50:52, 50:53] = 0
        self.assertEqual(detect_heuristic(Image(canvas)), [])

    def test_deterministic(self):
        image, _ = frame_with_lines(['ID: 123-45-6789'])
        self.assertEqual(detect_heuristic(image), detect_heuristic(image))

    def test_config_validation(self):
        with self.assertRaises(ParameterError):
            DetectorConfig(min_aspect=30, max_aspect=2)
        with self.assertRaises(ParameterError):
            DetectorConfig(binarization='adaptive')
        with self.assertRaises(ParameterError):
            DetectorConfig(line_gap=0)

    def test_from_settings_defaults_match(self):
        self.assertEqual(DetectorConfig.from_settings(DetectorSettings()), DetectorConfig())

    def test_fixed_threshold_mode(self):
        image, (truth,) = frame_with_lines(['MENU COFFEE TEA'])
        boxes = detect_heuristic(image, DetectorConfig(binarization='fixed', threshold=40))
        self.assertEqual(len(boxes), 1)
        self.assertGreater(iou(boxes[0], truth), 0.7)


class TestDetectionSources(unittest.TestCase):
    def test_annotated_boxes_are_clamped(self):
        item = make_item(annotations=(Annotation(BoundingBox(90, 40, 30, 30), 'x'),))
        self.assertEqual(load_annotated_boxes(item), [BoundingBox(90, 40, 10, 10)])

    def test_missing_annotations(self):
        with self.assertRaises(AnnotationMissingError):
            load_annotated_boxes(make_item(annotations=None))

    def test_empty_annotations_mean_no_text(self):
        self.assertEqual(load_annotated_boxes(make_item(annotations=())), [])

    def test_annotation_detector(self):
        item = make_item(annotations=(Annotation(BoundingBox(1, 2, 30, 8), 'HELLO'),))
        detector = AnnotationDetector({item.id: item})
        image = Image(np.zeros((50, 100), dtype=np.uint8))
        result = detector.detect(image, 'f-1')
        self.assertEqual(result.boxes, [BoundingBox(1, 2, 30, 8)])
        self.assertEqual(result.source.kind, 'annotation')
        with self.assertRaises(AnnotationMissingError):
            detector.detect(image, 'unknown')

    def test_heuristic_detector_source(self):
        image, _ = frame_with_lines(['HOME SWEET HOME'])
        result = HeuristicDetector().detect(image, 'frame')
        self.assertEqual(result.source.kind, 'heuristic')
        self.assertEqual(len(result.boxes), 1)


def test_external_sidecar(tmp_path):
    sidecar = tmp_path / 'boxes.csv'
    sidecar.write_text(
        'frame_id,x,y,w,h,confidence\n'
        'a,10,10,40,12,0.9\n'
        'a,90,45,40,12,0.2\n'
        'b,0,0,5,5,0.99\n'
    )
    records = load_detection_sidecar(sidecar)
    assert sorted(records) == ['a', 'b']

    image = Image(np.zeros((50, 100), dtype=np.uint8))
    detector = ExternalFileDetector.from_file(sidecar, min_confidence=0.5)
    result = detector.detect(image, 'a')
    assert result.boxes == [BoundingBox(10, 10, 40, 12)]
    assert result.confidences == [0.9]
    assert result.source.kind == 'external-file'
    assert detector.detect(image, 'missing').boxes == []

    lenient = ExternalFileDetector.from_file(sidecar)
    assert lenient.detect(image, 'a').boxes == [BoundingBox(10, 10, 40, 12), BoundingBox(90, 45, 10, 5)]


def test_external_confidences_follow_clamped_boxes(tmp_path):
    sidecar = tmp_path / 'boxes.csv'
    sidecar.write_text(
        'frame_id,x,y,w,h,confidence\n'
        'a,500,0,10,10,0.95\n'
        'a,10,10,40,12,0.6\n'
        'a,90,45,40,12,0.8\n'
    )
    image = Image(np.zeros((50, 100), dtype=np.uint8))
    result = ExternalFileDetector.from_file(sidecar).detect(image, 'a')
    assert result.boxes == [BoundingBox(10, 10, 40, 12), BoundingBox(90, 45, 10, 5)]
    assert result.confidences == [0.6, 0.8]


def test_sidecar_errors(tmp_path):
    with pytest.raises(SourceMissingError):
        load_detection_sidecar(tmp_path / 'absent.csv')
    bad = tmp_path / 'bad.csv'
    bad.write_text('frame_id,x,y\na,1,2\n')
    with pytest.raises(SourceMissingError):
        load_detection_sidecar(bad)


def test_create_detector_kinds(tmp_path):
    assert isinstance(create_detector('heuristic'), HeuristicDetector)
    with pytest.raises(ConfigurationError):
        create_detector('annotation', DetectorSettings())
    with pytest.raises(ConfigurationError):
        create_detector('external', DetectorSettings())
    with pytest.raises(ConfigurationError):
        create_detector('neural')

    item = make_item()
    assert isinstance(create_detector('annotation', items={item.id: item}), AnnotationDetector)
