"""PrivAR Privacy Pipeline

Imaging Core Test Suite

Codec round-trip, Gaussian blur, elastic deformation, mask construction
and the obfuscation compositing step.

Author: PrivAR Team
License: MIT"""

import unittest

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import ndimage

from src.common.exceptions import DecodeError, ImageDimensionError, ParameterError
from src.imaging import (
    BoundingBox,
    Image,
    ObfuscationParams,
    build_mask,
    compress,
    decompress,
    displacement_field,
    elastic_deform,
    encode_png,
    frame_seed,
    gaussian_blur,
    gaussian_kernel,
    image_fingerprint,
    obfuscate,
    probe_size,
    protect_frame,
    render_text,
    sort_boxes,
    text_size,
)


def text_frame(lines=('PASSWORD HUNTER',), width=200, height=80, scale=2) -> Image:
    canvas = np.full((height, width, 3), 230, dtype=np.uint8)
    y = 10
    for line in lines:
        render_text(canvas, line, 10, y, (20, 20, 20), scale)
        y += 7 * scale + 12
    return Image(canvas)


def gradient_energy(pixels: np.ndarray) -> float:
    gray = pixels.astype(np.float64)
    if gray.ndim == 3:
        gray = gray.mean(axis=2)
    gy, gx = np.gradient(gray)
    return float(np.sum(gx ** 2 + gy ** 2))


def dense_blur(pixels: np.ndarray, sigma: float) -> np.ndarray:
    """Direct 2-D convolution with the outer-product kernel."""
    kernel1d = gaussian_kernel(sigma)
    kernel = np.outer(kernel1d, kernel1d)
    radius = len(kernel1d) // 2
    padded = np.pad(pixels.astype(np.float64), radius, mode='symmetric')
    out = np.zeros(pixels.shape, dtype=np.float64)
    for dy in range(kernel.shape[0]):
        for dx in range(kernel.shape[1]):
            out += kernel[dy, dx] * padded[dy:dy + pixels.shape[0], dx:dx + pixels.shape[1]]
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


class TestImageTypes(unittest.TestCase):
    def test_pixels_are_read_only(self):
        image = Image(np.zeros((4, 4), dtype=np.uint8))
        with self.assertRaises(ValueError):
            image.pixels[0, 0] = 1

    def test_rejects_bad_shapes(self):
        with self.assertRaises(ImageDimensionError):
            Image(np.zeros((4, 4, 4), dtype=np.uint8))
        with self.assertRaises(ImageDimensionError):
            Image(np.zeros((0, 4), dtype=np.uint8))
        with self.assertRaises(ImageDimensionError):
            Image(np.zeros((4, 4), dtype=np.float32))

    def test_box_validation_and_geometry(self):
        with self.assertRaises(ParameterError):
            BoundingBox(0, 0, 0, 5)
        box = BoundingBox(2, 3, 10, 4)
        self.assertEqual((box.x2, box.y2, box.area), (12, 7, 40))
        self.assertTrue(box.within(12, 7))
        self.assertFalse(box.within(11, 7))
        self.assertEqual(box.union(BoundingBox(0, 0, 1, 1)), BoundingBox(0, 0, 12, 7))
        self.assertAlmostEqual(box.iou(box), 1.0)
        self.assertEqual(box.iou(BoundingBox(50, 50, 2, 2)), 0.0)

    def test_clamped_box(self):
        self.assertEqual(BoundingBox.clamped(-5, -5, 10, 10, 100, 100), BoundingBox(0, 0, 5, 5))
        self.assertIsNone(BoundingBox.clamped(120, 0, 10, 10, 100, 100))

    def test_sort_boxes_reading_order(self):
        boxes = [BoundingBox(50, 20, 5, 5), BoundingBox(10, 20, 5, 5), BoundingBox(90, 2, 5, 5)]
        self.assertEqual(
            [b.x for b in sort_boxes(boxes)], [90, 10, 50]
        )

    def test_params_validation_and_echo(self):
        with self.assertRaises(ParameterError):
            ObfuscationParams(sigma=-1)
        with self.assertRaises(ParameterError):
            ObfuscationParams(beta=float('nan'))
        params = ObfuscationParams(sigma=3, beta=10, pad=2, seed=99)
        self.assertEqual(params.echo(), {'sigma': 3, 'beta': 10, 'pad': 2})

    def test_frame_seed_is_stable(self):
        self.assertEqual(frame_seed('office-01'), frame_seed('office-01'))
        self.assertNotEqual(frame_seed('office-01'), frame_seed('office-02'))
        self.assertLess(frame_seed('x'), 2 ** 64)

    def test_fingerprint_depends_on_content_and_shape(self):
        a = Image(np.zeros((4, 6), dtype=np.uint8))
        b = Image(np.zeros((6, 4), dtype=np.uint8))
        self.assertNotEqual(image_fingerprint(a), image_fingerprint(b))
        self.assertEqual(image_fingerprint(a), image_fingerprint(a.copy()))

    def test_fingerprint_sees_a_single_pixel(self):
        pixels = np.full((16, 16, 3), 200, dtype=np.uint8)
        changed = pixels.copy()
        changed[9, 4, 2] = 201
        self.assertNotEqual(image_fingerprint(Image(pixels)), image_fingerprint(Image(changed)))


class TestCodec(unittest.TestCase):
    def setUp(self):
        self.frame = text_frame()

    def test_compress_round_trip_keeps_shape(self):
        data = compress(self.frame, 75)
        self.assertEqual(data[:2], b'\xff\xd8')
        decoded = decompress(data)
        self.assertEqual((decoded.height, decoded.width, decoded.channels), (80, 200, 3))
        self.assertEqual(probe_size(data), (200, 80))

    def test_compress_is_deterministic(self):
        self.assertEqual(compress(self.frame, 60), compress(self.frame, 60))

    def test_quality_out_of_range(self):
        for quality in (0, 101):
            with self.assertRaises(ParameterError):
                compress(self.frame, quality)

    def test_png_is_lossless(self):
        decoded = decompress(encode_png(self.frame), 'png')
        np.testing.assert_array_equal(decoded.pixels, self.frame.pixels)

    def test_format_mismatch_and_garbage(self):
        with self.assertRaises(DecodeError):
            decompress(encode_png(self.frame), 'jpeg')
        with self.assertRaises(DecodeError):
            decompress(b'')
        with self.assertRaises(DecodeError):
            decompress(b'not an image at all')

    def test_truncated_stream(self):
        data = compress(self.frame, 75)
        with self.assertRaises(DecodeError):
            decompress(data[: len(data) // 3])

    def test_top_quality_keeps_flat_gray(self):
        flat = Image(np.full((8, 8), 128, dtype=np.uint8))
        decoded = decompress(compress(flat, 100)).pixels.astype(int)
        self.assertLessEqual(int(np.max(np.abs(decoded - 128))), 2)


class TestGaussianBlur(unittest.TestCase):
    def test_kernel_radius_and_normalization(self):
        kernel = gaussian_kernel(5.0)
        self.assertEqual(len(kernel), 31)
        self.assertAlmostEqual(float(kernel.sum()), 1.0)
        self.assertEqual(int(np.argmax(kernel)), 15)

    def test_sigma_zero_is_identity(self):
        frame = text_frame()
        np.testing.assert_array_equal(gaussian_blur(frame, 0).pixels, frame.pixels)

    def test_negative_sigma_rejected(self):
        with self.assertRaises(ParameterError):
            gaussian_blur(text_frame(), -0.5)

    def test_uniform_image_unchanged(self):
        flat = Image(np.full((20, 30), 117, dtype=np.uint8))
        np.testing.assert_array_equal(gaussian_blur(flat, 3.0).pixels, flat.pixels)

    def test_separable_matches_dense_convolution(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            pixels = rng.integers(0, 256, size=(32, 32), dtype=np.uint8)
            sigma = float(rng.uniform(0.5, 3.0))
            separable = gaussian_blur(Image(pixels), sigma).pixels.astype(int)
            dense = dense_blur(pixels, sigma).astype(int)
            self.assertLessEqual(int(np.max(np.abs(separable - dense))), 1)

    def test_separable_matches_dense_at_default_strength(self):
        rng = np.random.default_rng(8)
        for _ in range(5):
            pixels = rng.integers(0, 256, size=(40, 40), dtype=np.uint8)
            separable = gaussian_blur(Image(pixels), 5.0).pixels.astype(int)
            dense = dense_blur(pixels, 5.0).astype(int)
            self.assertLessEqual(int(np.max(np.abs(separable - dense))), 1)

    def test_impulse_response_is_kernel_product(self):
        sigma = 5.0
        pixels = np.zeros((64, 64), dtype=np.uint8)
        pixels[32, 32] = 255
        kernel = gaussian_kernel(sigma)
        radius = len(kernel) // 2
        out = gaussian_blur(Image(pixels), sigma).pixels.astype(float)
        self.assertLessEqual(abs(out[32, 32] - 255 * kernel[radius] ** 2), 1)
        self.assertLessEqual(abs(out[32, 32 + radius] - 255 * kernel[radius] * kernel[-1]), 1)

    def test_blur_preserves_mean(self):
        rng = np.random.default_rng(9)
        for sigma in (0.8, 2.0, 5.0):
            pixels = rng.integers(0, 256, size=(48, 40, 3), dtype=np.uint8)
            out = gaussian_blur(Image(pixels), sigma).pixels
            self.assertLessEqual(abs(float(out.mean()) - float(pixels.mean())), 1.0)


class TestElasticDeform(unittest.TestCase):
    def test_field_peak_equals_beta(self):
        dx, dy = displacement_field(40, 60, 12.0, seed=3)
        self.assertAlmostEqual(float(np.max(np.hypot(dx, dy))), 12.0, places=6)

    def test_field_is_seeded(self):
        a = displacement_field(20, 20, 5.0, seed=1)
        b = displacement_field(20, 20, 5.0, seed=1)
        c = displacement_field(20, 20, 5.0, seed=2)
        np.testing.assert_array_equal(a[0], b[0])
        self.assertFalse(np.array_equal(a[0], c[0]))

    def test_field_follows_seeded_smoothed_noise(self):
        height, width, beta, seed = 24, 36, 7.5, 42
        noise = np.random.default_rng(seed).uniform(-1.0, 1.0, size=(2, height, width))
        smooth = [ndimage.gaussian_filter(noise[i], 8.0, mode='reflect') for i in range(2)]
        scale = beta / np.max(np.hypot(smooth[0], smooth[1]))
        dx, dy = displacement_field(height, width, beta, seed)
        np.testing.assert_allclose(dx, smooth[0] * scale, rtol=1e-9, atol=1e-12)
        np.testing.assert_allclose(dy, smooth[1] * scale, rtol=1e-9, atol=1e-12)

    def test_beta_zero_is_identity(self):
        frame = text_frame()
        np.testing.assert_array_equal(elastic_deform(frame, 0, seed=5).pixels, frame.pixels)

    def test_warp_moves_text(self):
        frame = text_frame()
        warped = elastic_deform(frame, 20, seed=5)
        self.assertFalse(np.array_equal(warped.pixels, frame.pixels))


class TestObfuscation(unittest.TestCase):
    def setUp(self):
        self.frame = text_frame()
        self.box = BoundingBox(10, 10, text_size('PASSWORD HUNTER', 2)[0], 14)
        self.params = ObfuscationParams(sigma=5, beta=40, pad=4, seed=11)

    def test_mask_padding_and_clamping(self):
        mask = build_mask([BoundingBox(0, 0, 4, 4)], 10, 10, pad=2)
        self.assertEqual(mask.popcount, 36)
        self.assertTrue(mask.bits[5, 5])
        self.assertFalse(mask.bits[6, 6])

    def test_mask_overlapping_boxes_union(self):
        mask = build_mask([BoundingBox(0, 0, 4, 4), BoundingBox(2, 2, 4, 4)], 10, 10)
        self.assertEqual(mask.popcount, 28)

    def test_mask_rejects_empty_canvas(self):
        for width, height in ((0, 10), (10, -3)):
            with self.assertRaises(ParameterError):
                build_mask([], width, height)

    def test_outside_mask_bit_identical(self):
        out = obfuscate(self.frame, [self.box], self.params)
        mask = build_mask([self.box], self.frame.width, self.frame.height, self.params.pad)
        np.testing.assert_array_equal(out.pixels[~mask.bits], self.frame.pixels[~mask.bits])

    def test_no_boxes_is_identity(self):
        out = obfuscate(self.frame, [], self.params)
        np.testing.assert_array_equal(out.pixels, self.frame.pixels)

    def test_zero_strength_is_identity(self):
        out = obfuscate(self.frame, [self.box], ObfuscationParams(sigma=0, beta=0, pad=4, seed=1))
        np.testing.assert_array_equal(out.pixels, self.frame.pixels)

    def test_text_gradient_energy_drops(self):
        out = obfuscate(self.frame, [self.box], self.params)
        mask = build_mask([self.box], self.frame.width, self.frame.height, self.params.pad)
        ys, xs = np.nonzero(mask.bits)
        region = np.s_[ys.min():ys.max() + 1, xs.min():xs.max() + 1]
        before = gradient_energy(self.frame.pixels[region])
        after = gradient_energy(out.pixels[region])
        self.assertLessEqual(after, 0.5 * before)

    def test_deterministic_for_seed(self):
        a = obfuscate(self.frame, [self.box], self.params)
        b = obfuscate(self.frame, [self.box], self.params)
        np.testing.assert_array_equal(a.pixels, b.pixels)

    def test_grayscale_frames(self):
        gray = Image(self.frame.to_gray())
        out = obfuscate(gray, [self.box], self.params)
        self.assertEqual(out.channels, 1)
        self.assertFalse(np.array_equal(out.pixels, gray.pixels))

    def test_protect_frame_returns_jpeg_and_mask(self):
        data, mask = protect_frame(self.frame, [self.box], self.params, 75)
        self.assertEqual(data[:2], b'\xff\xd8')
        self.assertEqual((mask.width, mask.height), (200, 80))
        self.assertGreater(mask.fraction, 0)


@st.composite
def obfuscation_cases(draw):
    height = draw(st.integers(8, 40))
    width = draw(st.integers(8, 40))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    pixels = np.random.default_rng(seed).integers(0, 256, size=(height, width, 3), dtype=np.uint8)
    boxes = []
    for _ in range(draw(st.integers(0, 3))):
        x = draw(st.integers(0, width - 1))
        y = draw(st.integers(0, height - 1))
        boxes.append(BoundingBox(x, y, draw(st.integers(1, width - x)), draw(st.integers(1, height - y))))
    params = ObfuscationParams(
        sigma=draw(st.one_of(st.just(0.0), st.floats(0.1, 4))),
        beta=draw(st.one_of(st.just(0.0), st.floats(0.1, 10))),
        pad=draw(st.integers(0, 3)), seed=seed,
    )
    return Image(pixels), boxes, params


@settings(max_examples=200, deadline=None)
@given(obfuscation_cases())
def test_obfuscation_never_touches_pixels_outside_mask(case):
    image, boxes, params = case
    out = obfuscate(image, boxes, params)
    mask = build_mask(boxes, image.width, image.height, params.pad)
    assert out.pixels.shape == image.pixels.shape
    np.testing.assert_array_equal(out.pixels[~mask.bits], image.pixels[~mask.bits])


@pytest.mark.parametrize('quality', [10, 50, 95])
def test_lower_quality_compresses_smaller(quality):
    frame = text_frame()
    assert len(compress(frame, quality)) < len(encode_png(frame))


@settings(max_examples=200, deadline=None)
@given(obfuscation_cases())
def test_mask_matches_pixelwise_box_membership(case):
    image, boxes, params = case
    mask = build_mask(boxes, image.width, image.height, params.pad)
    pad = params.pad
    for y in range(image.height):
        for x in range(image.width):
            inside = any(
                b.x - pad <= x < b.x2 + pad and b.y - pad <= y < b.y2 + pad for b in boxes
            )
            assert mask.bits[y, x] == inside, (x, y)
