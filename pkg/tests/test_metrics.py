"""Tests for PSNR/SSIM."""

import math

import numpy as np
import pytest

from softjpeg.codec.decode import rgb_to_ycbcr
from softjpeg.evaluation.metrics import psnr, ssim
from softjpeg.exceptions import GeometryMismatchError
from softjpeg.models.images import ColorSpace, PixelImage


def test_identical_images(gray_image):
    assert psnr(gray_image, gray_image) == math.inf
    assert ssim(gray_image, gray_image) == pytest.approx(1.0)


def test_constant_offset_psnr(gray_image):
    shifted = PixelImage(samples=gray_image.samples + 16.0)
    assert psnr(gray_image, shifted) == pytest.approx(20 * math.log10(255 / 16))


def test_psnr_is_symmetric(gray_image, rng):
    noisy = PixelImage(samples=gray_image.samples + rng.normal(0, 5, gray_image.samples.shape))
    assert psnr(gray_image, noisy) == pytest.approx(psnr(noisy, gray_image))
    assert ssim(gray_image, noisy) < 1.0


def test_geometry_mismatch(gray_image, color_image):
    with pytest.raises(GeometryMismatchError):
        psnr(gray_image, color_image)
    cropped = PixelImage(samples=gray_image.samples[:32])
    with pytest.raises(GeometryMismatchError):
        ssim(gray_image, cropped)


class TestColor:
    def test_default_compares_luma_only(self, color_image):
        samples = color_image.samples.copy()
        # a pure chroma change: equal and opposite R/B shifts that keep Y fixed
        samples[..., 0] += 0.114 * 10.0
        samples[..., 2] -= 0.299 * 10.0
        changed = PixelImage(samples=samples, color_space=ColorSpace.RGB)
        luma = rgb_to_ycbcr(changed.samples)[..., 0]
        np.testing.assert_allclose(luma, rgb_to_ycbcr(color_image.samples)[..., 0], atol=1e-9)
        assert psnr(color_image, changed) > 100.0
        assert psnr(color_image, changed, all_channels=True) < 60.0

    def test_all_channels_ssim(self, color_image):
        assert ssim(color_image, color_image, all_channels=True) == pytest.approx(1.0)

    def test_ycbcr_input_uses_first_plane(self, color_image):
        ycc = PixelImage(samples=rgb_to_ycbcr(color_image.samples), color_space=ColorSpace.YCBCR)
        shifted = ycc.samples + np.array([0.0, 3.0, -3.0])
        other = PixelImage(samples=shifted, color_space=ColorSpace.YCBCR)
        assert psnr(ycc, other) == math.inf
