"""Shared fixtures: small deterministic images and their JPEG coefficients."""

import numpy as np
import pytest

from softjpeg.codec.jpeg import encode_coefficients
from softjpeg.evaluation.benchmark import bundled_image
from softjpeg.models.images import ColorSpace, PixelImage
from softjpeg.models.schemas import PatchSpec, RestorationConfig


def synthetic_plane(height: int = 64, width: int = 64) -> np.ndarray:
    """Gradient background, a bright disk, a vertical edge and a stripe texture."""
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    plane = 60.0 + 1.2 * xx + 0.6 * yy
    disk = (xx - 0.3 * width) ** 2 + (yy - 0.35 * height) ** 2 < (0.18 * min(height, width)) ** 2
    plane[disk] = 220.0
    plane[:, int(0.7 * width) :] -= 50.0
    stripes = (yy > 0.65 * height) & (xx < 0.5 * width)
    plane[stripes] += 25.0 * np.sin(xx[stripes] * 0.9)
    return np.clip(plane, 0.0, 255.0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def gray_image() -> PixelImage:
    return PixelImage(samples=np.round(synthetic_plane()), color_space=ColorSpace.GRAY)


@pytest.fixture
def color_image() -> PixelImage:
    base = synthetic_plane(48, 40)
    rgb = np.stack((base, 255.0 - base, np.roll(base, 7, axis=1)), axis=-1)
    return PixelImage(samples=np.round(rgb), color_space=ColorSpace.RGB)


@pytest.fixture
def gray_coeffs(gray_image):
    return encode_coefficients(gray_image, 25)


@pytest.fixture
def small_config() -> RestorationConfig:
    """Fast solver settings for 64×64 tests."""
    patch = PatchSpec(group_size=16, stride=4, search_window=20, smooth_window=10)
    return RestorationConfig(iterations=2, patch=patch)


@pytest.fixture
def natural_image():
    """Loader for the photographs bundled with scikit-image, resized to a square."""
    return bundled_image
