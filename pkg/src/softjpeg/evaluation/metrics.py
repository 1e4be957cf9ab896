"""PSNR and SSIM on the 8-bit scale, luma only unless asked otherwise."""

from __future__ import annotations

import math

import numpy as np
from skimage.metrics import mean_squared_error, structural_similarity

from softjpeg.codec.decode import rgb_to_ycbcr
from softjpeg.exceptions import GeometryMismatchError
from softjpeg.models.images import ColorSpace, PixelImage

DATA_RANGE = 255.0
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def _samples(img: PixelImage, all_channels: bool) -> np.ndarray:
    if img.channels == 1:
        return img.plane(0)
    if all_channels:
        return img.samples
    if img.color_space == ColorSpace.YCBCR:
        return img.plane(0)
    return rgb_to_ycbcr(img.samples)[..., 0]


def _pair(a: PixelImage, b: PixelImage, all_channels: bool) -> tuple[np.ndarray, np.ndarray]:
    if (a.height, a.width, a.channels) != (b.height, b.width, b.channels):
        raise GeometryMismatchError(
            f"Cannot compare {a.samples.shape} with {b.samples.shape}"
        )
    return _samples(a, all_channels), _samples(b, all_channels)


def psnr(a: PixelImage, b: PixelImage, all_channels: bool = False) -> float:
    """10·log10(255² / MSE); ``math.inf`` for identical images."""
    x, y = _pair(a, b, all_channels)
    mse = float(mean_squared_error(x, y))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(DATA_RANGE**2 / mse)


def ssim(a: PixelImage, b: PixelImage, all_channels: bool = False) -> float:
    """Mean SSIM with an 11×11 Gaussian window (σ = 1.5) and K1 = 0.01, K2 = 0.03."""
    x, y = _pair(a, b, all_channels)
    return float(
        structural_similarity(
            x,
            y,
            data_range=DATA_RANGE,
            gaussian_weights=True,
            sigma=SSIM_SIGMA,
            use_sample_covariance=False,
            K1=SSIM_K1,
            K2=SSIM_K2,
            channel_axis=-1 if x.ndim == 3 else None,
        )
    )
