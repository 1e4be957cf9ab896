"""
The known degradation H and its regularized inverse.

H is either the identity (pure soft decoding) or a separable Gaussian blur
with half-sample symmetric borders (the mirrored edge sample is repeated
first). That is the DCT-II boundary extension, so the 2-D DCT diagonalizes
the blur exactly and the inverse is a Tikhonov filter h / (h² + η²) on
the DCT coefficients.
"""

from __future__ import annotations

import numpy as np
from scipy.fft import dctn, idctn
from scipy.ndimage import convolve1d

from softjpeg.exceptions import NonInvertibleConfigError
from softjpeg.models.images import PixelImage
from softjpeg.models.schemas import DegradationKind, DegradationOperator


def gaussian_kernel(op: DegradationOperator) -> np.ndarray:
    """Normalized 1-D taps g_{-r..r}."""
    radius = op.kernel_radius
    taps = np.exp(-(np.arange(-radius, radius + 1, dtype=np.float64) ** 2) / (2.0 * op.sigma**2))
    return taps / taps.sum()


def dct_response(op: DegradationOperator, length: int) -> np.ndarray:
    """Eigenvalues h_k = g_0 + 2 Σ_j g_j cos(π k j / N) of the 1-D blur."""
    kernel = gaussian_kernel(op)
    radius = op.kernel_radius
    k = np.arange(length, dtype=np.float64)[:, np.newaxis]
    j = np.arange(1, radius + 1, dtype=np.float64)[np.newaxis, :]
    return kernel[radius] + 2.0 * (np.cos(np.pi * k * j / length) @ kernel[radius + 1 :])


def _map_planes(img: PixelImage | np.ndarray, fn) -> PixelImage | np.ndarray:
    if isinstance(img, PixelImage):
        planes = [fn(img.plane(c)) for c in range(img.channels)]
        return PixelImage(samples=np.stack(planes, axis=-1), color_space=img.color_space)
    return fn(np.asarray(img, dtype=np.float64))


def apply_H(  # noqa: N802
    img: PixelImage | np.ndarray, op: DegradationOperator
) -> PixelImage | np.ndarray:
    """Apply the degradation to an image or a single plane."""
    if op.kind == DegradationKind.IDENTITY:
        return img
    kernel = gaussian_kernel(op)

    def blur(plane: np.ndarray) -> np.ndarray:
        out = convolve1d(plane, kernel, axis=0, mode="reflect")
        return convolve1d(out, kernel, axis=1, mode="reflect")

    return _map_planes(img, blur)


def apply_H_inverse(  # noqa: N802
    img: PixelImage | np.ndarray, op: DegradationOperator
) -> PixelImage | np.ndarray:
    """Regularized inverse; the identity operator passes the input through."""
    if op.kind == DegradationKind.IDENTITY:
        return img
    if op.eta <= 0:
        raise NonInvertibleConfigError("A blur operator needs eta > 0 to be inverted")

    def invert(plane: np.ndarray) -> np.ndarray:
        rows, cols = plane.shape
        h = dct_response(op, rows)[:, np.newaxis] * dct_response(op, cols)[np.newaxis, :]
        spectrum = dctn(plane, type=2, norm="ortho")
        return idctn(spectrum * h / (h * h + op.eta**2), type=2, norm="ortho")

    return _map_planes(img, invert)
