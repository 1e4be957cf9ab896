"""
Hard decoding: dequantize, inverse DCT, level shift, upsample, color convert.

🎓 LEARNING NOTE: Where the clamp happens
The restoration loop needs the *unclamped*, un-shifted planes (the constraint
set lives in that space), so this module exposes two layers:

- ``coefficient_planes``: centered block-grid planes straight from γ·q
- ``planes_to_image``: level shift, crop, chroma upsampling, color
  conversion and the [0, 255] clamp, applied once at export

``hard_decode`` is simply the composition of the two.
"""

from __future__ import annotations

import numpy as np

from softjpeg.exceptions import GeometryMismatchError, UnsupportedMarkerError
from softjpeg.models.images import CoefficientImage, ColorSpace, PixelImage
from softjpeg.transform import blocks_to_plane, idct2d

LEVEL_SHIFT = 128.0


def rgb_to_ycbcr(rgb: np.ndarray) -> np.ndarray:
    """JFIF full-range conversion; (H, W, 3) in, (H, W, 3) out."""
    r, g, b = (rgb[..., i].astype(np.float64) for i in range(3))
    return np.stack(
        (
            0.299 * r + 0.587 * g + 0.114 * b,
            -0.168736 * r - 0.331264 * g + 0.5 * b + 128.0,
            0.5 * r - 0.418688 * g - 0.081312 * b + 128.0,
        ),
        axis=-1,
    )


def ycbcr_to_rgb(ycc: np.ndarray) -> np.ndarray:
    y, cb, cr = (ycc[..., i].astype(np.float64) - off for i, off in enumerate((0.0, 128.0, 128.0)))
    return np.stack(
        (
            y + 1.402 * cr,
            y - 0.344136 * cb - 0.714136 * cr,
            y + 1.772 * cb,
        ),
        axis=-1,
    )


def dequantized_blocks(coeffs: CoefficientImage, index: int) -> np.ndarray:
    """(rows, cols, 8, 8) DCT coefficients γ·q of one component, natural order."""
    comp = coeffs.components[index]
    return comp.natural_blocks().astype(np.float64) * coeffs.table_for(index).natural()


def coefficient_planes(coeffs: CoefficientImage) -> list[np.ndarray]:
    """Centered (not level-shifted), unclamped block-grid planes, one per component."""
    return [
        blocks_to_plane(idct2d(dequantized_blocks(coeffs, i)))
        for i in range(len(coeffs.components))
    ]


def upsample_plane(plane: np.ndarray, factor_x: int, factor_y: int) -> np.ndarray:
    """Sample replication."""
    if factor_x == 1 and factor_y == 1:
        return plane
    return np.repeat(np.repeat(plane, factor_y, axis=0), factor_x, axis=1)


def planes_to_image(planes: list[np.ndarray], coeffs: CoefficientImage) -> PixelImage:
    """Turn centered component planes into an exported, clamped PixelImage."""
    if len(planes) != len(coeffs.components):
        raise GeometryMismatchError(
            f"Got {len(planes)} planes for {len(coeffs.components)} components"
        )
    full = []
    for index, plane in enumerate(planes):
        comp = coeffs.components[index]
        if coeffs.max_h_sampling % comp.h_sampling or coeffs.max_v_sampling % comp.v_sampling:
            raise UnsupportedMarkerError(
                f"Non-integer upsampling ratio for component {comp.component_id}"
            )
        width, height = coeffs.component_size(index)
        shifted = plane[:height, :width] + LEVEL_SHIFT
        up = upsample_plane(
            shifted,
            coeffs.max_h_sampling // comp.h_sampling,
            coeffs.max_v_sampling // comp.v_sampling,
        )
        full.append(up[: coeffs.height, : coeffs.width])

    if len(full) == 1:
        return PixelImage(samples=np.clip(full[0], 0.0, 255.0), color_space=ColorSpace.GRAY)
    rgb = ycbcr_to_rgb(np.stack(full, axis=-1))
    return PixelImage(samples=np.clip(rgb, 0.0, 255.0), color_space=ColorSpace.RGB)


def hard_decode(coeffs: CoefficientImage) -> PixelImage:
    """Standard JPEG reconstruction at the interval centers γ·q."""
    return planes_to_image(coefficient_planes(coeffs), coeffs)
