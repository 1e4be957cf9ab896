"""
Projection onto the quantization-interval constraint set.

Every coded block y_i tells us that the true orthonormal DCT coefficient k
lies in [γ_k q_k − q_k/2, γ_k q_k + q_k/2]. The clipping operator C_β clamps
each coefficient of a candidate block into the (possibly narrower) interval
of half-width β q_k, which is the exact Euclidean projection onto that box
because the DCT is orthonormal.

Spatial blocks and planes in this module are *centered* (pixel − 128) and
unclamped, matching ``codec.decode.coefficient_planes``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from softjpeg.codec.decode import LEVEL_SHIFT, dequantized_blocks, rgb_to_ycbcr, ycbcr_to_rgb
from softjpeg.exceptions import GeometryMismatchError
from softjpeg.models.images import CoefficientImage, ColorSpace, PixelImage, QuantTable
from softjpeg.transform import (
    blocks_to_plane,
    dct2d,
    from_zigzag,
    idct2d,
    pad_to_blocks,
    plane_to_blocks,
)

# violations smaller than this fraction of q_k are floating-point noise
FEASIBILITY_TOLERANCE = 1e-9

# natural (v, u) -> zig-zag index
_ZIGZAG_POSITION = from_zigzag(np.arange(64))


def _check_beta(beta: float) -> None:
    if not 0.0 < beta <= 0.5:
        raise ValueError(f"beta must lie in (0, 0.5], got {beta}")


def quant_intervals(
    centers: np.ndarray, steps: np.ndarray, beta: float
) -> tuple[np.ndarray, np.ndarray]:
    """Lower and upper bounds γq ∓ βq; broadcasts over blocks."""
    _check_beta(beta)
    half = beta * steps
    return centers - half, centers + half


def clip_coefficients(
    coeffs: np.ndarray, centers: np.ndarray, steps: np.ndarray, beta: float
) -> np.ndarray:
    """Coefficientwise clamp into [γq − βq, γq + βq]."""
    lower, upper = quant_intervals(centers, steps, beta)
    return np.minimum(np.maximum(coeffs, lower), upper)


def clip_block(
    candidate: np.ndarray, gamma: np.ndarray, table: QuantTable, beta: float
) -> np.ndarray:
    """
    C_β for one centered 8×8 spatial block; ``gamma`` holds the 64 observed
    indices in zig-zag order.
    """
    steps = table.natural()
    centers = from_zigzag(np.asarray(gamma)).astype(np.float64) * steps
    return idct2d(clip_coefficients(dct2d(candidate), centers, steps, beta))


def clip_plane(
    plane: np.ndarray, coeffs: CoefficientImage, component: int, beta: float
) -> np.ndarray:
    """Clip every block of a centered block-grid plane of one component."""
    comp = coeffs.components[component]
    expected = (comp.block_rows * 8, comp.block_cols * 8)
    if plane.shape != expected:
        raise GeometryMismatchError(f"Plane {plane.shape} does not match block grid {expected}")
    steps = coeffs.table_for(component).natural()
    centers = dequantized_blocks(coeffs, component)
    clipped = clip_coefficients(dct2d(plane_to_blocks(plane)), centers, steps, beta)
    return blocks_to_plane(idct2d(clipped))


def feedback_blend(candidate: np.ndarray, observed: np.ndarray, delta: float) -> np.ndarray:
    """Additive noise feedback: δ y + (1 − δ) z (same in pixel and DCT domain)."""
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    return delta * observed + (1.0 - delta) * candidate


def _image_planes(img: PixelImage, coeffs: CoefficientImage) -> list[np.ndarray]:
    """Centered block-grid planes of an exported-domain image."""
    if (img.width, img.height) != (coeffs.width, coeffs.height):
        raise GeometryMismatchError(
            f"Image is {img.width}x{img.height}, coefficients are {coeffs.width}x{coeffs.height}"
        )
    if img.channels != len(coeffs.components):
        raise GeometryMismatchError(
            f"Image has {img.channels} channel(s), coefficients have {len(coeffs.components)}"
        )
    if img.channels == 1:
        return [pad_to_blocks(img.plane(0) - LEVEL_SHIFT)]
    if any(coeffs.component_size(i) != (coeffs.width, coeffs.height) for i in range(3)):
        raise GeometryMismatchError("Pixel-domain clipping of subsampled chroma is not supported")
    ycc = img.samples if img.color_space == ColorSpace.YCBCR else rgb_to_ycbcr(img.samples)
    return [pad_to_blocks(ycc[..., c] - LEVEL_SHIFT) for c in range(3)]


def clip_image(candidate: PixelImage, coeffs: CoefficientImage, beta: float) -> PixelImage:
    """
    Clip a whole image against the coded blocks. Gray, or 3-channel with
    full-resolution chroma; the result is not clamped to [0, 255].
    """
    planes = _image_planes(candidate, coeffs)
    clipped = [
        clip_plane(plane, coeffs, index, beta)[: coeffs.height, : coeffs.width] + LEVEL_SHIFT
        for index, plane in enumerate(planes)
    ]
    if len(clipped) == 1:
        return PixelImage(samples=clipped[0], color_space=ColorSpace.GRAY)
    ycc = np.stack(clipped, axis=-1)
    if candidate.color_space == ColorSpace.YCBCR:
        return PixelImage(samples=ycc, color_space=ColorSpace.YCBCR)
    return PixelImage(samples=ycbcr_to_rgb(ycc), color_space=ColorSpace.RGB)


@dataclass(frozen=True)
class Violation:
    component: int
    block_row: int
    block_col: int
    # zig-zag index of the coefficient
    frequency: int
    overshoot: float


@dataclass(frozen=True)
class FeasibilityReport:
    """Coefficients outside their β-intervals; overshoot is in units of q_k."""

    beta: float
    checked: int
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def count(self) -> int:
        return len(self.violations)

    @property
    def max_overshoot(self) -> float:
        return max((v.overshoot for v in self.violations), default=0.0)

    @property
    def feasible(self) -> bool:
        return not self.violations

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        with path.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["component", "block_row", "block_col", "frequency", "overshoot_q"])
            for v in self.violations:
                writer.writerow(
                    [v.component, v.block_row, v.block_col, v.frequency, f"{v.overshoot:.6g}"]
                )
        return path


def check_plane(
    plane: np.ndarray, coeffs: CoefficientImage, component: int, beta: float
) -> FeasibilityReport:
    """Feasibility of one centered block-grid plane (the pipeline's working domain)."""
    _check_beta(beta)
    comp = coeffs.components[component]
    if plane.shape != (comp.block_rows * 8, comp.block_cols * 8):
        raise GeometryMismatchError(f"Plane {component} does not match its block grid")
    steps = coeffs.table_for(component).natural()
    centers = dequantized_blocks(coeffs, component)
    excess = (np.abs(dct2d(plane_to_blocks(plane)) - centers) - beta * steps) / steps
    violations = tuple(
        Violation(
            component=component,
            block_row=int(row),
            block_col=int(col),
            frequency=int(_ZIGZAG_POSITION[v, u]),
            overshoot=float(excess[row, col, v, u]),
        )
        for row, col, v, u in zip(*np.nonzero(excess > FEASIBILITY_TOLERANCE))
    )
    return FeasibilityReport(beta=beta, checked=int(excess.size), violations=violations)


def check_feasible(
    img: PixelImage, coeffs: CoefficientImage, beta: float = 0.5
) -> FeasibilityReport:
    """Which coefficients of an exported-domain image leave their β-intervals."""
    return check_planes(_image_planes(img, coeffs), coeffs, beta)


def check_planes(
    planes: list[np.ndarray], coeffs: CoefficientImage, beta: float
) -> FeasibilityReport:
    """Feasibility of all component planes at once."""
    reports = [check_plane(plane, coeffs, index, beta) for index, plane in enumerate(planes)]
    return FeasibilityReport(
        beta=beta,
        checked=sum(r.checked for r in reports),
        violations=tuple(v for r in reports for v in r.violations),
    )
