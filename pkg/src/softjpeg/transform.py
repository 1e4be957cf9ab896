"""
Block DCTs, the scalar quantizer and the 8×8 block lattice.

LEARNING NOTE: Two DCT scalings
-------------------------------
``dct1d`` is the unnormalized DCT-II used by the quantization-error model:

    X_k = sum_n x_n cos(pi/N (n + 1/2) k)

``dct2d`` / ``idct2d`` are the orthonormal 8×8 transforms JPEG uses. For
N = 8 the two differ by a fixed per-frequency factor: the orthonormal
coefficient equals ``sqrt(1/8) * X_0`` at k = 0 and ``sqrt(2/8) * X_k``
otherwise (see ``ORTHONORMAL_SCALE``). Every restoration step works in the
orthonormal convention so that DCT-domain and pixel-domain distances agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from softjpeg.codec.tables import NATURAL_TO_ZIGZAG, ZIGZAG
from softjpeg.models.images import ColorSpace, PixelImage

BLOCK = 8


def _cosine_matrix(n: int) -> np.ndarray:
    k = np.arange(n)[:, np.newaxis]
    j = np.arange(n)[np.newaxis, :]
    return np.cos(np.pi / n * (j + 0.5) * k)


def _orthonormal_matrix(n: int = BLOCK) -> np.ndarray:
    basis = _cosine_matrix(n)
    basis[0] *= math.sqrt(1.0 / n)
    basis[1:] *= math.sqrt(2.0 / n)
    return basis


# rows are the orthonormal DCT-II basis vectors: F = C @ b @ C.T
DCT_MATRIX = _orthonormal_matrix()
ORTHONORMAL_SCALE = np.array([math.sqrt(1.0 / BLOCK)] + [math.sqrt(2.0 / BLOCK)] * (BLOCK - 1))


def dct1d(x: np.ndarray | list[float]) -> np.ndarray:
    """Unnormalized DCT-II evaluated as the direct cosine sum."""
    samples = np.asarray(x, dtype=np.float64)
    if samples.ndim != 1 or samples.size < 1:
        raise ValueError("dct1d needs a non-empty 1-D sequence")
    return _cosine_matrix(samples.size) @ samples


def dct2d(block: np.ndarray) -> np.ndarray:
    """Orthonormal 8×8 DCT-II; accepts any stack of blocks shaped (..., 8, 8)."""
    block = np.asarray(block, dtype=np.float64)
    return DCT_MATRIX @ block @ DCT_MATRIX.T


def idct2d(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of ``dct2d`` (the transpose, since the basis is orthonormal)."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    return DCT_MATRIX.T @ coeffs @ DCT_MATRIX


def quantize(coeff: np.ndarray | float, step: np.ndarray | float) -> np.ndarray:
    """Index floor(c / q + 0.5); broadcasts over arrays."""
    step_arr = np.asarray(step, dtype=np.float64)
    if np.any(step_arr <= 0):
        raise ValueError("Quantization step must be positive")
    return np.floor(np.asarray(coeff, dtype=np.float64) / step_arr + 0.5).astype(np.int64)


def dequantize(index: np.ndarray | int, step: np.ndarray | float) -> np.ndarray:
    return np.asarray(index, dtype=np.float64) * np.asarray(step, dtype=np.float64)


def to_zigzag(block: np.ndarray) -> np.ndarray:
    """(..., 8, 8) natural order -> (..., 64) zig-zag order."""
    block = np.asarray(block)
    return block.reshape(*block.shape[:-2], 64)[..., ZIGZAG]


def from_zigzag(vector: np.ndarray) -> np.ndarray:
    """(..., 64) zig-zag order -> (..., 8, 8) natural order."""
    vector = np.asarray(vector)
    return vector[..., NATURAL_TO_ZIGZAG].reshape(*vector.shape[:-1], 8, 8)


@dataclass(frozen=True)
class BlockGrid:
    """
    Non-overlapping 8×8 tiling of one image plane.

    ``blocks`` has shape (block_rows, block_cols, 8, 8); the plane was padded
    on the right and bottom by edge replication, which ``pad_right`` and
    ``pad_bottom`` record.
    """

    blocks: np.ndarray
    width: int
    height: int
    pad_right: int
    pad_bottom: int

    @property
    def block_rows(self) -> int:
        return int(self.blocks.shape[0])

    @property
    def block_cols(self) -> int:
        return int(self.blocks.shape[1])


def pad_to_blocks(plane: np.ndarray) -> np.ndarray:
    """Replicate the last row/column until both sides are multiples of 8."""
    height, width = plane.shape
    pad_bottom = -height % BLOCK
    pad_right = -width % BLOCK
    if pad_bottom == 0 and pad_right == 0:
        return np.asarray(plane, dtype=np.float64)
    plane = np.asarray(plane, dtype=np.float64)
    return np.pad(plane, ((0, pad_bottom), (0, pad_right)), mode="edge")


def plane_to_blocks(plane: np.ndarray) -> np.ndarray:
    """(8R, 8C) plane -> (R, C, 8, 8) blocks; the plane must be block-aligned."""
    height, width = plane.shape
    if height % BLOCK or width % BLOCK:
        raise ValueError(f"Plane {plane.shape} is not aligned to the 8×8 lattice")
    return plane.reshape(height // BLOCK, BLOCK, width // BLOCK, BLOCK).swapaxes(1, 2)


def blocks_to_plane(blocks: np.ndarray) -> np.ndarray:
    rows, cols = blocks.shape[:2]
    return blocks.swapaxes(1, 2).reshape(rows * BLOCK, cols * BLOCK)


def extract_blocks(img: PixelImage | np.ndarray, channel: int = 0) -> BlockGrid:
    plane = img.plane(channel) if isinstance(img, PixelImage) else np.asarray(img, dtype=np.float64)
    if plane.ndim != 2:
        raise ValueError(f"Expected a 2-D plane, got shape {plane.shape}")
    height, width = plane.shape
    padded = pad_to_blocks(plane)
    return BlockGrid(
        blocks=plane_to_blocks(padded).copy(),
        width=width,
        height=height,
        pad_right=padded.shape[1] - width,
        pad_bottom=padded.shape[0] - height,
    )


def assemble_blocks(grid: BlockGrid, crop: bool = True) -> PixelImage:
    """Inverse of ``extract_blocks``; ``crop=False`` keeps the padding."""
    plane = blocks_to_plane(grid.blocks)
    if crop:
        plane = plane[: grid.height, : grid.width]
    return PixelImage(samples=plane, color_space=ColorSpace.GRAY)
