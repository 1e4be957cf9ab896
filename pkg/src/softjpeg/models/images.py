"""
Numeric containers shared by every module.

These hold numpy arrays, so they are frozen dataclasses rather than pydantic
models; validation happens in ``__post_init__``. Parameter objects (patch
specs, operators, configs) live in ``schemas.py``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from softjpeg.codec.tables import NATURAL_TO_ZIGZAG, ZIGZAG
from softjpeg.exceptions import GeometryMismatchError


class ColorSpace(str, Enum):
    """How the channels of a PixelImage are to be read."""

    GRAY = "gray"
    RGB = "rgb"
    YCBCR = "ycbcr"


@dataclass(frozen=True)
class QuantTable:
    """
    One JPEG quantization table.

    ``entries`` are the 64 steps q_k in zig-zag order, exactly as a DQT
    segment carries them.
    """

    entries: tuple[int, ...]
    table_id: int = 0

    def __post_init__(self) -> None:
        entries = tuple(int(v) for v in self.entries)
        if len(entries) != 64:
            raise ValueError(f"Quantization table needs 64 entries, got {len(entries)}")
        if any(v < 1 or v > 255 for v in entries):
            raise ValueError("Quantization steps must lie in [1, 255]")
        if not 0 <= self.table_id <= 3:
            raise ValueError(f"Table slot must be 0-3, got {self.table_id}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_natural(cls, steps: np.ndarray, table_id: int = 0) -> QuantTable:
        flat = np.asarray(steps).reshape(64)
        return cls(entries=tuple(int(v) for v in flat[ZIGZAG]), table_id=table_id)

    def natural(self) -> np.ndarray:
        """Steps as an 8×8 float matrix in natural (row-major) order."""
        zz = np.asarray(self.entries, dtype=np.float64)
        return zz[NATURAL_TO_ZIGZAG].reshape(8, 8)


@dataclass(frozen=True)
class PixelImage:
    """
    Real-valued samples with geometry metadata.

    ``samples`` always has shape (height, width, channels); channels is 1 or 3.
    The nominal range is [0, 255] but values outside it are allowed so that
    the restoration pipeline can carry unclamped estimates.
    """

    samples: np.ndarray
    color_space: ColorSpace = ColorSpace.GRAY

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim == 2:
            samples = samples[:, :, np.newaxis]
        if samples.ndim != 3 or samples.shape[2] not in (1, 3):
            raise ValueError(f"Expected (H, W, 1|3) samples, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise ValueError("PixelImage samples must be finite")
        if (samples.shape[2] == 1) != (self.color_space == ColorSpace.GRAY):
            raise ValueError(
                f"{samples.shape[2]} channel(s) do not match color space {self.color_space.value}"
            )
        object.__setattr__(self, "samples", samples)

    @classmethod
    def from_array(cls, array: np.ndarray, color_space: ColorSpace | None = None) -> PixelImage:
        array = np.asarray(array, dtype=np.float64)
        if color_space is None:
            gray = array.ndim == 2 or array.shape[2] == 1
            color_space = ColorSpace.GRAY if gray else ColorSpace.RGB
        return cls(samples=array, color_space=color_space)

    @property
    def height(self) -> int:
        return int(self.samples.shape[0])

    @property
    def width(self) -> int:
        return int(self.samples.shape[1])

    @property
    def channels(self) -> int:
        return int(self.samples.shape[2])

    def plane(self, channel: int = 0) -> np.ndarray:
        return self.samples[:, :, channel]

    def to_uint8(self) -> np.ndarray:
        """Round half away from zero and clamp to 8 bits; (H, W) for gray."""
        rounded = np.sign(self.samples) * np.floor(np.abs(self.samples) + 0.5)
        out = np.clip(rounded, 0, 255).astype(np.uint8)
        return out[:, :, 0] if self.channels == 1 else out

    def require_same_geometry(self, other: PixelImage) -> None:
        if self.samples.shape != other.samples.shape:
            raise GeometryMismatchError(
                f"Image shapes differ: {self.samples.shape} vs {other.samples.shape}"
            )


@dataclass(frozen=True)
class ComponentCoefficients:
    """Quantized DCT indices of one color component."""

    component_id: int
    h_sampling: int
    v_sampling: int
    quant_table_id: int
    # (block_rows, block_cols, 64) integer indices γ_i in zig-zag order
    blocks: np.ndarray

    def __post_init__(self) -> None:
        blocks = np.asarray(self.blocks)
        if blocks.ndim != 3 or blocks.shape[2] != 64:
            raise ValueError(f"Expected (rows, cols, 64) blocks, got shape {blocks.shape}")
        if not np.issubdtype(blocks.dtype, np.integer):
            raise ValueError("Quantized indices must be integers")
        object.__setattr__(self, "blocks", blocks.astype(np.int32, copy=False))

    @property
    def block_rows(self) -> int:
        return int(self.blocks.shape[0])

    @property
    def block_cols(self) -> int:
        return int(self.blocks.shape[1])

    def natural_blocks(self) -> np.ndarray:
        """Indices as (rows, cols, 8, 8) in natural order."""
        return self.blocks[:, :, NATURAL_TO_ZIGZAG].reshape(self.block_rows, self.block_cols, 8, 8)


@dataclass(frozen=True)
class CoefficientImage:
    """
    Everything a baseline JPEG bitstream carries about the picture: the
    quantized indices of every block and the quantization tables.
    """

    width: int
    height: int
    components: tuple[ComponentCoefficients, ...]
    quant_tables: dict[int, QuantTable] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError("Image dimensions must be positive")
        if len(self.components) not in (1, 3):
            raise ValueError(f"Expected 1 or 3 components, got {len(self.components)}")
        object.__setattr__(self, "components", tuple(self.components))
        for index, comp in enumerate(self.components):
            if comp.quant_table_id not in self.quant_tables:
                raise ValueError(
                    f"Component {comp.component_id} refers to missing table {comp.quant_table_id}"
                )
            width, height = self.component_size(index)
            expected = (math.ceil(height / 8), math.ceil(width / 8))
            if (comp.block_rows, comp.block_cols) != expected:
                raise GeometryMismatchError(
                    f"Component {comp.component_id} has {comp.block_rows}x{comp.block_cols} "
                    f"blocks, expected {expected[0]}x{expected[1]}"
                )

    @property
    def max_h_sampling(self) -> int:
        return max(c.h_sampling for c in self.components)

    @property
    def max_v_sampling(self) -> int:
        return max(c.v_sampling for c in self.components)

    def component_size(self, index: int) -> tuple[int, int]:
        """(width, height) of a component after subsampling."""
        comp = self.components[index]
        width = math.ceil(self.width * comp.h_sampling / self.max_h_sampling)
        height = math.ceil(self.height * comp.v_sampling / self.max_v_sampling)
        return width, height

    def table_for(self, index: int) -> QuantTable:
        return self.quant_tables[self.components[index].quant_table_id]
