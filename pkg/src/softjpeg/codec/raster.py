"""Lossless 8-bit raster I/O (PGM/PPM, or anything else Pillow reads losslessly)."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from softjpeg.exceptions import RasterFormatError
from softjpeg.models.images import ColorSpace, PixelImage

_MODES = {"L": ColorSpace.GRAY, "RGB": ColorSpace.RGB}


def read_raster(path: str | Path) -> PixelImage:
    """Load an 8-bit gray (P5) or RGB (P6) raster."""
    with Image.open(path) as handle:
        if handle.mode not in _MODES:
            raise RasterFormatError(f"{path}: mode {handle.mode!r} is not 8-bit gray or RGB")
        array = np.asarray(handle, dtype=np.float64)
        return PixelImage(samples=array, color_space=_MODES[handle.mode])


def write_raster(img: PixelImage, path: str | Path) -> None:
    """Round half away from zero, clamp and save; format follows the extension."""
    if img.color_space == ColorSpace.YCBCR:
        raise RasterFormatError("Convert YCbCr samples to RGB before export")
    Image.fromarray(img.to_uint8()).save(path)
