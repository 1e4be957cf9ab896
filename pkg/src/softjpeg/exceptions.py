"""Project-level custom exception types."""

from __future__ import annotations


class SoftJpegError(Exception):
    """Base exception for project-specific failures."""


# --- codec -------------------------------------------------------------------


class CodecError(SoftJpegError):
    """Raised when a JPEG stream or raster file cannot be read or written."""


class UnsupportedMarkerError(CodecError):
    """Valid JPEG features outside baseline sequential: progressive, arithmetic or 12-bit."""


class TruncatedStreamError(CodecError):
    """Raised when the stream ends before a segment or the entropy-coded data is complete."""


class CorruptHuffmanError(CodecError):
    """Raised when entropy-coded data does not decode with the declared Huffman tables."""


class InvalidQualityError(CodecError, ValueError):
    """Raised when a JPEG quality factor lies outside 1..100."""


class RasterFormatError(CodecError):
    """Raised when a raster file is not an 8-bit gray or RGB image."""


# --- geometry ----------------------------------------------------------------


class GeometryMismatchError(SoftJpegError, ValueError):
    """Raised when two images (or an image and a coefficient grid) disagree in shape."""


# --- patch engine ------------------------------------------------------------


class PatchEngineError(SoftJpegError):
    """Raised when patch grouping or aggregation fails."""


class CoverageHoleError(PatchEngineError):
    """Raised when aggregation leaves pixels that no patch covers."""


class InsufficientCandidatesError(PatchEngineError):
    """Raised when a search window holds fewer admissible candidates than the group size."""


# --- low rank ----------------------------------------------------------------


class LowRankError(SoftJpegError):
    """Raised when low-rank estimation of a patch group fails."""


class NonFiniteError(LowRankError, ValueError):
    """Raised when a matrix handed to the SVD holds NaN or infinite entries."""


# --- analysis ----------------------------------------------------------------


class AnalysisError(SoftJpegError):
    """Raised when a quantization-error model is evaluated outside its domain."""


class NonOddK0Error(AnalysisError, ValueError):
    """Raised when the zero-AC amplitude bound is asked for an even or non-positive frequency."""


# --- degradation -------------------------------------------------------------


class DegradationError(SoftJpegError):
    """Raised when a degradation operator is misconfigured."""


class NonInvertibleConfigError(DegradationError, ValueError):
    """Raised when a blur operator has no usable regularized inverse (eta <= 0)."""
