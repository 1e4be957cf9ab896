"""
Parameter Models for softjpeg

These Pydantic models describe every knob of the decoder: patch grouping,
the degradation operator, analysis signals and the solver schedule.

🎓 LEARNING NOTE: Frozen Pydantic models
Configs are validated once on construction and are immutable afterwards, so a
single RestorationConfig can be shared between runs and threads safely.
Numeric arrays never live here; see ``images.py`` for those.
"""

from __future__ import annotations

import math
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Subsampling(str, Enum):
    """Chroma subsampling of encoded color images."""
    S444 = "444"
    S420 = "420"


class ThresholdMode(str, Enum):
    """Singular-value thresholding rule."""
    SOFT = "soft"
    HARD = "hard"


class PatchClass(str, Enum):
    """Local structure of an anchor patch."""
    EDGE = "edge"
    SMOOTH = "smooth"
    TEXTURE = "texture"


class EdgeOrientation(str, Enum):
    """Direction along which an edge runs."""
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"
    DIAGONAL = "diagonal"
    ANTI_DIAGONAL = "anti_diagonal"


class ErrorBand(str, Enum):
    """Perceptual effect of quantizing one DCT coefficient."""
    NEGLIGIBLE = "negligible"
    HIDDEN = "hidden"
    VISIBLE = "visible"


class SignalKind(str, Enum):
    """1-D model signals used by the quantization-error analysis."""
    RAMP = "ramp"
    STEP = "step"
    BLURRED_STEP = "blurred_step"


class DegradationKind(str, Enum):
    """Known linear degradations H."""
    IDENTITY = "identity"
    GAUSSIAN_BLUR = "gaussian_blur"


class PatchSpec(BaseModel):
    """
    Geometry and similarity rules of patch grouping.

    A window of side S covers offsets -S//2 .. +S//2 around the anchor, so the
    effective window is always odd-sided.
    """
    model_config = ConfigDict(frozen=True)

    patch_size: int = Field(8, ge=4, description="Patch side p; patch dimension m = p*p")
    group_size: int = Field(60, ge=1, description="Patches per group M")
    stride: int = Field(4, ge=1, description="Anchor grid step in pixels")
    search_window: int = Field(60, ge=1, description="Window side for normal anchors")
    smooth_window: int = Field(10, ge=1, description="Window side for smooth anchors")
    smooth_variance: float = Field(3.0, ge=0.0, description="Smooth-anchor variance cut")
    edge_energy: float = Field(900.0, ge=0.0, description="Mean squared-gradient floor for edges")
    edge_ratio: float = Field(4.0, gt=1.0, description="Edge eigenvalue ratio")
    row_penalty: float = Field(1.5, ge=1.0, description="Same row/column factor")
    prefilter_sigma: float = Field(0.8, ge=0.0, description="Prefilter std, iteration 1")

    @model_validator(mode="after")
    def _check_geometry(self) -> PatchSpec:
        if self.group_size < self.patch_size:
            raise ValueError("group_size must be at least patch_size")
        for name in ("search_window", "smooth_window"):
            if self.window_side(getattr(self, name)) < self.patch_size:
                raise ValueError(f"{name} must span at least one patch side")
        return self

    @property
    def patch_dim(self) -> int:
        return self.patch_size * self.patch_size

    @staticmethod
    def window_side(window: int) -> int:
        """Effective (odd) side of a search window."""
        return 2 * (window // 2) + 1


class DegradationOperator(BaseModel):
    """
    Declarative description of the known degradation H.

    The inverse is a Tikhonov-regularized filter; ``eta`` is its weight.
    """
    model_config = ConfigDict(frozen=True)

    kind: DegradationKind = DegradationKind.IDENTITY
    sigma: float = Field(0.0, ge=0.0, description="Gaussian std in pixels")
    radius: int | None = Field(None, ge=1, description="Kernel half-width; default ceil(3 sigma)")
    eta: float = Field(1e-2, ge=0.0, description="Inverse regularization weight")

    @model_validator(mode="after")
    def _check_blur(self) -> DegradationOperator:
        if self.kind == DegradationKind.GAUSSIAN_BLUR and self.sigma <= 0:
            raise ValueError("Gaussian blur needs sigma > 0")
        return self

    @classmethod
    def identity(cls) -> DegradationOperator:
        return cls()

    @classmethod
    def gaussian_blur(
        cls, sigma: float, eta: float = 1e-2, radius: int | None = None
    ) -> DegradationOperator:
        return cls(kind=DegradationKind.GAUSSIAN_BLUR, sigma=sigma, eta=eta, radius=radius)

    @property
    def kernel_radius(self) -> int:
        if self.radius is not None:
            return self.radius
        return max(1, math.ceil(3.0 * self.sigma))


class ModelSignal(BaseModel):
    """A ramp, step or blurred step used by the analysis module."""
    model_config = ConfigDict(frozen=True)

    kind: SignalKind
    amplitude: float = Field(..., gt=0.0, description="a, gray levels")
    length: int = Field(8, ge=2, description="Sample count N")
    phase: float = Field(0.5, ge=0.0, le=1.0, description="Step position r = m/N")
    sigma: float = Field(0.0, ge=0.0, description="Blur std in normalized units")


class ThresholdPlan(BaseModel):
    """Per-iteration (lambda, beta) schedule of the solver."""
    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(..., ge=0.0, description="Compression RMSE in gray levels")
    c_lambda: float = Field(..., gt=0.0)
    iterations: int = Field(..., ge=1)
    lambdas: tuple[float, ...]
    betas: tuple[float, ...]

    @model_validator(mode="after")
    def _check_lengths(self) -> ThresholdPlan:
        if len(self.lambdas) != self.iterations or len(self.betas) != self.iterations:
            raise ValueError("Schedule length must equal the iteration count")
        if any(lam < 0 for lam in self.lambdas):
            raise ValueError("Thresholds must be non-negative")
        if any(not 0.0 < beta <= 0.5 for beta in self.betas):
            raise ValueError("Clipping widths must lie in (0, 0.5]")
        return self


class RestorationConfig(BaseModel):
    """Everything the restoration loop needs besides the data and H."""
    model_config = ConfigDict(frozen=True)

    iterations: int = Field(4, ge=1, description="K")
    c_lambda: float = Field(3.0, gt=0.0)
    beta_mid: float = Field(0.2, gt=0.0, le=0.5)
    beta_final: float = Field(0.5, gt=0.0, le=0.5)
    beta_guard: float = Field(1e-6, ge=0.0, lt=0.1, description="Subtracted from each clip width")
    threshold_mode: ThresholdMode = ThresholdMode.HARD
    patch: PatchSpec = Field(default_factory=PatchSpec)
    epsilon: float | None = Field(None, ge=0.0, description="Fixed RMSE; None estimates it")
    feedback_delta: float | None = Field(None, ge=0.0, le=1.0, description="None disables feedback")
    restore_chroma: bool = True
