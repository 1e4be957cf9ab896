"""
softjpeg Configuration

Loads solver defaults from environment variables (prefix ``SOFTJPEG_``) or a
``.env`` file and hands out validated parameter models.

🎓 LEARNING NOTE: Settings vs. parameter models
- ``Settings`` is the flat, environment-facing layer (strings and numbers)
- ``PatchSpec`` / ``RestorationConfig`` are the immutable objects the library
  actually consumes; ``Settings`` builds them
- Nothing here is required: every field has a working default
"""

from __future__ import annotations

from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from softjpeg.models.schemas import PatchSpec, RestorationConfig, ThresholdMode

# Determine project root (parent of src directory)
PROJECT_ROOT = Path(__file__).resolve().parents[2]


class Settings(BaseSettings):
    """Solver and tooling defaults."""

    model_config = SettingsConfigDict(
        env_prefix="SOFTJPEG_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    log_level: str = Field(default="INFO")
    experiments_dir: str = Field(default=str(PROJECT_ROOT / "experiments"))
    test_images_dir: str = Field(default=str(PROJECT_ROOT / "data" / "test_images"))

    # Solver schedule
    iterations: int = 4
    c_lambda: float = 3.0
    beta_mid: float = 0.2
    beta_final: float = 0.5
    beta_guard: float = 1e-6
    threshold_mode: ThresholdMode = ThresholdMode.HARD
    error_floor_ratio: float = 0.125  # C_eps = q_k / 8
    feedback_delta: float | None = None
    restore_chroma: bool = True

    # Patch grouping
    patch_size: int = 8
    group_size: int = 60
    stride: int = 4
    search_window: int = 60
    smooth_window: int = 10
    smooth_variance: float = 3.0
    edge_energy: float = 900.0  # 30^2 per pixel^2
    edge_ratio: float = 4.0
    row_penalty: float = 1.5
    prefilter_sigma: float = 0.8

    # Degradation
    blur_eta: float = 1e-2

    # Metrics
    metrics_all_channels: bool = False

    def patch_spec(self) -> PatchSpec:
        return PatchSpec(
            patch_size=self.patch_size,
            group_size=self.group_size,
            stride=self.stride,
            search_window=self.search_window,
            smooth_window=self.smooth_window,
            smooth_variance=self.smooth_variance,
            edge_energy=self.edge_energy,
            edge_ratio=self.edge_ratio,
            row_penalty=self.row_penalty,
            prefilter_sigma=self.prefilter_sigma,
        )

    def restoration_config(self, **overrides: object) -> RestorationConfig:
        """Build a RestorationConfig; keyword overrides win over settings."""
        values: dict[str, object] = {
            "iterations": self.iterations,
            "c_lambda": self.c_lambda,
            "beta_mid": self.beta_mid,
            "beta_final": self.beta_final,
            "beta_guard": self.beta_guard,
            "threshold_mode": self.threshold_mode,
            "patch": self.patch_spec(),
            "feedback_delta": self.feedback_delta,
            "restore_chroma": self.restore_chroma,
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return RestorationConfig(**values)


# Global settings instance
settings = Settings()
