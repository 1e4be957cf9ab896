"""Tests for environment-driven settings."""

import pytest
from pydantic import ValidationError

from softjpeg.config import Settings
from softjpeg.models.schemas import PatchSpec, RestorationConfig, ThresholdMode


def test_defaults_match_parameter_models():
    s = Settings(_env_file=None)
    assert s.patch_spec() == PatchSpec()
    assert s.restoration_config() == RestorationConfig()


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("SOFTJPEG_ITERATIONS", "6")
    monkeypatch.setenv("SOFTJPEG_THRESHOLD_MODE", "soft")
    monkeypatch.setenv("SOFTJPEG_GROUP_SIZE", "32")
    cfg = Settings(_env_file=None).restoration_config()
    assert cfg.iterations == 6
    assert cfg.threshold_mode == ThresholdMode.SOFT
    assert cfg.patch.group_size == 32


def test_keyword_overrides_win_and_none_is_ignored():
    cfg = Settings(_env_file=None).restoration_config(iterations=2, epsilon=3.5, c_lambda=None)
    assert cfg.iterations == 2
    assert cfg.epsilon == 3.5
    assert cfg.c_lambda == 3.0


def test_invalid_values_are_rejected():
    with pytest.raises(ValidationError):
        Settings(_env_file=None).restoration_config(beta_final=0.8)
    with pytest.raises(ValidationError):
        Settings(_env_file=None, group_size=4).patch_spec()


def test_error_floor_is_an_analysis_setting(monkeypatch):
    monkeypatch.setenv("SOFTJPEG_ERROR_FLOOR_RATIO", "0.25")
    s = Settings(_env_file=None)
    assert s.error_floor_ratio == 0.25
    assert "error_floor_ratio" not in RestorationConfig.model_fields
    assert s.restoration_config() == RestorationConfig()
