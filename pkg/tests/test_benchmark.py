"""Tests for benchmark bookkeeping and a tiny end-to-end evaluation."""

import json
from datetime import datetime

import numpy as np
import pytest

from softjpeg.codec.raster import write_raster
from softjpeg.evaluation.benchmark import (
    BenchmarkCase,
    BenchmarkEvaluator,
    BenchmarkResult,
    BenchmarkRun,
    ExperimentTracker,
    bundled_cases,
    bundled_image,
    load_cases,
)
from softjpeg.models.images import ColorSpace


def _result(name: str, qf: int, hard: float, soft: float) -> BenchmarkResult:
    return BenchmarkResult(
        name=name,
        qf=qf,
        hard_psnr=hard,
        soft_psnr=soft,
        hard_ssim=0.80,
        soft_ssim=0.82,
        epsilon_blind=4.4,
        epsilon_oracle=4.0,
        seconds=1.0,
    )


@pytest.fixture
def run() -> BenchmarkRun:
    return BenchmarkRun(
        run_id="20240101_000000",
        timestamp=datetime(2024, 1, 1),
        config={"qfs": [10, 25]},
        results=[
            _result("a", 10, 28.0, 29.0),
            _result("b", 10, 30.0, 29.5),
            _result("c", 10, 26.0, 27.2),
            _result("a", 25, 33.0, 33.4),
        ],
    )


class TestSummary:
    def test_gains(self):
        r = _result("a", 10, 28.0, 29.5)
        assert r.psnr_gain == pytest.approx(1.5)
        assert r.ssim_gain == pytest.approx(0.02)

    def test_per_qf_medians(self, run):
        summary = run.summary()
        assert summary["num_results"] == 4
        low = summary["per_qf"]["10"]
        assert low["num_images"] == 3
        assert low["median_hard_psnr"] == pytest.approx(28.0)
        assert low["median_psnr_gain"] == pytest.approx(1.0)
        assert low["positive_psnr_gains"] == 2
        assert low["median_epsilon_error"] == pytest.approx(0.1)


class TestTracker:
    def test_log_and_compare(self, tmp_path, run):
        tracker = ExperimentTracker(tmp_path / "experiments")
        path = tracker.log_run(run, notes="baseline")
        data = json.loads(open(path, encoding="utf-8").read())
        assert data["notes"] == "baseline"
        assert len(data["results"]) == 4
        assert data["results"][0]["psnr_gain"] == pytest.approx(1.0)

        compared = tracker.compare_runs([run.run_id, "missing"])
        assert [r["run_id"] for r in compared["runs"]] == [run.run_id]


def test_load_cases_reads_rasters(tmp_path, gray_image, color_image):
    write_raster(gray_image, tmp_path / "b.pgm")
    write_raster(color_image, tmp_path / "a.ppm")
    (tmp_path / "notes.txt").write_text("ignored")
    cases = load_cases(tmp_path)
    assert [c.name for c in cases] == ["a", "b"]


def test_load_cases_missing_folder(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_cases(tmp_path / "nope")



class TestBundledImages:
    def test_gray_picture_is_resized_to_eight_bits(self):
        img = bundled_image("camera", 64)
        assert img.samples.shape == (64, 64, 1)
        assert img.color_space == ColorSpace.GRAY
        assert img.samples.min() >= 0 and img.samples.max() <= 255
        assert np.array_equal(img.samples, np.round(img.samples))

    def test_color_picture_keeps_three_channels(self):
        (case,) = bundled_cases(["astronaut"], size=32)
        assert case.name == "astronaut"
        assert case.image.color_space == ColorSpace.RGB
        assert case.image.samples.shape == (32, 32, 3)


@pytest.mark.slow
def test_evaluator_runs_end_to_end(gray_image, small_config):
    evaluator = BenchmarkEvaluator(small_config)
    run = evaluator.evaluate([BenchmarkCase(name="synthetic", image=gray_image)], [25])
    (result,) = run.results
    assert result.qf == 25
    assert 20.0 < result.hard_psnr < 50.0
    assert result.epsilon_oracle > 0
    assert run.config["restoration"]["iterations"] == small_config.iterations
