"""Tests for the softjpeg command line."""

import logging

import numpy as np
import pytest

from softjpeg import cli
from softjpeg.analysis.report import CSV_HEADER
from softjpeg.codec.decode import hard_decode
from softjpeg.codec.jpeg import read_jpeg
from softjpeg.codec.raster import read_raster, write_raster


@pytest.fixture(autouse=True)
def restore_root_logging():
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture
def small_patches(monkeypatch):
    """Shrink the grouping so CLI runs stay fast on 64×64 inputs."""
    monkeypatch.setattr(cli.settings, "group_size", 16)
    monkeypatch.setattr(cli.settings, "search_window", 20)


@pytest.fixture
def gray_file(tmp_path, gray_image):
    path = tmp_path / "gray.pgm"
    write_raster(gray_image, path)
    return path


@pytest.fixture
def gray_jpeg(tmp_path, gray_file):
    path = tmp_path / "gray.jpg"
    assert cli.main(["encode", str(gray_file), str(path), "--qf", "30"]) == cli.EXIT_OK
    return path


class TestCodecCommands:
    def test_encode_writes_baseline_jpeg(self, gray_jpeg):
        data = gray_jpeg.read_bytes()
        assert data[:2] == b"\xff\xd8"
        assert data[-2:] == b"\xff\xd9"

    def test_decode_matches_library(self, tmp_path, gray_jpeg):
        out = tmp_path / "decoded.pgm"
        assert cli.main(["decode", str(gray_jpeg), str(out)]) == cli.EXIT_OK
        expected = hard_decode(read_jpeg(gray_jpeg)).to_uint8()
        np.testing.assert_array_equal(read_raster(out).to_uint8(), expected)

    def test_encode_with_restart_markers(self, tmp_path, gray_file):
        out = tmp_path / "rst.jpg"
        argv = ["encode", str(gray_file), str(out), "--qf", "60", "--restart-interval", "3"]
        assert cli.main(argv) == cli.EXIT_OK
        assert b"\xff\xdd" in out.read_bytes()
        assert read_jpeg(out).width == 64

    def test_color_encode_decode(self, tmp_path, color_image):
        src, jpg, out = tmp_path / "c.ppm", tmp_path / "c.jpg", tmp_path / "d.ppm"
        write_raster(color_image, src)
        assert cli.main(["encode", str(src), str(jpg), "--qf", "75", "--subsampling", "444"]) == 0
        assert cli.main(["decode", str(jpg), str(out)]) == 0
        assert read_raster(out).samples.shape == (48, 40, 3)


class TestRestorationCommands:
    def test_soft_decode(self, tmp_path, gray_jpeg, small_patches):
        out = tmp_path / "soft.pgm"
        argv = ["soft-decode", str(gray_jpeg), str(out), "--k", "2", "--epsilon", "4"]
        assert cli.main(argv) == cli.EXIT_OK
        assert read_raster(out).samples.shape == (64, 64, 1)

    def test_soft_decode_with_oracle(self, tmp_path, gray_file, gray_jpeg, small_patches):
        out = tmp_path / "oracle.pgm"
        argv = ["soft-decode", str(gray_jpeg), str(out), "--k", "1", "--oracle", str(gray_file)]
        assert cli.main(argv) == cli.EXIT_OK
        assert out.exists()

    def test_restore_with_blur(self, tmp_path, gray_jpeg, small_patches):
        out = tmp_path / "restored.pgm"
        argv = ["restore", str(gray_jpeg), str(out), "--blur-sigma", "1.0", "--k", "1"]
        assert cli.main(argv) == cli.EXIT_OK
        assert out.exists()

    def test_epsilon_and_oracle_are_exclusive(self, tmp_path, gray_file, gray_jpeg):
        argv = ["soft-decode", str(gray_jpeg), str(tmp_path / "x.pgm"), "--epsilon", "2"]
        assert cli.main([*argv, "--oracle", str(gray_file)]) == cli.EXIT_USAGE

    def test_invalid_beta_is_a_usage_error(self, tmp_path, gray_jpeg):
        argv = ["soft-decode", str(gray_jpeg), str(tmp_path / "x.pgm"), "--beta-final", "0.9"]
        assert cli.main(argv) == cli.EXIT_USAGE


class TestReportCommands:
    def test_metrics_of_identical_files(self, gray_file, capsys):
        assert cli.main(["metrics", str(gray_file), str(gray_file)]) == cli.EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines == ["psnr=inf", "ssim=1.000000"]

    def test_metrics_of_decoded_file(self, tmp_path, gray_file, gray_jpeg, capsys):
        out = tmp_path / "decoded.pgm"
        cli.main(["decode", str(gray_jpeg), str(out)])
        capsys.readouterr()
        cli.main(["metrics", str(gray_file), str(out)])
        psnr_line, ssim_line = capsys.readouterr().out.splitlines()
        assert 20.0 < float(psnr_line.removeprefix("psnr=")) < 50.0
        assert 0.0 < float(ssim_line.removeprefix("ssim=")) < 1.0

    def test_analyze_ramp_to_stdout(self, capsys):
        assert cli.main(["analyze", "ramp", "--qf", "25"]) == cli.EXIT_OK
        out = capsys.readouterr().out.splitlines()
        assert out[0] == ",".join(CSV_HEADER)
        assert len(out) > 9

    def test_analyze_blurred_step_to_file(self, tmp_path):
        path = tmp_path / "step.csv"
        argv = ["analyze", "blurred-step", "--n", "64", "--phase", "0.3125", "--sigma", "0.05"]
        assert cli.main([*argv, "--csv", str(path)]) == cli.EXIT_OK
        rows = path.read_text().splitlines()
        assert rows[0] == ",".join(CSV_HEADER)
        assert len(rows) == 65


class TestExitCodes:
    def test_missing_input_is_io_error(self, tmp_path):
        argv = ["encode", str(tmp_path / "missing.pgm"), str(tmp_path / "o.jpg"), "--qf", "50"]
        assert cli.main(argv) == cli.EXIT_IO

    def test_bad_quality_is_usage_error(self, tmp_path, gray_file):
        argv = ["encode", str(gray_file), str(tmp_path / "o.jpg"), "--qf", "0"]
        assert cli.main(argv) == cli.EXIT_USAGE

    def test_corrupt_jpeg_is_format_error(self, tmp_path):
        bad = tmp_path / "bad.jpg"
        bad.write_bytes(b"definitely not a jpeg")
        assert cli.main(["decode", str(bad), str(tmp_path / "o.pgm")]) == cli.EXIT_FORMAT

    def test_truncated_jpeg_is_format_error(self, tmp_path, gray_jpeg):
        cut = tmp_path / "cut.jpg"
        cut.write_bytes(gray_jpeg.read_bytes()[:200])
        assert cli.main(["decode", str(cut), str(tmp_path / "o.pgm")]) == cli.EXIT_FORMAT

    def test_unknown_command(self):
        assert cli.main(["explode"]) == cli.EXIT_USAGE

    def test_missing_required_option(self, gray_file, tmp_path):
        assert cli.main(["encode", str(gray_file), str(tmp_path / "o.jpg")]) == cli.EXIT_USAGE
