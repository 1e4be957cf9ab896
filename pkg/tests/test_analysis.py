"""Tests for the closed-form spectra of ramps and steps."""

import csv
import math

import numpy as np
import pytest

from softjpeg.analysis.model import (
    PUBLISHED_RAMP_THRESHOLD,
    blurred_step_spectrum,
    classify_error_band,
    ramp_samples,
    ramp_spectrum_approx,
    ramp_zero_ac_bound,
    ramp_zero_ac_search,
    signal_samples,
    sine_integral,
    step_reconstruction,
)
from softjpeg.analysis.report import (
    CSV_HEADER,
    emit_model_csv,
    horizontal_steps,
    ramp_bound_summary,
)
from softjpeg.codec.quantization import luminance_table
from softjpeg.exceptions import NonOddK0Error
from softjpeg.models.schemas import ErrorBand, ModelSignal, SignalKind
from softjpeg.transform import dct1d


def _riemann_si(z: float, points: int = 1_000_000) -> float:
    """Midpoint rule for ∫₀^z sinc(u) du."""
    h = z / points
    u = (np.arange(points) + 0.5) * h
    return float(np.sum(np.sinc(u)) * h)


class TestRampSpectrum:
    def test_dc_is_half_area(self) -> None:
        assert ramp_spectrum_approx(10.0, 8, 0) == pytest.approx(40.0)

    @pytest.mark.parametrize("k", [2, 4, 6])
    def test_even_ac_vanishes(self, k) -> None:
        assert abs(ramp_spectrum_approx(10.0, 8, k)) < 1e-12

    def test_first_ac_close_to_exact(self) -> None:
        """The rising ramp a(n + 1/2)/N has the same AC magnitude."""
        rising = 8.0 * (np.arange(8) + 0.5) / 8
        exact = dct1d(rising)[1]
        approx = ramp_spectrum_approx(8.0, 8, 1)
        assert abs(abs(exact) - approx) / abs(exact) < 0.05
        assert dct1d(ramp_samples(8.0, 8))[1] == pytest.approx(-exact)

    def test_approximation_improves_with_length(self) -> None:
        errors = []
        for length in (8, 16, 32):
            exact = dct1d(ramp_samples(8.0, length))[1]
            errors.append(abs(exact - ramp_spectrum_approx(8.0, length, 1)) / abs(exact))
        assert errors[0] > errors[1] > errors[2]


class TestRampBound:
    def test_algebraic_unit_threshold(self) -> None:
        assert ramp_zero_ac_bound(1, 4 * 8 / math.pi**2, 8) == pytest.approx(1.0)

    @pytest.mark.parametrize("k0", [0, 2, -1, 1.0])
    def test_rejects_non_odd_k0(self, k0) -> None:
        with pytest.raises(NonOddK0Error):
            ramp_zero_ac_bound(k0, 10.0, 8)

    def test_formula_agrees_with_search_at_qf25(self) -> None:
        q = float(luminance_table(25).natural()[0, 1])
        assert q == 22.0
        formula = ramp_zero_ac_bound(1, q, 8)
        search = ramp_zero_ac_search(1, q, 8)
        unit = abs(dct1d(ramp_samples(1.0, 8))[1])
        assert abs(formula - search) < q / unit

    def test_block_search_reproduces_quoted_threshold(self) -> None:
        summary = ramp_bound_summary(25)
        assert summary.search_block == pytest.approx(PUBLISHED_RAMP_THRESHOLD, abs=0.05)
        assert summary.search_1d == pytest.approx(summary.search_block * math.sqrt(2.0), abs=0.01)
        assert any(line.startswith("published_reference=") for line in summary.lines())


class TestSineIntegral:
    def test_limits(self) -> None:
        assert sine_integral(0.0) == 0.0
        assert sine_integral(math.inf) == 0.5
        assert sine_integral(-math.inf) == -0.5

    def test_odd_function(self) -> None:
        assert sine_integral(-1.7) == pytest.approx(-sine_integral(1.7))

    def test_against_riemann_sum(self) -> None:
        assert sine_integral(2.4) == pytest.approx(_riemann_si(2.4), abs=1e-9)

    @pytest.mark.parametrize("z", [0.3, 1.0, 5.5, 40.0])
    def test_against_scipy_sici(self, z: float) -> None:
        from scipy.special import sici

        assert sine_integral(z) == pytest.approx(sici(math.pi * z)[0] / math.pi, abs=1e-8)


class TestStepReconstruction:
    def test_aligned_edge_value(self) -> None:
        assert step_reconstruction(50.0, 0.3, 6.0, 0.0, aligned=True) == pytest.approx(
            50.0 * sine_integral(3.6)
        )

    def test_infinite_bandwidth_halves_the_edge(self) -> None:
        assert step_reconstruction(50.0, 0.3, math.inf, 0.0, aligned=True) == pytest.approx(25.0)

    def test_matches_riemann_oracle(self) -> None:
        expected = 50.0 * (_riemann_si(6 * 0.2) + _riemann_si(6 * 0.4))
        assert step_reconstruction(50.0, 0.3, 6.0, 0.1) == pytest.approx(expected, abs=1e-6)

    def test_rejects_non_positive_cutoff(self) -> None:
        with pytest.raises(ValueError):
            step_reconstruction(1.0, 0.5, 0.0, 0.0)

    def test_aligned_ringing_is_phase_invariant(self) -> None:
        amplitude, b = 50.0, 20.0
        for t in np.linspace(0.0, 0.3, 7):
            values = [
                step_reconstruction(amplitude, r, b, float(t), aligned=True)
                for r in np.linspace(0.3, 0.7, 9)
            ]
            assert (max(values) - min(values)) / amplitude < 0.02


class TestBlurredStep:
    def test_dc_of_sharp_step(self) -> None:
        assert blurred_step_spectrum(50.0, 0.3, 0.0, 8, 0) == pytest.approx(50.0 * 0.3 * 8)

    def test_sinc_zero(self) -> None:
        assert abs(blurred_step_spectrum(50.0, 0.5, 0.0, 8, 2)) < 1e-12

    def test_rejects_negative_sigma(self) -> None:
        with pytest.raises(ValueError):
            blurred_step_spectrum(1.0, 0.5, -0.1, 8, 1)

    @pytest.mark.parametrize("sigma", [0.0, 0.05, 0.1])
    def test_matches_discrete_convolution(self, sigma) -> None:
        length, phase = 64, 20 / 64
        signal = ModelSignal(
            kind=SignalKind.BLURRED_STEP, amplitude=50.0, length=length, phase=phase, sigma=sigma
        )
        exact = dct1d(signal_samples(signal))
        for k in range(1, 8):
            approx = blurred_step_spectrum(50.0, phase, sigma, length, k)
            assert abs(approx - exact[k]) <= 0.10 * abs(exact[k])

    def test_blur_never_increases_magnitude(self) -> None:
        k = np.arange(1, 16)
        previous = np.abs(blurred_step_spectrum(50.0, 0.3, 0.0, 16, k))
        for sigma in (0.02, 0.05, 0.1, 0.2):
            current = np.abs(blurred_step_spectrum(50.0, 0.3, sigma, 16, k))
            assert np.all(current <= previous + 1e-12)
            previous = current


class TestErrorBands:
    def test_strong_coefficient_is_hidden(self) -> None:
        assert classify_error_band(10.0, 10.0, 1.25) == ErrorBand.HIDDEN

    def test_zero_is_negligible(self) -> None:
        assert classify_error_band(0.0, 10.0, 1.25) == ErrorBand.NEGLIGIBLE

    def test_band_boundaries(self) -> None:
        q = 16.0
        floor = q / 8
        assert classify_error_band(floor - 1e-9, q, floor) == ErrorBand.NEGLIGIBLE
        assert classify_error_band(floor, q, floor) == ErrorBand.VISIBLE
        assert classify_error_band(-0.75 * q, q, floor) == ErrorBand.VISIBLE
        assert classify_error_band(0.75 * q + 1e-9, q, floor) == ErrorBand.HIDDEN

    def test_sweep_has_two_transitions(self) -> None:
        q = 16.0
        values = np.linspace(0.0, 2 * q, 2049)
        bands = [classify_error_band(v, q, q / 8) for v in values]
        changes = [values[i] for i in range(1, len(bands)) if bands[i] != bands[i - 1]]
        assert changes == pytest.approx([q / 8, 0.75 * q + values[1]])


class TestModelCsv:
    def test_ramp_rows(self, tmp_path) -> None:
        signal = ModelSignal(kind=SignalKind.RAMP, amplitude=8.0, length=8)
        path = emit_model_csv(signal, luminance_table(50), tmp_path / "ramp.csv")
        with path.open(newline="") as handle:
            rows = list(csv.reader(handle))
        assert tuple(rows[0]) == CSV_HEADER
        assert len(rows) == 9
        exact = dct1d(ramp_samples(8.0, 8))
        np.testing.assert_allclose([float(r[1]) for r in rows[1:]], exact, rtol=1e-9, atol=1e-9)

    @pytest.mark.parametrize("kind", [SignalKind.STEP, SignalKind.BLURRED_STEP])
    def test_step_variants(self, tmp_path, kind) -> None:
        signal = ModelSignal(kind=kind, amplitude=50.0, length=16, phase=0.25, sigma=0.05)
        path = emit_model_csv(signal, luminance_table(25), tmp_path / "step.csv")
        with path.open(newline="") as handle:
            rows = list(csv.DictReader(handle))
        assert len(rows) == 16
        assert {row["band"] for row in rows} <= {band.value for band in ErrorBand}

    def test_long_signals_reuse_last_horizontal_step(self) -> None:
        table = luminance_table(50)
        steps = horizontal_steps(table, 12)
        assert list(steps[:8]) == list(table.natural()[0])
        assert set(steps[8:]) == {table.natural()[0, 7]}
