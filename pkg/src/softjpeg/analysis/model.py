"""
Closed-form DCT spectra of simple 1-D signals and what quantization does to them.

LEARNING NOTE: Why model ramps and steps?
-----------------------------------------
Both signals are trivially sparse in the pixel domain (zero second
derivative, or a single jump) but dense in the DCT domain. Approximating the
unnormalized DCT-II by samples of the continuous Fourier transform gives
closed forms that explain the two classic JPEG artifacts:

- ramps lose all AC energy below an amplitude threshold -> blocking
- steps lose their high frequencies -> ringing with a phase-independent
  shape once aligned to the edge

All spectra here use the unnormalized convention of ``transform.dct1d``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.ndimage import gaussian_filter1d

from softjpeg.exceptions import NonOddK0Error
from softjpeg.models.schemas import ErrorBand, ModelSignal, SignalKind
from softjpeg.transform import ORTHONORMAL_SCALE, dct1d, quantize

# Amplitude below which a QF=25 horizontal ramp loses its first AC coefficient,
# as commonly quoted for the 8×8 luminance table.
PUBLISHED_RAMP_THRESHOLD = 4.8


def ramp_samples(amplitude: float, length: int) -> np.ndarray:
    """Decreasing ramp x_n = a (1 - (n + 1/2) / N), the sampled a·tri(t)."""
    n = np.arange(length, dtype=np.float64)
    return amplitude * (1.0 - (n + 0.5) / length)


def step_samples(amplitude: float, phase: float, length: int) -> np.ndarray:
    """Two steps: a for the first m = round(rN) samples, then 0."""
    m = int(round(phase * length))
    samples = np.zeros(length, dtype=np.float64)
    samples[:m] = amplitude
    return samples


def signal_samples(signal: ModelSignal) -> np.ndarray:
    if signal.kind == SignalKind.RAMP:
        return ramp_samples(signal.amplitude, signal.length)
    samples = step_samples(signal.amplitude, signal.phase, signal.length)
    if signal.kind == SignalKind.BLURRED_STEP and signal.sigma > 0:
        # sigma is in units of the whole sequence; reflect matches the DCT's even extension
        samples = gaussian_filter1d(samples, sigma=signal.sigma * signal.length, mode="reflect")
    return samples


def ramp_spectrum_approx(amplitude: float, length: int, k: int | np.ndarray) -> np.ndarray | float:
    """X_k ≈ (aN/2) sinc²(k/2)."""
    value = amplitude * length / 2.0 * np.sinc(np.asarray(k, dtype=np.float64) / 2.0) ** 2
    return float(value) if np.ndim(value) == 0 else value


def blurred_step_spectrum(
    amplitude: float, phase: float, sigma: float, length: int, k: int | np.ndarray
) -> np.ndarray | float:
    """Y_k ≈ a r N sinc(r k) exp(-π² σ² k² / 2); σ = 0 gives the sharp step."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    k_arr = np.asarray(k, dtype=np.float64)
    value = (
        amplitude * phase * length * np.sinc(phase * k_arr)
        * np.exp(-(math.pi**2) * sigma**2 * k_arr**2 / 2.0)
    )
    return float(value) if np.ndim(value) == 0 else value


def signal_spectrum_approx(signal: ModelSignal, k: int | np.ndarray) -> np.ndarray | float:
    if signal.kind == SignalKind.RAMP:
        return ramp_spectrum_approx(signal.amplitude, signal.length, k)
    sigma = signal.sigma if signal.kind == SignalKind.BLURRED_STEP else 0.0
    return blurred_step_spectrum(signal.amplitude, signal.phase, sigma, signal.length, k)


def ramp_zero_ac_bound(k0: int, q: float, length: int) -> float:
    """Largest ramp amplitude whose k0-th coefficient quantizes to zero: π² k0² q / (4N)."""
    if not isinstance(k0, (int, np.integer)) or k0 < 1 or k0 % 2 == 0:
        raise NonOddK0Error(f"k0 must be an odd positive integer, got {k0!r}")
    if q <= 0:
        raise ValueError("Quantization step must be positive")
    return math.pi**2 * k0**2 * q / (4.0 * length)


def ramp_zero_ac_search(
    k0: int,
    q: float,
    length: int,
    block: bool = False,
    resolution: float = 1e-3,
    max_amplitude: float | None = None,
) -> float:
    """
    Exhaustive counterpart of ``ramp_zero_ac_bound``.

    Scans amplitudes on a grid and returns the largest one whose exact k0-th
    coefficient quantizes to zero. With ``block=True`` the coefficient is the
    orthonormal 8×8 JPEG coefficient F(0, k0) of a block whose rows all hold
    the ramp: √8 times the 1-D orthonormal value, i.e. √2 X_k0 for k0 ≥ 1.
    """
    if length != 8 and block:
        raise ValueError("The block variant models 8×8 JPEG blocks only")
    if max_amplitude is None:
        max_amplitude = 4.0 * ramp_zero_ac_bound(k0 if k0 % 2 else k0 + 1, q, length) + 1.0
    amplitudes = np.arange(0.0, max_amplitude + resolution, resolution)
    unit = float(dct1d(ramp_samples(1.0, length))[k0])
    if block:
        unit *= math.sqrt(8.0) * float(ORTHONORMAL_SCALE[k0])
    indices = quantize(amplitudes * unit, q)
    nonzero = np.flatnonzero(indices != 0)
    if nonzero.size == 0:
        return float(amplitudes[-1])
    return float(amplitudes[nonzero[0] - 1]) if nonzero[0] > 0 else 0.0


def sine_integral(z: float) -> float:
    """Si(z) = ∫₀^z sinc(u) du with the normalized sinc; Si(±∞) = ±1/2."""
    if math.isinf(z):
        return math.copysign(0.5, z)
    if z == 0:
        return 0.0
    value, _ = integrate.quad(np.sinc, 0.0, abs(z), epsabs=1e-9, epsrel=1e-10, limit=500)
    return math.copysign(value, z)


def _scaled_si(b: float, z: float) -> float:
    """Si(b·z), taking the b → ∞ limit analytically."""
    if math.isinf(b):
        return 0.0 if z == 0 else math.copysign(0.5, z)
    return sine_integral(b * z)


def step_reconstruction(
    amplitude: float, phase: float, b: float, t: float, aligned: bool = False
) -> float:
    """
    Step rebuilt from its first b frequencies.

    Unaligned: x̂_t = a [Si(b r − b t) + Si(b r + b t)].
    Aligned to the edge: ŷ_t = a [Si(−b t) + Si(2 b r + b t)].
    """
    if b <= 0:
        raise ValueError("Cut-off b must be positive")
    if aligned:
        return amplitude * (_scaled_si(b, -t) + _scaled_si(b, 2.0 * phase + t))
    return amplitude * (_scaled_si(b, phase - t) + _scaled_si(b, phase + t))


def classify_error_band(y: float, q: float, error_floor: float) -> ErrorBand:
    """
    Perceptual effect of quantizing one coefficient.

    Negligible below the absolute floor C_ε; hidden when the coefficient is
    strong enough that the relative error stays under 1/3 (|Y| > 3q/4);
    visible in between.
    """
    if q <= 0:
        raise ValueError("Quantization step must be positive")
    if error_floor < 0:
        raise ValueError("Error floor must be non-negative")
    magnitude = abs(y)
    if magnitude < error_floor:
        return ErrorBand.NEGLIGIBLE
    if magnitude > 0.75 * q:
        return ErrorBand.HIDDEN
    return ErrorBand.VISIBLE


@dataclass(frozen=True)
class RampBoundSummary:
    """Zero-AC ramp amplitude by formula, by search, and as commonly quoted."""

    qf: int
    step: int
    formula: float
    search_1d: float
    search_block: float
    published: float = PUBLISHED_RAMP_THRESHOLD

    def lines(self) -> list[str]:
        return [
            f"qf={self.qf} q_1={self.step}",
            f"formula_bound={self.formula:.4f}",
            f"search_1d={self.search_1d:.4f}",
            f"search_block={self.search_block:.4f}",
            f"published_reference={self.published}",
        ]
