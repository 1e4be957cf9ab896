"""
Plot the quantization-error model: spectra of ramps and steps, and the
ringing of a step rebuilt from its first b frequencies.

Figures are written to experiments/figures/ as PNG.
"""

from __future__ import annotations

import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from softjpeg.analysis.model import (
    blurred_step_spectrum,
    ramp_spectrum_approx,
    step_reconstruction,
)
from softjpeg.analysis.report import horizontal_steps, model_rows
from softjpeg.codec.quantization import luminance_table
from softjpeg.config import settings
from softjpeg.models.schemas import ModelSignal, SignalKind
from softjpeg.utils.logger import configure_logging, get_logger

logger = get_logger(__name__)


def plot_ramp(out_dir: Path, qf: int = 25) -> Path:
    signal = ModelSignal(kind=SignalKind.RAMP, amplitude=40.0, length=8)
    rows = model_rows(signal, luminance_table(qf))
    k = [r[0] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.stem(k, [abs(r[1]) for r in rows], linefmt="C0-", markerfmt="C0o", label="exact |X_k|")
    fine = np.linspace(0.5, 7, 200)
    ax.plot(fine, np.abs(ramp_spectrum_approx(40.0, 8, fine)), "C1--", label="closed form")
    ax.step(k, horizontal_steps(luminance_table(qf), 8) / 2, "C3:", where="mid", label="q_k / 2")
    ax.set_xlabel("k")
    ax.set_yscale("symlog", linthresh=1.0)
    ax.set_title(f"Ramp, a = 40, QF = {qf}")
    ax.legend()
    path = out_dir / "ramp_spectrum.png"
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_blurred_steps(out_dir: Path) -> Path:
    k = np.arange(64)
    fig, ax = plt.subplots(figsize=(6, 4))
    for sigma in (0.0, 0.02, 0.05, 0.1):
        spectrum = blurred_step_spectrum(40.0, 20 / 64, sigma, 64, k)
        ax.plot(k, np.abs(spectrum), label=f"σ = {sigma}")
    ax.set_xlabel("k")
    ax.set_ylabel("|X_k|")
    ax.set_yscale("log")
    ax.set_title("Blurred step, N = 64, r = 20/64")
    ax.legend()
    path = out_dir / "blurred_step_spectra.png"
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_ringing(out_dir: Path, b: float = 20.0) -> Path:
    t = np.linspace(-0.5, 0.5, 401)
    fig, ax = plt.subplots(figsize=(6, 4))
    for phase in (0.2, 0.35, 0.5):
        aligned = [step_reconstruction(1.0, phase, b, v, aligned=True) for v in t]
        ax.plot(t, aligned, label=f"r = {phase}")
    ax.axhline(1.0, color="0.6", lw=0.8)
    ax.set_xlabel("t (aligned to the edge)")
    ax.set_title(f"Step rebuilt from {b:g} frequencies")
    ax.legend()
    path = out_dir / "step_ringing.png"
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def main() -> None:
    configure_logging(settings.log_level)
    out_dir = Path(settings.experiments_dir) / "figures"
    out_dir.mkdir(parents=True, exist_ok=True)
    for path in (plot_ramp(out_dir), plot_blurred_steps(out_dir), plot_ringing(out_dir)):
        logger.info("Wrote %s", path)


if __name__ == "__main__":
    main()
