"""CSV emission for the model spectra and the ramp threshold summary."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from softjpeg.analysis.model import (
    RampBoundSummary,
    classify_error_band,
    ramp_zero_ac_bound,
    ramp_zero_ac_search,
    signal_samples,
    signal_spectrum_approx,
)
from softjpeg.codec.quantization import luminance_table
from softjpeg.models.images import QuantTable
from softjpeg.models.schemas import ModelSignal
from softjpeg.transform import dct1d, dequantize, quantize
from softjpeg.utils.logger import get_logger

logger = get_logger(__name__)

CSV_HEADER = ("k", "exact", "approx", "quantized", "band")


def horizontal_steps(table: QuantTable, length: int) -> np.ndarray:
    """q_k for a 1-D signal: first table row, last entry reused past k = 7."""
    row = table.natural()[0]
    return row[np.minimum(np.arange(length), 7)]


def model_rows(
    signal: ModelSignal, table: QuantTable, error_floor_ratio: float = 0.125
) -> list[tuple[int, float, float, float, str]]:
    exact = dct1d(signal_samples(signal))
    k = np.arange(signal.length)
    approx = np.atleast_1d(signal_spectrum_approx(signal, k))
    steps = horizontal_steps(table, signal.length)
    quantized = dequantize(quantize(exact, steps), steps)
    return [
        (
            int(i),
            float(exact[i]),
            float(approx[i]),
            float(quantized[i]),
            classify_error_band(exact[i], steps[i], error_floor_ratio * steps[i]).value,
        )
        for i in k
    ]


def emit_model_csv(
    signal: ModelSignal, table: QuantTable, path: str | Path, error_floor_ratio: float = 0.125
) -> Path:
    """
    Write one row per frequency k: exact X_k (direct sum), closed-form
    approximation, dequantized value and error band. Header is fixed:
    ``k,exact,approx,quantized,band``.
    """
    path = Path(path)
    rows = model_rows(signal, table, error_floor_ratio)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_HEADER)
        for k, exact, approx, quantized, band in rows:
            writer.writerow([k, f"{exact:.10g}", f"{approx:.10g}", f"{quantized:.10g}", band])
    logger.info("Wrote %d %s rows to %s", len(rows), signal.kind.value, path)
    return path


def ramp_bound_summary(qf: int = 25, table: QuantTable | None = None) -> RampBoundSummary:
    """Zero-AC threshold of an 8-sample horizontal ramp at k0 = 1."""
    table = table or luminance_table(qf)
    step = int(table.natural()[0, 1])
    return RampBoundSummary(
        qf=qf,
        step=step,
        formula=ramp_zero_ac_bound(1, step, 8),
        search_1d=ramp_zero_ac_search(1, step, 8),
        search_block=ramp_zero_ac_search(1, step, 8, block=True),
    )
