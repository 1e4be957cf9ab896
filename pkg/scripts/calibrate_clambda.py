"""
Grid search for the threshold constant C_lambda.

Sweeps C_lambda over 0.5, 0.75, ..., 3.0 at QF 50 and keeps the value with
the largest mean PSNR gain of soft over hard decoding. Without --images the
scikit-image photographs (BUNDLED_IMAGES) are the calibration set.

LEARNING NOTE: One knob at a time
---------------------------------
Everything except C_lambda comes from Settings, so a sweep is only
comparable with runs made under the same environment. Each value is logged
as its own experiment run, and the choice lands in
experiments/clambda_calibration.json.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime
from pathlib import Path

import numpy as np
import pandas as pd

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from softjpeg.config import settings
from softjpeg.evaluation.benchmark import (
    BenchmarkEvaluator,
    ExperimentTracker,
    bundled_cases,
    load_cases,
)
from softjpeg.utils.logger import configure_logging, get_logger

logger = get_logger(__name__)

DEFAULT_GRID = [float(v) for v in np.arange(0.5, 3.0 + 1e-9, 0.25)]


def main() -> None:
    configure_logging(settings.log_level)
    parser = argparse.ArgumentParser(description="C_lambda grid search")
    parser.add_argument("--images", help="folder of lossless test images (default: bundled)")
    parser.add_argument("--size", type=int, default=256, help="side of the bundled images")
    parser.add_argument("--qf", type=int, nargs="+", default=[50])
    parser.add_argument("--values", type=float, nargs="+", default=DEFAULT_GRID)
    args = parser.parse_args()

    cases = load_cases(args.images) if args.images else bundled_cases(size=args.size)
    if not cases:
        logger.error("No calibration images found")
        sys.exit(1)

    tracker = ExperimentTracker(settings.experiments_dir)
    rows = []
    run_files = []
    for c_lambda in args.values:
        evaluator = BenchmarkEvaluator(settings.restoration_config(c_lambda=c_lambda))
        run = evaluator.evaluate(cases, args.qf)
        run.run_id = f"{run.run_id}_clambda{c_lambda:g}"
        run.config["experiment"] = "clambda_sweep"
        run_files.append(tracker.log_run(run, notes=f"C_lambda = {c_lambda:g}"))
        rows.extend(
            {"c_lambda": c_lambda, "image": r.name, "qf": r.qf, "psnr_gain": r.psnr_gain}
            for r in run.results
        )

    frame = pd.DataFrame(rows)
    table = frame.pivot_table(index="c_lambda", columns="qf", values="psnr_gain", aggfunc="mean")
    print("\n=== Mean PSNR gain (dB) ===")
    print(table.round(3).to_string())
    best = float(table.mean(axis=1).idxmax())
    print(f"\nBest: C_lambda = {best:g}")

    record = {
        "timestamp": datetime.now().isoformat(),
        "qf": args.qf,
        "images": [case.name for case in cases],
        "grid": args.values,
        "mean_gain": {f"{c:g}": float(g) for c, g in table.mean(axis=1).items()},
        "best_c_lambda": best,
        "run_files": run_files,
    }
    out = Path(settings.experiments_dir) / "clambda_calibration.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(record, indent=2))
    logger.info("Calibration written to %s (set SOFTJPEG_C_LAMBDA or the config default)", out)


if __name__ == "__main__":
    main()
