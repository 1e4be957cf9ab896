"""
Hard vs. soft decoding benchmark over a folder of lossless test images.

Experiments included:
1) Soft decoding at several quality factors (identity H)
2) Optionally, joint deblurring with a Gaussian H (--blur-sigma)

LEARNING NOTE: Evaluation mindset
---------------------------------
Change one knob per run and log every run to disk. The JSON files in
experiments/ are what later comparisons read, not the console output.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import pandas as pd

# Allow imports from src without installing the package
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from softjpeg.config import settings
from softjpeg.evaluation.benchmark import (
    BenchmarkEvaluator,
    BenchmarkRun,
    ExperimentTracker,
    bundled_cases,
    load_cases,
)
from softjpeg.models.schemas import DegradationOperator
from softjpeg.utils.logger import configure_logging, get_logger

logger = get_logger(__name__)


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    parser.add_argument("--images", default=settings.test_images_dir)
    parser.add_argument(
        "--bundled", action="store_true", help="use the scikit-image photographs instead"
    )
    parser.add_argument("--qf", type=int, nargs="+", default=[10, 25, 50, 75])
    parser.add_argument("--k", type=int, dest="iterations")
    parser.add_argument("--clambda", type=float, dest="c_lambda")
    parser.add_argument("--blur-sigma", type=float)
    parser.add_argument("--subsampling", default="420", choices=["444", "420"])
    parser.add_argument("--notes", default="")
    return parser.parse_args()


def results_frame(run: BenchmarkRun) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "image": r.name,
                "qf": r.qf,
                "hard_psnr": r.hard_psnr,
                "soft_psnr": r.soft_psnr,
                "psnr_gain": r.psnr_gain,
                "ssim_gain": r.ssim_gain,
                "eps_blind": r.epsilon_blind,
                "eps_oracle": r.epsilon_oracle,
                "seconds": r.seconds,
            }
            for r in run.results
        ]
    )


def main() -> None:
    configure_logging(settings.log_level)
    args = parse_args()

    cases = bundled_cases() if args.bundled else load_cases(args.images)
    if not cases:
        logger.error("No PGM/PPM/PNG images found in %s", args.images)
        sys.exit(1)

    cfg = settings.restoration_config(iterations=args.iterations, c_lambda=args.c_lambda)
    op = DegradationOperator.identity()
    if args.blur_sigma:
        op = DegradationOperator.gaussian_blur(args.blur_sigma, eta=settings.blur_eta)

    evaluator = BenchmarkEvaluator(cfg, op, subsampling=args.subsampling)
    run = evaluator.evaluate(cases, args.qf)
    run.config["experiment"] = "deblur" if args.blur_sigma else "soft_decode"
    output = ExperimentTracker(settings.experiments_dir).log_run(run, notes=args.notes)

    frame = results_frame(run)
    per_qf = frame.groupby("qf")[["hard_psnr", "soft_psnr", "psnr_gain", "ssim_gain"]].median()

    print("\n=== Benchmark Summary (medians) ===")
    print(per_qf.round(3).to_string())
    print(f"\nImages with a PSNR gain: {(frame['psnr_gain'] > 0).sum()} / {len(frame)}")
    print(f"Run logged to: {output}")


if __name__ == "__main__":
    main()
