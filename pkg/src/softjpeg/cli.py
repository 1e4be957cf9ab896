"""
softjpeg command line.

Exit codes: 0 success, 2 usage or invalid parameters, 3 I/O, 4 unsupported
or corrupt JPEG. Logs go to stderr; results (metrics, analysis) to stdout.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from collections.abc import Sequence

from softjpeg.analysis.report import CSV_HEADER, emit_model_csv, model_rows, ramp_bound_summary
from softjpeg.codec.decode import hard_decode
from softjpeg.codec.jpeg import encode_coefficients, encode_jpeg, read_jpeg, write_jpeg
from softjpeg.codec.quantization import chrominance_table, luminance_table
from softjpeg.codec.raster import read_raster, write_raster
from softjpeg.config import settings
from softjpeg.evaluation.metrics import psnr, ssim
from softjpeg.exceptions import CodecError, InvalidQualityError, RasterFormatError, SoftJpegError
from softjpeg.models.schemas import (
    DegradationOperator,
    ModelSignal,
    RestorationConfig,
    SignalKind,
    Subsampling,
    ThresholdMode,
)
from softjpeg.restoration.pipeline import RestorationPipeline
from softjpeg.utils.logger import configure_logging, get_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_FORMAT = 4


def _add_solver_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--k", type=int, dest="iterations", help="Iterations K")
    parser.add_argument("--clambda", type=float, dest="c_lambda", help="Threshold constant")
    parser.add_argument("--beta-mid", type=float, help="Clipping width before the last iteration")
    parser.add_argument("--beta-final", type=float, help="Clipping width of the last iteration")
    parser.add_argument(
        "--threshold-mode", choices=[m.value for m in ThresholdMode], help="Singular value rule"
    )
    parser.add_argument("--feedback-delta", type=float, help="Blend weight of the observed image")
    parser.add_argument("--luma-only", action="store_true", help="Hard-decode the chroma channels")
    noise = parser.add_mutually_exclusive_group()
    noise.add_argument("--epsilon", type=float, help="Fixed compression RMSE")
    noise.add_argument("--oracle", help="Original raster; measure the RMSE instead")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="softjpeg", description="JPEG soft decoding and restoration"
    )
    parser.add_argument("--log-level", default=settings.log_level, help="DEBUG, INFO, WARNING, ...")
    sub = parser.add_subparsers(dest="command", required=True)

    encode = sub.add_parser("encode", help="Compress a PGM/PPM raster to baseline JPEG")
    encode.add_argument("input")
    encode.add_argument("output")
    encode.add_argument("--qf", type=int, required=True, help="Quality factor 1..100")
    encode.add_argument(
        "--subsampling", choices=[s.value for s in Subsampling], default=Subsampling.S420.value
    )
    encode.add_argument("--restart-interval", type=int, default=0, help="MCUs per restart segment")

    decode = sub.add_parser("decode", help="Standard (hard) decode")
    decode.add_argument("input")
    decode.add_argument("output")

    soft = sub.add_parser("soft-decode", help="Soft decode with the low-rank prior")
    soft.add_argument("input")
    soft.add_argument("output")
    _add_solver_options(soft)

    restore = sub.add_parser("restore", help="Joint deblurring and soft decoding")
    restore.add_argument("input")
    restore.add_argument("output")
    restore.add_argument("--blur-sigma", type=float, required=True, help="Blur std in pixels")
    restore.add_argument("--eta", type=float, default=settings.blur_eta, help="Tikhonov weight")
    _add_solver_options(restore)

    metrics = sub.add_parser("metrics", help="PSNR and SSIM between two rasters")
    metrics.add_argument("a")
    metrics.add_argument("b")
    metrics.add_argument(
        "--all-channels", action="store_true", default=settings.metrics_all_channels
    )

    analyze = sub.add_parser("analyze", help="DCT spectra of model signals")
    analyze.add_argument("signal", choices=["ramp", "step", "blurred-step"])
    analyze.add_argument("--qf", type=int, default=25)
    analyze.add_argument("--csv", help="Write the spectrum to this file instead of stdout")
    analyze.add_argument("--amplitude", type=float, default=40.0)
    analyze.add_argument("--n", type=int, default=8, help="Signal length")
    analyze.add_argument("--phase", type=float, default=0.5, help="Step position m/N")
    analyze.add_argument("--sigma", type=float, default=0.0, help="Blur std, normalized to N")
    analyze.add_argument("--table", choices=["luma", "chroma"], default="luma")
    analyze.add_argument(
        "--error-floor", type=float, default=settings.error_floor_ratio, help="C_eps / q_k"
    )
    return parser


def _restoration_config(args: argparse.Namespace) -> RestorationConfig:
    return settings.restoration_config(
        iterations=args.iterations,
        c_lambda=args.c_lambda,
        beta_mid=args.beta_mid,
        beta_final=args.beta_final,
        threshold_mode=args.threshold_mode,
        feedback_delta=args.feedback_delta,
        epsilon=args.epsilon,
        restore_chroma=False if args.luma_only else None,
    )


def _run_pipeline(args: argparse.Namespace, op: DegradationOperator) -> int:
    coeffs = read_jpeg(args.input)
    reference = read_raster(args.oracle) if args.oracle else None
    result = RestorationPipeline(_restoration_config(args), op).run(coeffs, reference=reference)
    write_raster(result.image, args.output)
    logger.info("Wrote %s", args.output)
    return EXIT_OK


def _cmd_encode(args: argparse.Namespace) -> int:
    img = read_raster(args.input)
    if args.restart_interval:
        coeffs = encode_coefficients(img, args.qf, args.subsampling)
        data = write_jpeg(coeffs, args.restart_interval)
    else:
        data = encode_jpeg(img, args.qf, args.subsampling)
    with open(args.output, "wb") as handle:
        handle.write(data)
    logger.info("Wrote %d bytes to %s", len(data), args.output)
    return EXIT_OK


def _cmd_decode(args: argparse.Namespace) -> int:
    write_raster(hard_decode(read_jpeg(args.input)), args.output)
    return EXIT_OK


def _cmd_soft_decode(args: argparse.Namespace) -> int:
    return _run_pipeline(args, DegradationOperator.identity())


def _cmd_restore(args: argparse.Namespace) -> int:
    return _run_pipeline(args, DegradationOperator.gaussian_blur(args.blur_sigma, eta=args.eta))


def _format_db(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.4f}"


def _cmd_metrics(args: argparse.Namespace) -> int:
    a, b = read_raster(args.a), read_raster(args.b)
    print(f"psnr={_format_db(psnr(a, b, args.all_channels))}")
    print(f"ssim={ssim(a, b, args.all_channels):.6f}")
    return EXIT_OK


def _cmd_analyze(args: argparse.Namespace) -> int:
    signal = ModelSignal(
        kind=SignalKind(args.signal.replace("-", "_")),
        amplitude=args.amplitude,
        length=args.n,
        phase=args.phase,
        sigma=args.sigma,
    )
    table = luminance_table(args.qf) if args.table == "luma" else chrominance_table(args.qf)
    if args.csv:
        emit_model_csv(signal, table, args.csv, args.error_floor)
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(CSV_HEADER)
        writer.writerows(model_rows(signal, table, args.error_floor))
    if signal.kind == SignalKind.RAMP:
        for line in ramp_bound_summary(args.qf, table).lines():
            print(line)
    return EXIT_OK


COMMANDS = {
    "encode": _cmd_encode,
    "decode": _cmd_decode,
    "soft-decode": _cmd_soft_decode,
    "restore": _cmd_restore,
    "metrics": _cmd_metrics,
    "analyze": _cmd_analyze,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    configure_logging(args.log_level, stream=sys.stderr)

    try:
        return COMMANDS[args.command](args)
    except RasterFormatError as exc:
        logger.error("%s", exc)
        return EXIT_IO
    except InvalidQualityError as exc:
        logger.error("%s", exc)
        return EXIT_USAGE
    except CodecError as exc:
        logger.error("Unsupported or corrupt JPEG: %s", exc)
        return EXIT_FORMAT
    except OSError as exc:
        logger.error("I/O error: %s", exc)
        return EXIT_IO
    except (SoftJpegError, ValueError) as exc:
        logger.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
