"""
Hard vs. soft decoding over a folder of test images.

🎓 LEARNING NOTE: What a benchmark run records
For every (image, QF) pair we compress, decode both ways and compare each
decode with the original. Gains are soft − hard, so positive is better.
Both outputs are rounded to 8 bits first, exactly as a saved file would be.
The blind and oracle ε are logged side by side to keep the estimator honest.
"""

from __future__ import annotations

import json
import statistics
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any

import numpy as np
from skimage import data as skimage_data
from skimage.transform import resize

from softjpeg.codec.decode import hard_decode
from softjpeg.codec.jpeg import encode_jpeg, parse_jpeg
from softjpeg.codec.raster import read_raster
from softjpeg.evaluation.metrics import psnr, ssim
from softjpeg.models.images import PixelImage
from softjpeg.models.schemas import (
    DegradationKind,
    DegradationOperator,
    RestorationConfig,
    Subsampling,
)
from softjpeg.restoration.degradation import apply_H, apply_H_inverse
from softjpeg.restoration.low_rank import estimate_epsilon
from softjpeg.restoration.pipeline import RestorationPipeline
from softjpeg.utils.logger import get_logger

logger = get_logger(__name__)

IMAGE_SUFFIXES = (".pgm", ".ppm", ".png", ".bmp", ".tif", ".tiff")
# photographs shipped inside scikit-image (no download needed)
BUNDLED_IMAGES = (
    "camera",
    "moon",
    "coins",
    "astronaut",
    "coffee",
    "chelsea",
    "brick",
    "grass",
    "gravel",
    "text",
)


@dataclass
class BenchmarkCase:
    """One test image."""

    name: str
    image: PixelImage

    @classmethod
    def from_path(cls, path: str | Path) -> BenchmarkCase:
        path = Path(path)
        return cls(name=path.stem, image=read_raster(path))


def load_cases(folder: str | Path) -> list[BenchmarkCase]:
    """Every lossless raster in ``folder``, sorted by name."""
    folder = Path(folder)
    if not folder.is_dir():
        raise FileNotFoundError(f"Test image folder not found: {folder}")
    paths = sorted(p for p in folder.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    return [BenchmarkCase.from_path(p) for p in paths]


def bundled_image(name: str, size: int = 256) -> PixelImage:
    """A scikit-image sample picture resized to ``size``×``size`` and rounded to 8 bits."""
    picture = np.asarray(getattr(skimage_data, name)(), dtype=np.float64)
    if picture.ndim == 3:
        picture = picture[..., :3]
    shape = (size, size) + picture.shape[2:]
    resized = resize(picture, shape, anti_aliasing=True, preserve_range=True)
    return PixelImage.from_array(np.round(np.clip(resized, 0.0, 255.0)))


def bundled_cases(
    names: tuple[str, ...] | list[str] = BUNDLED_IMAGES, size: int = 256
) -> list[BenchmarkCase]:
    """The scikit-image calibration set, for machines without a test-image folder."""
    return [BenchmarkCase(name=name, image=bundled_image(name, size)) for name in names]


@dataclass
class BenchmarkResult:
    name: str
    qf: int
    hard_psnr: float
    soft_psnr: float
    hard_ssim: float
    soft_ssim: float
    epsilon_blind: float
    epsilon_oracle: float
    seconds: float

    @property
    def psnr_gain(self) -> float:
        return self.soft_psnr - self.hard_psnr

    @property
    def ssim_gain(self) -> float:
        return self.soft_ssim - self.hard_ssim


@dataclass
class BenchmarkRun:
    """A complete benchmark over several images and QFs."""

    run_id: str
    timestamp: datetime
    config: dict[str, Any]
    results: list[BenchmarkResult] = field(default_factory=list)

    def summary(self) -> dict[str, Any]:
        """Median gains per QF."""
        if not self.results:
            return {}
        per_qf: dict[str, Any] = {}
        for qf in sorted({r.qf for r in self.results}):
            rows = [r for r in self.results if r.qf == qf]
            per_qf[str(qf)] = {
                "num_images": len(rows),
                "median_hard_psnr": statistics.median(r.hard_psnr for r in rows),
                "median_psnr_gain": statistics.median(r.psnr_gain for r in rows),
                "median_ssim_gain": statistics.median(r.ssim_gain for r in rows),
                "positive_psnr_gains": sum(r.psnr_gain > 0 for r in rows),
                "median_epsilon_error": _median_epsilon_error(rows),
            }
        return {"run_id": self.run_id, "num_results": len(self.results), "per_qf": per_qf}


def _median_epsilon_error(rows: list[BenchmarkResult]) -> float:
    """Median |blind − oracle| / oracle over rows with a non-zero oracle ε."""
    errors = [
        abs(r.epsilon_blind - r.epsilon_oracle) / r.epsilon_oracle
        for r in rows
        if r.epsilon_oracle > 0
    ]
    return statistics.median(errors) if errors else 0.0


def _exported(img: PixelImage) -> PixelImage:
    return PixelImage(samples=img.to_uint8().astype(np.float64), color_space=img.color_space)


class BenchmarkEvaluator:
    """
    Runs hard and soft decoding on every case at every QF.

    With a blur operator the original is blurred before compression, and
    the baseline becomes hard decode followed by H⁻¹ alone.
    """

    def __init__(
        self,
        cfg: RestorationConfig | None = None,
        op: DegradationOperator | None = None,
        subsampling: Subsampling | str = Subsampling.S420,
    ):
        self.pipeline = RestorationPipeline(cfg, op)
        self.subsampling = Subsampling(subsampling)

    def evaluate_case(self, case: BenchmarkCase, qf: int) -> BenchmarkResult:
        op = self.pipeline.op
        observed = case.image
        if op.kind != DegradationKind.IDENTITY:
            observed = apply_H(case.image, op)
        coeffs = parse_jpeg(encode_jpeg(observed, qf, self.subsampling))

        start = time.perf_counter()
        soft = _exported(self.pipeline.run(coeffs).image)
        seconds = time.perf_counter() - start

        hard = hard_decode(coeffs)
        if op.kind != DegradationKind.IDENTITY:
            hard = apply_H_inverse(hard, op)
        hard = _exported(hard)

        result = BenchmarkResult(
            name=case.name,
            qf=qf,
            hard_psnr=psnr(case.image, hard),
            soft_psnr=psnr(case.image, soft),
            hard_ssim=ssim(case.image, hard),
            soft_ssim=ssim(case.image, soft),
            epsilon_blind=estimate_epsilon(coeffs),
            epsilon_oracle=estimate_epsilon(coeffs, reference=_exported(observed)),
            seconds=seconds,
        )
        logger.info(
            "%s QF=%d: hard %.2f dB, soft %.2f dB (%+.2f) in %.1fs",
            case.name,
            qf,
            result.hard_psnr,
            result.soft_psnr,
            result.psnr_gain,
            seconds,
        )
        return result

    def evaluate(self, cases: list[BenchmarkCase], qfs: list[int]) -> BenchmarkRun:
        run = BenchmarkRun(
            run_id=datetime.now().strftime("%Y%m%d_%H%M%S"),
            timestamp=datetime.now(),
            config={
                "qfs": list(qfs),
                "num_cases": len(cases),
                "subsampling": self.subsampling.value,
                "restoration": self.pipeline.cfg.model_dump(mode="json"),
                "degradation": self.pipeline.op.model_dump(mode="json"),
            },
        )
        for qf in qfs:
            for case in cases:
                run.results.append(self.evaluate_case(case, qf))
        return run


class ExperimentTracker:
    """Writes benchmark runs as JSON so different settings can be compared later."""

    def __init__(self, output_dir: str | Path = "./experiments"):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def log_run(self, run: BenchmarkRun, notes: str = "") -> str:
        output_file = self.output_dir / f"run_{run.run_id}.json"
        data = {
            "run_id": run.run_id,
            "timestamp": run.timestamp.isoformat(),
            "config": run.config,
            "summary": run.summary(),
            "notes": notes,
            "results": [
                {**asdict(r), "psnr_gain": r.psnr_gain, "ssim_gain": r.ssim_gain}
                for r in run.results
            ],
        }
        with open(output_file, "w", encoding="utf-8") as f:
            json.dump(data, f, indent=2)
        logger.info("Logged run %s to %s", run.run_id, output_file)
        return str(output_file)

    def compare_runs(self, run_ids: list[str]) -> dict[str, Any]:
        """Load and compare multiple runs; missing ids are skipped."""
        runs = []
        for run_id in run_ids:
            run_file = self.output_dir / f"run_{run_id}.json"
            if run_file.exists():
                with open(run_file, encoding="utf-8") as f:
                    runs.append(json.load(f))
        return {
            "runs": [
                {"run_id": r["run_id"], "summary": r["summary"], "notes": r.get("notes", "")}
                for r in runs
            ]
        }
