"""
The iterative restoration loop: soft decoding, optionally joint with deblurring.

🎓 LEARNING NOTE: One iteration
Every component plane goes through the same four steps K times:

    x  --group + SVD threshold + aggregate-->  z
    z  --H, then clip into the quantization cells-->  y
    y  --H⁻¹-->  x

The clip is the only step that looks at the JPEG data again, so the output
can never drift away from what the file says. λ shrinks each iteration as
the noise falls; β opens up to the full cell on the last one.

All work happens on centered (pixel − 128), unclamped block-grid planes;
the clamp to [0, 255] and chroma upsampling happen once at export.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from softjpeg.codec.decode import coefficient_planes, planes_to_image
from softjpeg.models.images import CoefficientImage, PixelImage
from softjpeg.models.schemas import DegradationOperator, RestorationConfig, ThresholdPlan
from softjpeg.restoration.constraint import check_plane, clip_plane, feedback_blend
from softjpeg.restoration.degradation import apply_H, apply_H_inverse
from softjpeg.restoration.low_rank import denoise_groups, estimate_epsilon, plan_thresholds
from softjpeg.restoration.patch_engine import PatchMatcher, aggregate
from softjpeg.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class IterationStats:
    component: int
    k: int
    lam: float
    beta: float
    # ‖y^(k) − z^(k)‖_F
    residual_norm: float
    violations: int
    relaxed_groups: int = 0


@dataclass(frozen=True)
class IterationState:
    """Full planes of one iteration, kept only when tracing."""

    component: int
    k: int
    x: np.ndarray
    z: np.ndarray
    y: np.ndarray
    lam: float
    beta: float


@dataclass(frozen=True)
class RestorationResult:
    image: PixelImage
    # final x^(K) per component, centered and unclamped
    planes: list[np.ndarray]
    plans: dict[int, ThresholdPlan]
    stats: list[IterationStats] = field(default_factory=list)
    states: list[IterationState] = field(default_factory=list)

    def stats_for(self, component: int) -> list[IterationStats]:
        return [s for s in self.stats if s.component == component]


class RestorationPipeline:
    """
    Runs the loop on every component of a CoefficientImage.

    Configs are immutable and can be shared; a pipeline instance holds no
    state between ``run`` calls.
    """

    def __init__(self, cfg: RestorationConfig | None = None, op: DegradationOperator | None = None):
        self.cfg = cfg or RestorationConfig()
        self.op = op or DegradationOperator.identity()

    def run(
        self,
        coeffs: CoefficientImage,
        reference: PixelImage | None = None,
        keep_trace: bool = False,
    ) -> RestorationResult:
        """
        Restore ``coeffs``. With a ground-truth ``reference`` the noise level
        is measured instead of estimated (oracle mode).
        """
        observed = coefficient_planes(coeffs)
        planes: list[np.ndarray] = []
        plans: dict[int, ThresholdPlan] = {}
        stats: list[IterationStats] = []
        states: list[IterationState] = []

        for index, y0 in enumerate(observed):
            if index > 0 and not self.cfg.restore_chroma:
                planes.append(y0)
                continue
            plan = self._plan(coeffs, index, reference)
            plans[index] = plan
            x = self._restore_plane(coeffs, index, y0, plan, stats, states if keep_trace else None)
            planes.append(x)

        image = planes_to_image(planes, coeffs)
        return RestorationResult(
            image=image, planes=planes, plans=plans, stats=stats, states=states
        )

    def _plan(
        self, coeffs: CoefficientImage, index: int, reference: PixelImage | None
    ) -> ThresholdPlan:
        if self.cfg.epsilon is not None:
            epsilon = self.cfg.epsilon
        else:
            epsilon = estimate_epsilon(coeffs, index, reference)
        return plan_thresholds(epsilon, self.cfg)

    def _restore_plane(
        self,
        coeffs: CoefficientImage,
        index: int,
        y0: np.ndarray,
        plan: ThresholdPlan,
        stats: list[IterationStats],
        states: list[IterationState] | None,
    ) -> np.ndarray:
        cfg = self.cfg
        height, width = y0.shape
        x = apply_H_inverse(y0, self.op)

        for k, (lam, beta) in enumerate(zip(plan.lambdas, plan.betas), start=1):
            matcher = PatchMatcher(x, cfg.patch, iteration=k)
            groups = matcher.build_groups()
            denoised = denoise_groups([g.matrix for g in groups], lam, cfg.threshold_mode)
            groups = [g.with_matrix(m) for g, m in zip(groups, denoised)]
            z = aggregate(groups, height, width).plane(0)

            candidate = apply_H(z, self.op)
            if cfg.feedback_delta is not None:
                candidate = feedback_blend(candidate, y0, cfg.feedback_delta)
            clip_beta = max(beta - cfg.beta_guard, np.finfo(float).eps)
            y = clip_plane(candidate, coeffs, index, clip_beta)

            report = check_plane(y, coeffs, index, beta)
            residual = float(np.linalg.norm(y - z))
            stats.append(
                IterationStats(
                    component=index,
                    k=k,
                    lam=lam,
                    beta=beta,
                    residual_norm=residual,
                    violations=report.count,
                    relaxed_groups=sum(g.relaxed for g in groups),
                )
            )
            logger.info(
                "Component %d iteration %d/%d: lambda=%.3f beta=%.2f groups=%d residual=%.2f",
                index,
                k,
                plan.iterations,
                lam,
                beta,
                len(groups),
                residual,
            )
            if report.count:
                logger.warning(
                    "Component %d iteration %d: %d infeasible coefficients", index, k, report.count
                )

            x = apply_H_inverse(y, self.op)
            if states is not None:
                states.append(
                    IterationState(component=index, k=k, x=x.copy(), z=z, y=y, lam=lam, beta=beta)
                )
        return x


def restore(
    coeffs: CoefficientImage,
    op: DegradationOperator | None = None,
    cfg: RestorationConfig | None = None,
    reference: PixelImage | None = None,
) -> PixelImage:
    """Convenience function: run the pipeline and return the exported image."""
    return RestorationPipeline(cfg, op).run(coeffs, reference=reference).image


def soft_decode(
    coeffs: CoefficientImage,
    cfg: RestorationConfig | None = None,
    reference: PixelImage | None = None,
) -> PixelImage:
    """``restore`` with H = identity."""
    return restore(coeffs, DegradationOperator.identity(), cfg, reference)
