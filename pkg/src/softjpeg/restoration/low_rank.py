"""
Low-rank estimation of patch groups.

LEARNING NOTE: Soft vs. hard singular-value thresholding
--------------------------------------------------------
The nuclear-norm problem  min_X ||Y - X||_F^2 + λ ||X||_*  is solved in
closed form by shrinking every singular value of Y by λ (soft). Shrinking
also biases the surviving components towards zero, which hurts when the
"noise" is quantization error that is strongly correlated with the signal.
Hard thresholding keeps the survivors untouched and only kills the small
singular values: same rank as the soft solution, but closer to Y in second
moment. The residual it removes is exactly the energy of the killed values,
which is why λ is tied to the compression RMSE ε:

    λ = C_λ · ε · sqrt(max(M, m))
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from softjpeg.codec.decode import hard_decode, rgb_to_ycbcr
from softjpeg.exceptions import NonFiniteError
from softjpeg.models.images import CoefficientImage, PixelImage
from softjpeg.models.schemas import RestorationConfig, ThresholdMode, ThresholdPlan
from softjpeg.utils.logger import get_logger

logger = get_logger(__name__)

# batch size for stacked SVDs (groups × 64 × 60 doubles)
SVD_CHUNK = 512
# pooled non-zero indices needed before a tail decay is trusted
TAIL_SUPPORT = 16


@dataclass(frozen=True)
class SvdFactors:
    """Thin SVD Y = U diag(s) Vᵀ; ``s`` is sorted descending."""

    u: np.ndarray
    s: np.ndarray
    vt: np.ndarray

    @property
    def v(self) -> np.ndarray:
        return self.vt.T

    @property
    def rank(self) -> int:
        return int(self.s.size)

    def reconstruct(self, s: np.ndarray | None = None) -> np.ndarray:
        values = self.s if s is None else s
        return (self.u * values) @ self.vt


def svd(Y: np.ndarray) -> SvdFactors:
    Y = np.asarray(Y, dtype=np.float64)
    if not np.all(np.isfinite(Y)):
        raise NonFiniteError("Matrix holds NaN or infinite entries")
    u, s, vt = np.linalg.svd(Y, full_matrices=False)
    return SvdFactors(u=u, s=s, vt=vt)


def soft_threshold(s: np.ndarray, lam: float) -> np.ndarray:
    """max(σ - λ, 0) elementwise."""
    if lam < 0:
        raise ValueError("Threshold must be non-negative")
    return np.maximum(np.asarray(s, dtype=np.float64) - lam, 0.0)


def hard_threshold(s: np.ndarray, lam: float) -> np.ndarray:
    """Keep σ where σ > λ (strictly), zero elsewhere."""
    if lam < 0:
        raise ValueError("Threshold must be non-negative")
    s = np.asarray(s, dtype=np.float64)
    return np.where(s > lam, s, 0.0)


def _threshold(s: np.ndarray, lam: float, mode: ThresholdMode | str) -> np.ndarray:
    if ThresholdMode(mode) == ThresholdMode.SOFT:
        return soft_threshold(s, lam)
    return hard_threshold(s, lam)


def denoise_group(
    Y: np.ndarray, lam: float, mode: ThresholdMode | str = ThresholdMode.HARD
) -> np.ndarray:
    """U · T_λ(Σ) · Vᵀ for one group matrix."""
    factors = svd(Y)
    return factors.reconstruct(_threshold(factors.s, lam, mode))


def denoise_groups(
    matrices: list[np.ndarray], lam: float, mode: ThresholdMode | str = ThresholdMode.HARD
) -> list[np.ndarray]:
    """
    Batched ``denoise_group``: matrices of equal shape are stacked and sent
    through one ``np.linalg.svd`` call per chunk.
    """
    out: list[np.ndarray | None] = [None] * len(matrices)
    by_shape: dict[tuple[int, ...], list[int]] = {}
    for index, matrix in enumerate(matrices):
        by_shape.setdefault(matrix.shape, []).append(index)

    for indices in by_shape.values():
        for start in range(0, len(indices), SVD_CHUNK):
            chunk = indices[start : start + SVD_CHUNK]
            stack = np.stack([matrices[i] for i in chunk]).astype(np.float64, copy=False)
            if not np.all(np.isfinite(stack)):
                raise NonFiniteError("Patch group holds NaN or infinite entries")
            u, s, vt = np.linalg.svd(stack, full_matrices=False)
            kept = _threshold(s, lam, mode)
            rebuilt = (u * kept[:, np.newaxis, :]) @ vt
            for offset, index in enumerate(chunk):
                out[index] = rebuilt[offset]
    return [m for m in out if m is not None]


def lambda_from_epsilon(epsilon: float, m: int, M: int, c_lambda: float) -> float:
    """λ = C_λ · ε · sqrt(max(M, m))."""
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    return c_lambda * epsilon * math.sqrt(max(M, m))


def plan_thresholds(epsilon: float, cfg: RestorationConfig) -> ThresholdPlan:
    """
    λ halves every iteration, except that the last one uses λ₁/4 when K > 3;
    β is ``beta_mid`` before the last iteration and ``beta_final`` at it.
    """
    K = cfg.iterations
    first = lambda_from_epsilon(epsilon, cfg.patch.patch_dim, cfg.patch.group_size, cfg.c_lambda)
    lambdas = [first / 2 ** (k - 1) for k in range(1, K + 1)]
    if K > 3:
        lambdas[-1] = first / 4.0
    betas = [cfg.beta_mid] * (K - 1) + [cfg.beta_final]
    plan = ThresholdPlan(
        epsilon=epsilon,
        c_lambda=cfg.c_lambda,
        iterations=K,
        lambdas=tuple(lambdas),
        betas=tuple(betas),
    )
    logger.info(
        "Threshold plan: eps=%.3f lambdas=%s betas=%s",
        epsilon,
        [round(v, 3) for v in plan.lambdas],
        list(plan.betas),
    )
    return plan


def _laplacian_mse(lam: float, q: float) -> float:
    """Expected squared quantization error of a Laplacian with rate ``lam`` (both sides)."""
    if not math.isfinite(lam):
        return 0.0
    half = q / 2.0

    def second_moment(lo: float, hi: float, centre: float) -> float:
        """∫_lo^hi (u - centre)² λ e^{-λu} du in closed form."""

        def primitive(u: float) -> float:
            w = u - centre
            return -math.exp(-lam * u) * (w * w + 2.0 * w / lam + 2.0 / (lam * lam))

        return primitive(hi) - primitive(lo)

    # one side of the symmetric density; the dead zone [0, q/2) plus all outer cells
    dead = second_moment(0.0, half, 0.0)
    r = math.exp(-lam * q)
    outer = second_moment(half, half + q, q) / (1.0 - r)
    return dead + outer


def _fitted_rate(zeros: int, nonzeros: int, abs_sum: float, q: float) -> float:
    """
    Maximum-likelihood Laplacian rate from the quantized indices of one frequency.

    With t = exp(-λq/2) the likelihood of N0 zeros, N1 non-zeros and
    S = Σ|γ| is maximized at the root of (N + 2S) t² + N0 t - (2S - N1) = 0.
    No non-zero index means an infinite rate.
    """
    if nonzeros == 0:
        return math.inf
    a = zeros + nonzeros + 2.0 * abs_sum
    b = float(zeros)
    c = -(2.0 * abs_sum - nonzeros)
    t = (-b + math.sqrt(b * b - 4.0 * a * c)) / (2.0 * a)
    t = min(max(t, 1e-12), 1.0 - 1e-12)
    return -2.0 * math.log(t) / q


def _tail_ratio(nonzeros: int, abs_sum: float) -> float:
    """
    Decay r = exp(-λq) of the non-zero magnitudes, fitted as a geometric law.

    Half a pseudo-observation keeps r above zero when every magnitude is 1.
    """
    return (abs_sum - nonzeros + 0.5) / (abs_sum + 0.5)


def _frequency_mse(
    zeros: int, nonzeros: int, abs_sum: float, tail_nonzeros: int, tail_abs_sum: float, q: float
) -> float:
    """
    Expected squared quantization error of one AC frequency.

    The tail decay comes from the non-zero magnitudes (``tail_*``, possibly
    pooled over neighbouring frequencies). A Laplacian with that decay puts
    mass sqrt(r) outside the dead zone; when fewer indices than that are
    non-zero, the rest of the coefficients are treated as an error-free
    spike at zero. A distribution lighter-tailed than Laplacian falls back
    to the plain maximum-likelihood fit.
    """
    if nonzeros == 0:
        return 0.0
    r = _tail_ratio(tail_nonzeros, tail_abs_sum)
    active = nonzeros / (zeros + nonzeros) / math.sqrt(r)
    if active < 1.0:
        mse = active * _laplacian_mse(-math.log(r) / q, q)
    else:
        mse = _laplacian_mse(_fitted_rate(zeros, nonzeros, abs_sum, q), q)
    logger.debug(
        "Frequency fit: zeros=%d nonzeros=%d active=%.3f mse=%.4g", zeros, nonzeros, active, mse
    )
    return mse


def _pooled_tails(nonzeros: np.ndarray, abs_sums: np.ndarray) -> list[tuple[int, float]]:
    """Grow a zig-zag window around every frequency until it holds TAIL_SUPPORT non-zeros."""
    size = nonzeros.size
    pooled = []
    for k in range(size):
        lo, hi = k, k + 1
        while int(nonzeros[lo:hi].sum()) < TAIL_SUPPORT and (lo > 0 or hi < size):
            lo, hi = max(lo - 1, 0), min(hi + 1, size)
        pooled.append((int(nonzeros[lo:hi].sum()), float(abs_sums[lo:hi].sum())))
    return pooled


def estimate_epsilon(
    coeffs: CoefficientImage, component: int = 0, reference: PixelImage | None = None
) -> float:
    """
    Spatial RMSE introduced by quantizing one component.

    With a ground-truth ``reference`` (oracle mode) this is the exact RMSE of
    the hard decode against it, measured on the same channel. Without it
    (blind mode) every AC frequency gets a zero-inflated Laplacian fitted to
    its indices and the expected error is integrated per cell; DC error is
    taken as uniform (q²/12). The DCT is unitary, so the mean over the 64
    frequencies is the per-pixel MSE.
    """
    if reference is not None:
        decoded = hard_decode(coeffs)
        decoded.require_same_geometry(reference)
        if decoded.channels == 1:
            diff = decoded.plane(0) - reference.plane(0)
        else:
            ours = rgb_to_ycbcr(decoded.samples)[..., component]
            diff = ours - rgb_to_ycbcr(reference.samples)[..., component]
        return float(np.sqrt(np.mean(diff**2)))

    comp = coeffs.components[component]
    steps = np.asarray(coeffs.table_for(component).entries, dtype=np.float64)
    # zig-zag order, so neighbouring columns are neighbouring frequencies
    ac = np.abs(comp.blocks.reshape(-1, 64)[:, 1:])
    nonzeros = np.count_nonzero(ac, axis=0)
    abs_sums = ac.sum(axis=0, dtype=np.float64)
    tails = _pooled_tails(nonzeros, abs_sums)

    mse = np.empty(64)
    mse[0] = steps[0] ** 2 / 12.0
    for k in range(63):
        tail_nonzeros, tail_abs_sum = tails[k]
        mse[k + 1] = _frequency_mse(
            zeros=ac.shape[0] - int(nonzeros[k]),
            nonzeros=int(nonzeros[k]),
            abs_sum=float(abs_sums[k]),
            tail_nonzeros=tail_nonzeros,
            tail_abs_sum=tail_abs_sum,
            q=float(steps[k + 1]),
        )
    epsilon = float(np.sqrt(mse.mean()))
    logger.info("Blind epsilon estimate for component %d: %.3f", component, epsilon)
    return epsilon
