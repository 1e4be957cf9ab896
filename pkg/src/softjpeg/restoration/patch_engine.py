"""
Non-local grouping of similar patches, aware of the JPEG block phase.

LEARNING NOTE: Why the block phase matters
------------------------------------------
Two patches at the same position relative to the 8×8 coding lattice
(same ``x mod 8`` and ``y mod 8``) that sit on similar edges carry nearly
identical quantization noise: ringing has a fixed shape once aligned to the
edge. Stacking them makes the noise look like signal to a low-rank model.
So, around edges, a group takes at most one patch per phase, and for
horizontal/vertical edges candidates on the same pixel row/column (whose
noise is aligned with the anchor's) are penalized.

Other rules:
- the search window shrinks for smooth anchors (they are nearly noise free)
- distances use a low-pass copy of the image, first iteration only
- ties are broken by scan order so grouping is deterministic
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.ndimage import gaussian_filter

from softjpeg.exceptions import CoverageHoleError, InsufficientCandidatesError
from softjpeg.models.images import ColorSpace, PixelImage
from softjpeg.models.schemas import EdgeOrientation, PatchClass, PatchSpec
from softjpeg.transform import BLOCK
from softjpeg.utils.logger import get_logger

logger = get_logger(__name__)

# 3×3 support for sigma 0.8
PREFILTER_TRUNCATE = 1.25


@dataclass(frozen=True)
class PatchGroup:
    """
    One group of similar patches.

    ``coords`` are (x, y) top-left corners, anchor first. ``matrix`` is
    m × M with one vectorized (row-major) patch per column.
    """

    anchor: tuple[int, int]
    coords: np.ndarray
    matrix: np.ndarray
    anchor_class: PatchClass
    orientation: EdgeOrientation | None = None
    relaxed: bool = False

    @property
    def size(self) -> int:
        return int(self.coords.shape[0])

    @property
    def phases(self) -> np.ndarray:
        """(x mod 8, y mod 8) of every member."""
        return self.coords % BLOCK

    def with_matrix(self, matrix: np.ndarray) -> PatchGroup:
        if matrix.shape != self.matrix.shape:
            raise ValueError(f"Matrix {matrix.shape} does not match group {self.matrix.shape}")
        return replace(self, matrix=matrix)


def _orientation(jxx: float, jxy: float, jyy: float) -> EdgeOrientation:
    """Edge direction, perpendicular to the dominant gradient (y grows downwards)."""
    angle = 0.5 * np.degrees(np.arctan2(2.0 * jxy, jxx - jyy))  # gradient angle in (-90, 90]
    if abs(angle) < 22.5:
        return EdgeOrientation.VERTICAL
    if abs(angle) > 67.5:
        return EdgeOrientation.HORIZONTAL
    # gradient along (1, 1) means the edge runs along (1, -1)
    return EdgeOrientation.ANTI_DIAGONAL if angle > 0 else EdgeOrientation.DIAGONAL


def classify_patch(
    patch: np.ndarray, spec: PatchSpec | None = None
) -> tuple[PatchClass, EdgeOrientation | None]:
    """
    Smooth if the variance is strictly below ``smooth_variance``; edge if the
    structure tensor is strongly anisotropic and the mean squared gradient
    exceeds ``edge_energy``; texture otherwise.
    """
    spec = spec or PatchSpec()
    patch = np.asarray(patch, dtype=np.float64)
    if float(np.var(patch)) < spec.smooth_variance:
        return PatchClass.SMOOTH, None

    gx = np.diff(patch, axis=1)[:-1, :]
    gy = np.diff(patch, axis=0)[:, :-1]
    jxx, jyy, jxy = float(np.mean(gx * gx)), float(np.mean(gy * gy)), float(np.mean(gx * gy))
    energy = jxx + jyy
    root = np.sqrt(((jxx - jyy) / 2.0) ** 2 + jxy * jxy)
    major, minor = energy / 2.0 + root, max(energy / 2.0 - root, 0.0)
    if energy > spec.edge_energy and major > spec.edge_ratio * minor:
        return PatchClass.EDGE, _orientation(jxx, jxy, jyy)
    return PatchClass.TEXTURE, None


class PatchMatcher:
    """
    Block matching over one image plane for one iteration.

    Construct once per iteration; ``find`` is read-only on the image and can
    be called for any anchor.
    """

    def __init__(self, image: np.ndarray, spec: PatchSpec | None = None, iteration: int = 1):
        self.spec = spec or PatchSpec()
        self.image = np.asarray(image, dtype=np.float64)
        p = self.spec.patch_size
        if self.image.ndim != 2 or min(self.image.shape) < p:
            raise ValueError(f"Image plane {self.image.shape} is smaller than one {p}×{p} patch")
        self.height, self.width = self.image.shape
        self.iteration = iteration

        match = self.image
        if iteration == 1 and self.spec.prefilter_sigma > 0:
            match = gaussian_filter(
                self.image, sigma=self.spec.prefilter_sigma, truncate=PREFILTER_TRUNCATE
            )
        self.match_image = match
        self._match_patches = sliding_window_view(match, (p, p))
        self._patches = sliding_window_view(self.image, (p, p))
        self.max_x = self.width - p
        self.max_y = self.height - p

    def anchors(self) -> list[tuple[int, int]]:
        """Stride grid of anchor corners, always including the last row and column."""
        xs = sorted(set(range(0, self.max_x + 1, self.spec.stride)) | {self.max_x})
        ys = sorted(set(range(0, self.max_y + 1, self.spec.stride)) | {self.max_y})
        return [(x, y) for y in ys for x in xs]

    def _window(self, anchor: int, window: int, limit: int) -> tuple[int, int]:
        """Inclusive [lo, hi] range of corners, shifted to stay inside the image."""
        half = window // 2
        lo = min(max(anchor - half, 0), max(limit - 2 * half, 0))
        return lo, min(lo + 2 * half, limit)

    def _candidates(
        self,
        anchor: tuple[int, int],
        window: int,
        patch_class: PatchClass,
        orientation: EdgeOrientation | None,
        exclude_phases: bool,
        group_size: int,
    ) -> np.ndarray:
        ax, ay = anchor
        x0, x1 = self._window(ax, window, self.max_x)
        y0, y1 = self._window(ay, window, self.max_y)
        xs, ys = np.meshgrid(np.arange(x0, x1 + 1), np.arange(y0, y1 + 1))
        xs, ys = xs.ravel(), ys.ravel()

        m = self.spec.patch_dim
        region = self._match_patches[y0 : y1 + 1, x0 : x1 + 1].reshape(-1, m)
        reference = self._match_patches[ay, ax].reshape(m)
        dist = np.sum((region - reference) ** 2, axis=1)

        if patch_class == PatchClass.EDGE and orientation == EdgeOrientation.HORIZONTAL:
            dist = np.where(ys == ay, dist * self.spec.row_penalty, dist)
        elif patch_class == PatchClass.EDGE and orientation == EdgeOrientation.VERTICAL:
            dist = np.where(xs == ax, dist * self.spec.row_penalty, dist)

        is_anchor = (xs == ax) & (ys == ay)
        dist = np.where(is_anchor, -1.0, dist)
        order = np.argsort(dist, kind="stable")

        if exclude_phases:
            phase_ids = (ys[order] % BLOCK) * BLOCK + (xs[order] % BLOCK)
            _, first = np.unique(phase_ids, return_index=True)
            order = order[np.sort(first)]

        if order.size < group_size:
            raise InsufficientCandidatesError(
                f"Anchor {anchor}: {order.size} admissible candidates for a group of {group_size}"
            )
        chosen = order[:group_size]
        return np.stack([xs[chosen], ys[chosen]], axis=1)

    def find(self, anchor: tuple[int, int]) -> PatchGroup:
        ax, ay = anchor
        if not (0 <= ax <= self.max_x and 0 <= ay <= self.max_y):
            raise ValueError(f"Anchor {anchor} lies outside the image")
        spec = self.spec
        patch_class, orientation = classify_patch(self._match_patches[ay, ax], spec)
        window = spec.smooth_window if patch_class == PatchClass.SMOOTH else spec.search_window
        edge = patch_class == PatchClass.EDGE
        positions = (self.max_x + 1) * (self.max_y + 1)

        attempts = [(window, edge, spec.group_size)]
        if edge:
            attempts.append((window, False, spec.group_size))
        for bigger in (spec.search_window, 2 * max(self.width, self.height)):
            if bigger > window:
                attempts.append((bigger, False, spec.group_size))
        attempts.append((2 * max(self.width, self.height), False, min(spec.group_size, positions)))

        for index, (win, exclude, size) in enumerate(attempts):
            try:
                coords = self._candidates(anchor, win, patch_class, orientation, exclude, size)
            except InsufficientCandidatesError as exc:
                logger.debug("%s; relaxing", exc)
                continue
            matrix = self._patches[coords[:, 1], coords[:, 0]].reshape(size, -1).T.copy()
            return PatchGroup(
                anchor=(ax, ay),
                coords=coords,
                matrix=matrix,
                anchor_class=patch_class,
                orientation=orientation,
                relaxed=index > 0,
            )
        raise InsufficientCandidatesError(f"No admissible group for anchor {anchor}")

    def build_groups(self) -> list[PatchGroup]:
        groups = [self.find(anchor) for anchor in self.anchors()]
        relaxed = sum(g.relaxed for g in groups)
        if relaxed:
            logger.warning(
                "%d of %d groups relaxed phase exclusion, window or size (iteration %d)",
                relaxed,
                len(groups),
                self.iteration,
            )
        return groups


def find_similar(
    anchor: tuple[int, int], image: np.ndarray, spec: PatchSpec | None = None, iteration: int = 1
) -> PatchGroup:
    """Convenience wrapper: one group without keeping the matcher around."""
    return PatchMatcher(image, spec, iteration).find(anchor)


def aggregate(groups: list[PatchGroup], height: int, width: int) -> PixelImage:
    """
    Per-pixel mean of all patch estimates: (Σ Rᵀ R)⁻¹ Σ Rᵀ y.

    Sums are accumulated with ``np.bincount`` in a fixed order, so the result
    does not depend on how the groups were produced.
    """
    if not groups:
        raise CoverageHoleError("No patches to aggregate")
    p = int(round(np.sqrt(groups[0].matrix.shape[0])))
    dy, dx = np.divmod(np.arange(p * p), p)
    offsets = dy * width + dx

    index_parts = []
    value_parts = []
    for group in groups:
        base = group.coords[:, 1] * width + group.coords[:, 0]
        index_parts.append((base[:, np.newaxis] + offsets[np.newaxis, :]).ravel())
        value_parts.append(group.matrix.T.ravel())
    indices = np.concatenate(index_parts)
    values = np.concatenate(value_parts)

    size = height * width
    sums = np.bincount(indices, weights=values, minlength=size)
    counts = np.bincount(indices, minlength=size)
    holes = int(np.count_nonzero(counts == 0))
    if holes:
        raise CoverageHoleError(f"{holes} pixel(s) are covered by no patch; reduce the stride")
    return PixelImage(samples=(sums / counts).reshape(height, width), color_space=ColorSpace.GRAY)
