"""Iterative disparity refinement by local search over a cost volume.

Each step retrieves the local slab around the current estimate, picks the
best offset in the window (with a parabola sub-pixel fit), adds it to the
estimate and offers a median-smoothed alternative that is kept where it
scores no worse.  Every intermediate map is kept so any iteration can serve
as the output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from stereo_lab.cost_volume import retrieve_local
from stereo_lab.errors import PreconditionError

MAX_DISP = 192.0
DEFAULT_RADIUS = 4
DEFAULT_SMOOTH_RADIUS = 1
DEFAULT_ITERS = 32


@dataclass
class RefineTrace:
    snapshots: list = field(default_factory=list)
    residual_mean_abs: list = field(default_factory=list)

    def __len__(self):
        return len(self.snapshots)

    @property
    def final(self):
        return self.snapshots[-1]


def init_disparity(shape, guidance=None, prefilled=None, max_disp=MAX_DISP):
    """Initial disparity map.

    Zeros by default; ``guidance`` (a SparsePointSet of disparities)
    overwrites its pixels; ``prefilled`` (dense map) wins wherever it is
    finite.  Returns ``(map, n_rejected)`` where ``n_rejected`` counts
    guidance points outside the image.
    """
    h, w = shape
    disp = np.zeros((h, w), dtype=np.float64)
    rejected = 0
    if guidance is not None:
        if guidance.unit != "px":
            raise PreconditionError("guidance must be in disparity units (px)")
        rows = np.asarray(guidance.rows)
        cols = np.asarray(guidance.cols)
        inside = (rows >= 0) & (rows < h) & (cols >= 0) & (cols < w)
        rejected = int((~inside).sum())
        disp[rows[inside], cols[inside]] = np.asarray(guidance.values)[inside]
    if prefilled is not None:
        pre = np.asarray(prefilled, dtype=np.float64)
        if pre.shape != (h, w):
            raise PreconditionError(f"prefilled shape {pre.shape} != {(h, w)}")
        ok = np.isfinite(pre)
        disp[ok] = pre[ok]
    return np.clip(disp, 0.0, max_disp), rejected


def best_offset(slab):
    """Arg-max column offset per pixel with a parabola sub-pixel correction.

    Ties go to the smallest ``|offset|`` (negative side first).  The
    parabola term is limited to +-0.5 and skipped at the window edges.
    """
    n = slab.shape[-1]
    radius = n // 2
    offsets = np.arange(n) - radius
    order = np.lexsort((offsets, np.abs(offsets)))
    ordered = slab[..., order]
    pick = order[np.argmax(ordered, axis=-1)]

    inner = (pick > 0) & (pick < n - 1)
    safe = np.clip(pick, 1, n - 2)[..., None]
    left = np.take_along_axis(slab, safe - 1, axis=-1)[..., 0]
    mid = np.take_along_axis(slab, safe, axis=-1)[..., 0]
    right = np.take_along_axis(slab, safe + 1, axis=-1)[..., 0]
    curv = left - 2.0 * mid + right
    sub = np.zeros_like(mid)
    np.divide(left - right, 2.0 * curv, out=sub, where=inner & (curv < 0))
    sub = np.clip(sub, -0.5, 0.5)
    return (pick - radius) + sub


def score_at(cost, disparity):
    """Linearly interpolated cost at column ``w - D`` for every pixel."""
    return retrieve_local(cost, disparity, 1)[..., 1]


def refine_step(cost, disparity, radius=DEFAULT_RADIUS, smooth_radius=DEFAULT_SMOOTH_RADIUS,
                max_disp=MAX_DISP):
    """One update ``D + residual``, clipped to ``[0, max_disp]``.

    A slab peak at column offset ``k`` means the match sits at
    ``w - (D - k)``, so the raw residual in disparity units is ``-k``.

    Smoothing proposes the median of the locally updated map and keeps it
    only where it scores strictly better than the best sample in the window,
    with the step limited to ``radius + 0.5`` pixels.  A plain median of the
    residual field amplifies column-alternating errors, and an unguarded
    median of the map drags correct isolated peaks toward their neighbours.

    Returns ``(new_disparity, residual)`` where ``residual`` is the step
    that was applied before clipping to the disparity range.
    """
    disparity = np.asarray(disparity, dtype=np.float64)
    anchor = np.rint(disparity)
    slab = retrieve_local(cost, anchor, radius)
    bound = radius + 0.5
    residual = np.clip(anchor - disparity - best_offset(slab), -bound, bound)
    if smooth_radius > 0:
        size = 2 * smooth_radius + 1
        local = disparity + residual
        smoothed = ndimage.median_filter(local, size=size, mode="nearest")
        smoothed = disparity + np.clip(smoothed - disparity, -bound, bound)
        better = score_at(cost, smoothed) > slab.max(axis=-1)
        residual = np.where(better, smoothed - disparity, residual)
    updated = np.clip(disparity + residual, 0.0, max_disp)
    return updated, residual


def run(cost, d0, iters=DEFAULT_ITERS, radius=DEFAULT_RADIUS,
        smooth_radius=DEFAULT_SMOOTH_RADIUS, max_disp=MAX_DISP) -> RefineTrace:
    if iters < 1:
        raise PreconditionError(f"iters must be >= 1, got {iters}")
    trace = RefineTrace()
    disp = np.clip(np.asarray(d0, dtype=np.float64), 0.0, max_disp)
    for _ in range(iters):
        disp, residual = refine_step(cost, disp, radius, smooth_radius, max_disp)
        trace.snapshots.append(disp)
        trace.residual_mean_abs.append(float(np.mean(np.abs(residual))))
    return trace
