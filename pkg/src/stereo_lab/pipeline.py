"""End-to-end matching and the guidance sweep."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from stereo_lab import refiner
from stereo_lab._threads import max_workers
from stereo_lab.cost_volume import build_correlation, featurize
from stereo_lab.errors import PreconditionError
from stereo_lab.evaluation import avg_err, bad_ratio
from stereo_lab.geometry import depth_to_disparity, disparity_to_depth
from stereo_lab.points import SparsePointSet
from stereo_lab.prefill import fill_ipbasic, fill_nearest
from stereo_lab.sparsify import sample_uniform

VARIANTS = ("zero", "naive", "prefilled", "fill")


@dataclass(frozen=True)
class MatchConfig:
    features: str = "census"
    window: int = 5
    iters: int = refiner.DEFAULT_ITERS
    radius: int = refiner.DEFAULT_RADIUS
    smooth_radius: int = refiner.DEFAULT_SMOOTH_RADIUS
    max_disp: float = refiner.MAX_DISP
    prefill: str = "nearest"


def cost_volume_for(left, right, config: MatchConfig):
    xl = featurize(left, config.features, config.window)
    xr = featurize(right, config.features, config.window)
    return build_correlation(xl, xr)


def to_disparity_points(points: SparsePointSet, rig=None):
    if points.unit == "px":
        return points
    if rig is None:
        raise PreconditionError("depth points need a camera rig to become disparities")
    return points.with_values(depth_to_disparity(points.values, rig), "px")


def prefill_disparity(points: SparsePointSet, method="nearest", rig=None):
    """Dense disparity from sparse points.

    Nearest fill runs in the points' own unit; the morphological fill always
    runs on depth and needs ``rig`` to convert.
    """
    if method == "nearest":
        return depth_or_disp_to_disp(fill_nearest(points), points.unit, rig)
    if method == "ipbasic":
        if rig is None:
            raise PreconditionError("ipbasic pre-fill needs a camera rig")
        depth_pts = points if points.unit == "m" else points.with_values(
            disparity_to_depth(points.values, rig), "m")
        return depth_to_disparity(fill_ipbasic(depth_pts), rig)
    raise PreconditionError(f"unknown pre-fill method {method!r}")


def depth_or_disp_to_disp(grid, unit, rig):
    if unit == "px":
        return grid
    if rig is None:
        raise PreconditionError("depth map needs a camera rig to become disparity")
    return depth_to_disparity(grid, rig)


def initial_map(shape, variant, points=None, rig=None, config=MatchConfig()):
    if variant == "zero" or points is None:
        d0, _ = refiner.init_disparity(shape, max_disp=config.max_disp)
    elif variant == "naive":
        d0, _ = refiner.init_disparity(shape, guidance=to_disparity_points(points, rig),
                                       max_disp=config.max_disp)
    elif variant in ("prefilled", "fill"):
        dense = prefill_disparity(points, config.prefill, rig)
        d0, _ = refiner.init_disparity(shape, prefilled=dense, max_disp=config.max_disp)
    else:
        raise PreconditionError(f"unknown variant {variant!r}")
    return d0


def match(left, right, d0=None, config: MatchConfig = MatchConfig(), cost=None):
    """Refine from ``d0`` (zeros when omitted); returns the full trace."""
    if cost is None:
        cost = cost_volume_for(left, right, config)
    shape = cost.shape[:2]
    if d0 is None:
        d0 = np.zeros(shape)
    return refiner.run(cost, d0, config.iters, config.radius, config.smooth_radius, config.max_disp)


@dataclass
class SweepRecord:
    scene: int
    variant: str
    n_points: int
    bad1: float
    bad2: float
    avg_err: float
    curve: list  # avg_err per iteration; a single value for "fill"


def _scene_records(index, scene, counts, variants, config, seed):
    mask = np.isfinite(scene.gt)
    cost = cost_volume_for(scene.left, scene.right, config)
    shape = scene.gt.shape
    out = []
    zero_curve = None
    for n in counts:
        points = sample_uniform(scene.gt, n, seed=seed + index, unit="px") if n else None
        for variant in variants:
            if variant == "zero" and zero_curve is not None:
                final, curve = zero_curve
            else:
                d0 = initial_map(shape, variant, points, scene.rig, config)
                if variant == "fill":
                    final, curve = d0, [avg_err(d0, scene.gt, mask, config.max_disp)]
                else:
                    trace = refiner.run(cost, d0, config.iters, config.radius,
                                        config.smooth_radius, config.max_disp)
                    curve = [avg_err(s, scene.gt, mask, config.max_disp) for s in trace.snapshots]
                    final = trace.final
                if variant == "zero":
                    zero_curve = (final, curve)
            out.append(SweepRecord(
                index, variant, n,
                bad_ratio(final, scene.gt, mask, 1.0, config.max_disp),
                bad_ratio(final, scene.gt, mask, 2.0, config.max_disp),
                curve[-1], curve,
            ))
    return out


def sweep(scenes, counts=(100, 300, 1000, 3000), variants=("zero", "naive", "prefilled"),
          config: MatchConfig = MatchConfig(), seed=0):
    """Per-scene records for every (point count, variant) pair.

    Point sets are drawn uniformly from each scene's ground truth with seed
    ``seed + scene index``.  The zero variant ignores points and is run
    once per scene.
    """
    for v in variants:
        if v not in VARIANTS:
            raise PreconditionError(f"unknown variant {v!r}")
    jobs = list(enumerate(scenes))
    with ThreadPoolExecutor(max_workers=max_workers()) as pool:
        parts = pool.map(lambda job: _scene_records(job[0], job[1], counts, variants, config, seed),
                         jobs)
        return [rec for part in parts for rec in part]


def summarize(records):
    """Corpus means keyed by ``(variant, n_points)``."""
    groups = {}
    for r in records:
        groups.setdefault((r.variant, r.n_points), []).append(r)
    return {
        key: {
            "bad1": float(np.mean([r.bad1 for r in recs])),
            "bad2": float(np.mean([r.bad2 for r in recs])),
            "avg_err": float(np.mean([r.avg_err for r in recs])),
            "scenes": len(recs),
        }
        for key, recs in groups.items()
    }
