"""Densify sparse guidance before it enters the matcher.

Two fills are provided: nearest-sample (Voronoi) interpolation and a
morphological pipeline in the style of IP-Basic.  ``subsample_topk`` turns
a dense fill back into a sparse set by keeping its most trusted pixels.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import cv2
import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from stereo_lab.errors import PreconditionError
from stereo_lab.points import SparsePointSet

__all__ = [
    "IPBasicConfig",
    "SparsePointSet",
    "TopKWarning",
    "distance_confidence",
    "fill_ipbasic",
    "fill_nearest",
    "ipbasic_stages",
    "subsample_topk",
]

DIAMOND_KERNEL_5 = np.array(
    [
        [0, 0, 1, 0, 0],
        [0, 1, 1, 1, 0],
        [1, 1, 1, 1, 1],
        [0, 1, 1, 1, 0],
        [0, 0, 1, 0, 0],
    ],
    dtype=np.uint8,
)


class TopKWarning(UserWarning):
    """Fewer valid pixels than requested; all of them were returned."""


def _resolve_shape(sparse, shape):
    if shape is None:
        return sparse.shape
    shape = (int(shape[0]), int(shape[1]))
    if shape != sparse.shape:
        raise PreconditionError(f"requested shape {shape} != point-set frame {sparse.shape}")
    return shape


def fill_nearest(sparse: SparsePointSet, shape=None):
    """Give every pixel the value of its Euclidean-nearest sample.

    Equidistant samples resolve to the earliest one in row-major order, so
    the result does not depend on the order of ``sparse``.
    """
    if len(sparse) == 0:
        raise PreconditionError("fill_nearest needs at least one sample")
    h, w = _resolve_shape(sparse, shape)
    pts = sparse.sorted()
    coords = np.stack([pts.rows, pts.cols], axis=1)
    tree = cKDTree(coords)

    grid_r, grid_c = np.mgrid[0:h, 0:w]
    pix = np.stack([grid_r.ravel(), grid_c.ravel()], axis=1)
    k = min(len(pts), 4)
    _, idx = tree.query(pix, k=k)
    idx = idx.reshape(len(pix), k)

    d2 = ((coords[idx] - pix[:, None, :]) ** 2).sum(axis=-1)
    best = d2.min(axis=1)
    # lowest sample index among the exact minima
    cand = np.where(d2 == best[:, None], idx, np.iinfo(np.intp).max)
    choice = cand.min(axis=1)

    if k < len(pts):
        # all k returned neighbours tie: more equidistant samples may exist
        crowded = np.nonzero((d2 == best[:, None]).all(axis=1))[0]
        for i in crowded:
            near = tree.query_ball_point(pix[i], np.sqrt(best[i]) + 1e-6)
            near = [j for j in near if ((coords[j] - pix[i]) ** 2).sum() == best[i]]
            choice[i] = min(near)

    return pts.values[choice].reshape(h, w)


@dataclass(frozen=True)
class IPBasicConfig:
    max_depth: float = 100.0
    close_size: int = 5
    large_hole_size: int = 31
    median_size: int = 5
    gaussian_size: int = 5
    extend_top: bool = True


def ipbasic_stages(sparse: SparsePointSet, shape=None, config: IPBasicConfig = IPBasicConfig()):
    """Run the morphological fill and return every intermediate map.

    Working maps are in inverted depth (``max_depth - z``) with 0 marking
    empty pixels.  Each stage writes only into pixels that were empty in the
    sparse input, so sample values are never altered.
    """
    if len(sparse) == 0:
        raise PreconditionError("fill_ipbasic needs at least one sample")
    if sparse.unit != "m":
        raise PreconditionError("fill_ipbasic expects depth samples in meters")
    h, w = _resolve_shape(sparse, shape)

    top = max(config.max_depth, float(sparse.values.max())) + 1.0
    work = np.zeros((h, w), dtype=np.float64)
    work[sparse.rows, sparse.cols] = top - sparse.values
    sample = work > 0
    stages = {"inverted": work.copy()}

    def fill_empty(candidate):
        empty = work <= 0
        work[empty] = candidate[empty]

    fill_empty(cv2.dilate(work, DIAMOND_KERNEL_5))
    stages["dilated"] = work.copy()

    full_close = np.ones((config.close_size, config.close_size), np.uint8)
    fill_empty(cv2.morphologyEx(work, cv2.MORPH_CLOSE, full_close))
    stages["closed"] = work.copy()

    if config.extend_top:
        valid = work > 0
        has_any = valid.any(axis=0)
        top_row = np.argmax(valid, axis=0)
        above = np.arange(h)[:, None] < top_row[None, :]
        top_val = work[top_row, np.arange(w)]
        work[above & has_any[None, :]] = np.broadcast_to(top_val, (h, w))[above & has_any[None, :]]
    stages["extended"] = work.copy()

    large = np.ones((config.large_hole_size, config.large_hole_size), np.uint8)
    while np.any(work <= 0):
        fill_empty(cv2.dilate(work, large))
    stages["large_filled"] = work.copy()

    filled_only = ~sample
    med = ndimage.median_filter(work, size=config.median_size, mode="nearest")
    work[filled_only] = med[filled_only]
    g = config.gaussian_size
    blurred = cv2.GaussianBlur(work, (g, g), 0)
    work[filled_only] = blurred[filled_only]
    stages["blurred"] = work.copy()

    depth = top - work
    depth[sample] = sparse.to_dense()[sample]
    stages["depth"] = depth
    return stages


def fill_ipbasic(sparse: SparsePointSet, shape=None, config: IPBasicConfig = IPBasicConfig()):
    """Dense, positive depth map from sparse depth samples (meters)."""
    return ipbasic_stages(sparse, shape, config)["depth"]


def distance_confidence(sparse: SparsePointSet, shape=None):
    """Negative Euclidean distance (pixels) to the nearest original sample."""
    h, w = _resolve_shape(sparse, shape)
    empty = np.ones((h, w), dtype=bool)
    empty[sparse.rows, sparse.cols] = False
    return -ndimage.distance_transform_edt(empty)


def subsample_topk(dense, confidence, k, unit="m"):
    """Keep the ``k`` most confident valid pixels of ``dense``.

    Ties in confidence resolve in row-major order.  When fewer than ``k``
    pixels are valid, all are returned and a :class:`TopKWarning` is issued.
    """
    if k < 1:
        raise PreconditionError(f"k must be >= 1, got {k}")
    dense = np.asarray(dense, dtype=np.float64)
    confidence = np.asarray(confidence, dtype=np.float64)
    if confidence.shape != dense.shape:
        raise PreconditionError("confidence and map shapes differ")
    if not np.all(np.isfinite(confidence)):
        raise PreconditionError("confidence must be finite")

    flat_val = dense.ravel()
    flat_conf = confidence.ravel()
    valid = np.nonzero(np.isfinite(flat_val) & (flat_val > 0))[0]
    if k > valid.size:
        warnings.warn(f"requested {k} points but only {valid.size} are valid", TopKWarning,
                      stacklevel=2)
        k = valid.size
    order = valid[np.argsort(-flat_conf[valid], kind="stable")][:k]
    rows, cols = np.divmod(order, dense.shape[1])
    return SparsePointSet(rows, cols, flat_val[order], dense.shape, unit)
