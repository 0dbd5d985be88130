"""Simulate cheap LiDAR from dense or semi-dense ground truth."""

from __future__ import annotations

import numpy as np

from stereo_lab.errors import PreconditionError
from stereo_lab.geometry import CameraRig
from stereo_lab.points import SparsePointSet


def _valid_mask(gt):
    gt = np.asarray(gt, dtype=np.float64)
    return np.isfinite(gt) & (gt > 0)


def sample_uniform(gt, n, seed, unit="m"):
    """Draw ``n`` valid pixels uniformly without replacement (row-major output)."""
    gt = np.asarray(gt, dtype=np.float64)
    flat = np.flatnonzero(_valid_mask(gt))
    if n < 0 or n > flat.size:
        raise PreconditionError(f"cannot draw {n} points from {flat.size} valid pixels")
    rng = np.random.default_rng(seed)
    pick = np.sort(rng.choice(flat.size, size=n, replace=False))
    rows, cols = np.divmod(flat[pick], gt.shape[1])
    return SparsePointSet(rows, cols, gt[rows, cols], gt.shape, unit)


def beam_centers(theta_min, theta_max, beams, warp=2.0):
    """Band edges and centres of a ``beams``-line scanner over [theta_min, theta_max].

    Elevation grows downward in the image.  The warp ``1 - (1 - u)**warp``
    packs bands toward the bottom; the same unit-interval edges are used for
    every beam count, so bands nest when the count doubles.
    """
    if beams < 1:
        raise PreconditionError(f"beams must be >= 1, got {beams}")
    span = theta_max - theta_min

    def g(u):
        return theta_min + span * (1.0 - (1.0 - u) ** warp)

    u = np.arange(beams + 1) / beams
    edges = g(u)
    centers = g((np.arange(beams) + 0.5) / beams)
    return edges, centers


def beam_rows(gt, rig: CameraRig, beams, warp=2.0, tol_deg=0.05):
    """Image rows hit by each beam, as a list of arrays (one per beam)."""
    valid = _valid_mask(gt)
    rows_with_data = np.nonzero(valid.any(axis=1))[0]
    if rows_with_data.size == 0:
        return [np.array([], dtype=np.int64) for _ in range(beams)]
    theta = np.arctan((np.arange(valid.shape[0]) - rig.cy) / rig.focal_px)
    t = theta[rows_with_data]
    _, centers = beam_centers(t.min(), t.max(), beams, warp)
    tol = np.deg2rad(tol_deg)
    hits = []
    for c in centers:
        nearest = t[np.argmin(np.abs(t - c))]
        hits.append(rows_with_data[np.abs(t - nearest) <= tol])
    return hits


def sample_beams(gt, rig: CameraRig, beams, warp=2.0, tol_deg=0.05, unit="m"):
    """Keep valid pixels on the scanlines nearest each beam's centre elevation.

    Elevation of row ``r`` is ``atan((r - cy) / f)``.  Rows within
    ``tol_deg`` of a beam's nearest row are kept too, which sets the stripe
    thickness.
    """
    gt = np.asarray(gt, dtype=np.float64)
    valid = _valid_mask(gt)
    keep_rows = np.zeros(gt.shape[0], dtype=bool)
    for rows in beam_rows(gt, rig, beams, warp, tol_deg):
        keep_rows[rows] = True
    rows, cols = np.nonzero(valid & keep_rows[:, None])
    return SparsePointSet(rows, cols, gt[rows, cols], gt.shape, unit)
