"""Disparity and depth error metrics over a validity mask."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from stereo_lab.errors import PreconditionError
from stereo_lab.geometry import disparity_to_depth
from stereo_lab.refiner import MAX_DISP


def _masked(pred, gt, mask):
    pred = np.asarray(pred, dtype=np.float64)
    gt = np.asarray(gt, dtype=np.float64)
    if pred.shape != gt.shape:
        raise PreconditionError(f"shape mismatch {pred.shape} vs {gt.shape}")
    mask = np.isfinite(gt) if mask is None else np.asarray(mask, dtype=bool)
    if not mask.any():
        raise PreconditionError("empty evaluation mask")
    return pred[mask], gt[mask]


def bad_ratio(pred, gt, mask=None, tau=1.0, max_disp=MAX_DISP):
    """Percent of masked pixels whose disparity error exceeds ``tau``."""
    if not tau > 0:
        raise PreconditionError(f"tau must be > 0, got {tau}")
    p, g = _masked(pred, gt, mask)
    err = np.abs(np.clip(p, 0.0, max_disp) - np.clip(g, 0.0, max_disp))
    return 100.0 * np.count_nonzero(err > tau) / err.size


def avg_err(pred, gt, mask=None, max_disp=MAX_DISP):
    """Mean absolute disparity error (pixels) over the mask."""
    p, g = _masked(pred, gt, mask)
    return float(np.mean(np.abs(np.clip(p, 0.0, max_disp) - np.clip(g, 0.0, max_disp))))


def depth_errors(pred_mm, gt_mm, mask=None):
    """``(rmse, mae)`` in millimeters."""
    p, g = _masked(pred_mm, gt_mm, mask)
    diff = p - g
    return float(np.sqrt(np.mean(diff * diff))), float(np.mean(np.abs(diff)))


class Scores(NamedTuple):
    bad1: float
    bad2: float
    avg_err: float
    rmse_mm: float
    mae_mm: float

    def csv_row(self):
        return ",".join(f"{v:.6f}" for v in self)


CSV_HEADER = "bad1,bad2,avg_err,rmse_mm,mae_mm"


def evaluate(pred_disp, gt_disp, rig, max_disp=MAX_DISP):
    """All five metrics on gt-valid pixels.

    Invalid predicted disparities count as zero.  Depth metrics skip pixels
    whose clipped predicted disparity is zero (infinite depth).
    """
    gt = np.asarray(gt_disp, dtype=np.float64)
    mask = np.isfinite(gt) & (gt > 0)
    pred = np.nan_to_num(np.asarray(pred_disp, dtype=np.float64), nan=0.0, posinf=max_disp, neginf=0.0)
    pred = np.clip(pred, 0.0, max_disp)
    gt = np.clip(np.where(mask, gt, 0.0), 0.0, max_disp)
    bad1 = bad_ratio(pred, gt, mask, 1.0, max_disp)
    bad2 = bad_ratio(pred, gt, mask, 2.0, max_disp)
    err = avg_err(pred, gt, mask, max_disp)
    dmask = mask & (pred > 0)
    if dmask.any():
        rmse, mae = depth_errors(disparity_to_depth(pred, rig) * 1000.0,
                                 disparity_to_depth(gt, rig) * 1000.0, dmask)
    else:
        rmse = mae = float("nan")
    return Scores(bad1, bad2, err, rmse, mae)
