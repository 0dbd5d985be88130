"""Rectified pinhole stereo geometry.

Both cameras share one intrinsic pair (focal length, principal point); the
right camera sits ``baseline_m`` to the right of the left one.  Disparity and
depth are related by ``Z = f * b / D``.  Invalid pixels in dense grids carry
``INVALID`` (NaN).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from stereo_lab.errors import FormatError, PreconditionError

INVALID = np.nan


@dataclass(frozen=True)
class CameraRig:
    focal_px: float
    baseline_m: float
    cx: float
    cy: float

    def __post_init__(self):
        if not self.focal_px > 0:
            raise PreconditionError(f"focal_px must be > 0, got {self.focal_px}")
        if not self.baseline_m > 0:
            raise PreconditionError(f"baseline_m must be > 0, got {self.baseline_m}")

    @property
    def fb(self) -> float:
        return self.focal_px * self.baseline_m


class Point3D(NamedTuple):
    """Point in the left-camera frame, meters.  Fields may be arrays."""

    x: float | np.ndarray
    y: float | np.ndarray
    z: float | np.ndarray


class StereoProjection(NamedTuple):
    left_row: float | np.ndarray
    left_col: float | np.ndarray
    right_row: float | np.ndarray
    right_col: float | np.ndarray
    disparity: float | np.ndarray
    in_frame: bool | np.ndarray


def _reciprocal_scaled(value, rig, name):
    if np.ndim(value) == 0:
        v = float(value)
        if not v > 0:
            raise PreconditionError(f"{name} must be > 0, got {v}")
        return rig.fb / v
    arr = np.asarray(value, dtype=np.float64)
    out = np.full(arr.shape, INVALID)
    ok = np.isfinite(arr) & (arr > 0)
    out[ok] = rig.fb / arr[ok]
    return out


def disparity_to_depth(d, rig: CameraRig):
    """Depth in meters from disparity in pixels.

    Scalars must be positive.  Arrays map zero, negative and non-finite
    disparities to ``INVALID``.
    """
    return _reciprocal_scaled(d, rig, "disparity")


def depth_to_disparity(z, rig: CameraRig):
    """Disparity in pixels from depth in meters; inverse of :func:`disparity_to_depth`."""
    return _reciprocal_scaled(z, rig, "depth")


def backproject(row, col, z, rig: CameraRig) -> Point3D:
    z = np.asarray(z, dtype=np.float64) if np.ndim(z) else float(z)
    if np.any(np.asarray(z) <= 0):
        raise PreconditionError("backproject needs z > 0")
    x = (np.asarray(col, dtype=np.float64) - rig.cx) * z / rig.focal_px
    y = (np.asarray(row, dtype=np.float64) - rig.cy) * z / rig.focal_px
    if np.ndim(x) == 0:
        return Point3D(float(x), float(y), float(z))
    return Point3D(x, y, np.broadcast_to(z, np.shape(x)).astype(np.float64))


def project_to_stereo(p: Point3D, rig: CameraRig, shape=None) -> StereoProjection:
    """Project a left-frame point into both rectified images.

    ``in_frame`` is True when both projections land inside an image of
    ``shape`` (H, W); with no shape every positive-depth point is in frame.
    """
    x, y, z = (np.asarray(v, dtype=np.float64) for v in p)
    if np.any(z <= 0):
        raise PreconditionError("project_to_stereo needs z > 0")
    disparity = rig.fb / z
    left_col = rig.cx + rig.focal_px * x / z
    row = rig.cy + rig.focal_px * y / z
    right_col = left_col - disparity
    if shape is None:
        in_frame = np.ones(np.shape(z), dtype=bool)
    else:
        h, w = shape[:2]
        in_frame = (
            (row > -0.5) & (row < h - 0.5)
            & (left_col > -0.5) & (left_col < w - 0.5)
            & (right_col > -0.5) & (right_col < w - 0.5)
        )
    fields = (row, left_col, row, right_col, disparity, in_frame)
    if np.ndim(z) == 0:
        fields = tuple(f.item() for f in fields)
    return StereoProjection(*fields)


def read_calib(path) -> CameraRig:
    """Parse ``key=value`` calibration lines (``#`` starts a comment)."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            values[key] = float(value)
        except ValueError:
            raise FormatError(f"{path}:{lineno}: bad number {value!r}") from None
    missing = {"focal_px", "baseline_m", "cx", "cy"} - values.keys()
    if missing:
        raise FormatError(f"{path}: missing keys {sorted(missing)}")
    return CameraRig(values["focal_px"], values["baseline_m"], values["cx"], values["cy"])


def write_calib(rig: CameraRig, path):
    Path(path).write_text(
        f"focal_px={rig.focal_px!r}\nbaseline_m={rig.baseline_m!r}\n"
        f"cx={rig.cx!r}\ncy={rig.cy!r}\n"
    )
