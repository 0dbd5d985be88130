"""Early fusion: append per-pixel XYZ channels to both stereo images.

Each depth sample is lifted to 3D and splatted into the left and the right
image at its nearest pixel, so corresponding pixels carry the same XYZ.
Pixels without a point get zeros.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from stereo_lab.errors import PreconditionError
from stereo_lab.geometry import CameraRig, backproject, project_to_stereo
from stereo_lab.points import SparsePointSet


@dataclass
class FusedImage:
    data: np.ndarray  # H x W x 6: RGB in [0, 1] then XYZ in meters
    occupancy: np.ndarray  # H x W bool

    @property
    def rgb(self):
        return self.data[..., :3]

    @property
    def xyz(self):
        return self.data[..., 3:]


def normalize_rgb(image):
    img = np.asarray(image)
    if img.ndim == 2:
        img = np.repeat(img[:, :, None], 3, axis=2)
    if img.ndim != 3 or img.shape[2] != 3:
        raise PreconditionError(f"expected an RGB image, got shape {img.shape}")
    if np.issubdtype(img.dtype, np.integer):
        return img.astype(np.float64) / np.iinfo(img.dtype).max
    return img.astype(np.float64)


def round_half_up(x):
    return np.floor(np.asarray(x, dtype=np.float64) + 0.5)


def augment_images(left, right, points: SparsePointSet, rig: CameraRig):
    """Return ``(FusedImage, FusedImage)`` for the left and right views.

    Right-image collisions keep the nearer point; the losing point is
    dropped from both views, and so is any point whose right projection
    leaves the frame.
    """
    lrgb = normalize_rgb(left)
    rrgb = normalize_rgb(right)
    if lrgb.shape != rrgb.shape:
        raise PreconditionError("left and right images differ in shape")
    h, w = lrgb.shape[:2]
    if len(points) and points.unit != "m":
        raise PreconditionError("early fusion needs depth samples in meters")
    if len(points) and points.shape != (h, w):
        raise PreconditionError(f"point frame {points.shape} != image {(h, w)}")

    lxyz = np.zeros((h, w, 3))
    rxyz = np.zeros((h, w, 3))
    locc = np.zeros((h, w), dtype=bool)
    rocc = np.zeros((h, w), dtype=bool)

    if len(points):
        p = backproject(points.rows, points.cols, points.values, rig)
        xyz = np.stack(p, axis=1)
        proj = project_to_stereo(p, rig)
        rows = round_half_up(proj.left_row).astype(np.int64)
        cols = round_half_up(proj.left_col).astype(np.int64)
        z = p.z
        # the right pixel is offset by the rounded disparity, so the column
        # gap of every pair is exactly round(f*b/z)
        right_cols = cols - round_half_up(proj.disparity).astype(np.int64)
        keep = (right_cols >= 0) & (right_cols < w)

        # z-buffer on the right view; order (row, right col, z, left col)
        idx = np.nonzero(keep)[0]
        order = idx[np.lexsort((cols[idx], z[idx], right_cols[idx], rows[idx]))]
        key = rows[order] * w + right_cols[order]
        first = np.ones(order.size, dtype=bool)
        first[1:] = key[1:] != key[:-1]
        winners = order[first]

        r, lc, rc = rows[winners], cols[winners], right_cols[winners]
        lxyz[r, lc] = xyz[winners]
        rxyz[r, rc] = xyz[winners]
        locc[r, lc] = True
        rocc[r, rc] = True

    return (
        FusedImage(np.concatenate([lrgb, lxyz], axis=2), locc),
        FusedImage(np.concatenate([rrgb, rxyz], axis=2), rocc),
    )
