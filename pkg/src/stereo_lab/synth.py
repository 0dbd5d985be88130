"""Synthetic stereo scenes with planted disparity.

The right image is a random texture; the left image samples it at
``w - D(h, w)``, so every left pixel has an exact match wherever that
column stays in frame.  Scenes mimic a driving layout: a far wall above
the horizon, a ground plane whose disparity grows toward the bottom, and a
few fronto-parallel boxes standing on the ground.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from stereo_lab.geometry import CameraRig, read_calib, write_calib


@dataclass
class Scene:
    left: np.ndarray  # H x W x 3 in [0, 1]
    right: np.ndarray
    gt: np.ndarray  # left-view disparity, NaN where the match leaves the frame
    rig: CameraRig


def random_texture(rng, height, width, sigma=1.0, channels=3):
    """Band-limited colour noise in [0, 1]."""
    noise = rng.random((height, width, channels))
    if sigma > 0:
        noise = ndimage.gaussian_filter(noise, sigma=(sigma, sigma, 0), mode="reflect")
    lo = noise.min(axis=(0, 1), keepdims=True)
    hi = noise.max(axis=(0, 1), keepdims=True)
    return (noise - lo) / np.maximum(hi - lo, 1e-12)


def warp_from_right(right_ext, disparity, margin):
    """Left view ``L[h, w] = R_ext[h, w + margin - D[h, w]]`` (linear in w)."""
    h, w = disparity.shape
    pos = np.arange(w)[None, :] + margin - disparity
    pos = np.clip(pos, 0, right_ext.shape[1] - 1)
    lo = np.floor(pos).astype(np.intp)
    hi = np.minimum(lo + 1, right_ext.shape[1] - 1)
    frac = (pos - lo)[..., None]
    rows = np.arange(h)[:, None]
    return right_ext[rows, lo] * (1 - frac) + right_ext[rows, hi] * frac


def planted_shift_pair(rng, height, width, shift, sigma=0.0):
    """Pair whose left image is the right image shifted right by ``shift`` columns."""
    right_ext = random_texture(rng, height, width + shift, sigma, channels=1)[..., 0]
    right = right_ext[:, shift:]
    left = right_ext[:, :width]
    return left, right


def make_scene(rng, height=96, width=256, rig=None, n_boxes=(2, 4), sigma=0.8,
               far_disp=(3.0, 8.0), bottom_disp=(40.0, 70.0)):
    if rig is None:
        rig = CameraRig(focal_px=200.0, baseline_m=0.5, cx=width / 2, cy=height / 2)
    rows = np.arange(height, dtype=np.float64)
    horizon = height * rng.uniform(0.3, 0.45)
    d_far = rng.uniform(*far_disp)
    d_bottom = rng.uniform(*bottom_disp)
    slope = (d_bottom - d_far) / (height - 1 - horizon)
    ground = d_far + slope * np.clip(rows - horizon, 0.0, None)
    disp = np.broadcast_to(ground[:, None], (height, width)).copy()

    for _ in range(rng.integers(n_boxes[0], n_boxes[1] + 1)):
        bottom = int(rng.uniform(horizon + 0.3 * (height - horizon), height))
        d_box = ground[min(bottom, height - 1)]
        box_h = int(rng.uniform(0.15, 0.35) * height)
        box_w = int(rng.uniform(0.1, 0.25) * width)
        top = max(bottom - box_h, 0)
        left_col = int(rng.uniform(0, width - box_w))
        region = disp[top:bottom, left_col:left_col + box_w]
        # nearer surfaces occlude farther ones
        np.maximum(region, d_box, out=region)

    margin = int(np.ceil(disp.max())) + 2
    right_ext = random_texture(rng, height, width + margin, sigma)
    left = warp_from_right(right_ext, disp, margin)
    right = right_ext[:, margin:]
    gt = disp.copy()
    gt[np.arange(width)[None, :] - disp < 0] = np.nan
    return Scene(left, right, gt, rig)


def make_corpus(n_scenes, seed=0, **kwargs):
    rng = np.random.default_rng(seed)
    return [make_scene(rng, **kwargs) for _ in range(n_scenes)]


def save_scene(scene: Scene, directory):
    from stereo_lab.io import write_image, write_pfm

    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    write_image(np.rint(scene.left * 255).astype(np.uint8), d / "left.png")
    write_image(np.rint(scene.right * 255).astype(np.uint8), d / "right.png")
    write_pfm(scene.gt, d / "disp.pfm")
    write_calib(scene.rig, d / "calib.txt")


def load_scene(directory) -> Scene:
    from stereo_lab.io import read_image, read_pfm

    d = Path(directory)
    left = read_image(d / "left.png")
    right = read_image(d / "right.png")
    scale = float(np.iinfo(left.dtype).max) if np.issubdtype(left.dtype, np.integer) else 1.0
    gt = read_pfm(d / "disp.pfm").astype(np.float64)
    return Scene(left / scale, right / scale, gt, read_calib(d / "calib.txt"))


def load_corpus(directory):
    root = Path(directory)
    return [load_scene(p) for p in sorted(root.iterdir()) if (p / "disp.pfm").exists()]
