"""Diagnostics for cost-volume retrieval under different initialisations.

A two-layer toy stereo pair, an L1 cost volume, slab smoothness (discrete
Laplacian), spectra, a box low-pass and the retrieval error against the
slab obtained with ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from stereo_lab.cost_volume import retrieve_local
from stereo_lab.errors import PreconditionError
from stereo_lab.points import SparsePointSet
from stereo_lab.prefill import fill_nearest

RED = np.array([1.0, 0.0, 0.0])
BLUE = np.array([0.0, 0.0, 1.0])
GREEN = np.array([0.0, 1.0, 0.0])
ORANGE = np.array([1.0, 0.5, 0.0])


def _lerp(a, b, t):
    t = np.asarray(t, dtype=np.float64)[..., None]
    return a * (1.0 - t) + b * t


def make_toy_pair(size=40, fg_size=15, d_bg=6, d_fg=15):
    """Left image, right image and left-view disparity of the toy scene.

    The background is a red-to-blue ramp across the scene, the foreground a
    green-to-orange square.  The square is vertically centred; horizontally
    it sits so that its left- and right-view footprints are centred together,
    which keeps both views in frame for the default shifts.
    """
    if not (0 <= d_bg <= d_fg):
        raise PreconditionError(f"need 0 <= d_bg <= d_fg, got {d_bg}, {d_fg}")
    if not (0 < fg_size < size):
        raise PreconditionError(f"need 0 < fg_size < size, got {fg_size}, {size}")
    top = (size - fg_size) // 2
    c0 = (size - fg_size + d_fg) // 2
    if c0 - d_fg < 0 or c0 + fg_size > size:
        raise PreconditionError("foreground shift pushes the square out of frame")

    span = size - 1 + d_bg
    cols = np.arange(size)
    bg_left = _lerp(RED, BLUE, cols / span)
    bg_right = _lerp(RED, BLUE, (cols + d_bg) / span)
    fg_ramp = _lerp(GREEN, ORANGE, np.arange(fg_size) / max(fg_size - 1, 1))

    left = np.broadcast_to(bg_left, (size, size, 3)).copy()
    right = np.broadcast_to(bg_right, (size, size, 3)).copy()
    rows = slice(top, top + fg_size)
    left[rows, c0:c0 + fg_size] = fg_ramp
    right[rows, c0 - d_fg:c0 - d_fg + fg_size] = fg_ramp

    gt = np.full((size, size), float(d_bg))
    gt[rows, c0:c0 + fg_size] = float(d_fg)
    return left, right, gt


def l1_cost_volume(left, right):
    """Negated L1 RGB distance ``C[h, w, w2] = -sum_c |L[h, w, c] - R[h, w2, c]|``."""
    left = np.asarray(left, dtype=np.float64)
    right = np.asarray(right, dtype=np.float64)
    if left.shape != right.shape:
        raise PreconditionError("images differ in shape")
    if left.ndim == 2:
        left, right = left[..., None], right[..., None]
    return -np.abs(left[:, :, None, :] - right[:, None, :, :]).sum(axis=-1)


def sparse_gt_disparity(gt, stride):
    """Ground truth kept on every ``stride``-th column, zero elsewhere."""
    if stride < 1:
        raise PreconditionError(f"stride must be >= 1, got {stride}")
    gt = np.asarray(gt, dtype=np.float64)
    out = np.zeros_like(gt)
    out[:, ::stride] = gt[:, ::stride]
    return out


def laplacian_energy(slab):
    """Mean |5-point Laplacian| over interior pixels, averaged over channels."""
    s = np.asarray(slab, dtype=np.float64)
    if s.ndim == 2:
        s = s[:, :, None]
    if s.shape[0] < 3 or s.shape[1] < 3:
        return 0.0
    lap = (
        s[:-2, 1:-1] + s[2:, 1:-1] + s[1:-1, :-2] + s[1:-1, 2:]
        - 4.0 * s[1:-1, 1:-1]
    )
    return float(np.abs(lap).mean(axis=(0, 1)).mean())


def spectrum_1d(signal):
    """|DFT| of a scanline, DC first."""
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise PreconditionError("spectrum_1d needs a 1-D signal of length >= 2")
    return np.abs(np.fft.fft(x))


def lowpass(slab, radius, axis=None):
    """Box filter of width ``2*radius+1`` along scanlines, reflect padded.

    ``axis`` defaults to the column axis: 0 for 1-D input, 1 otherwise.
    """
    if radius < 1:
        raise PreconditionError(f"radius must be >= 1, got {radius}")
    s = np.asarray(slab, dtype=np.float64)
    if axis is None:
        axis = 0 if s.ndim == 1 else 1
    return ndimage.uniform_filter1d(s, size=2 * radius + 1, axis=axis, mode="reflect")


def retrieval_error(slab, slab_gt):
    """L2 distance between two slabs."""
    a = np.asarray(slab, dtype=np.float64)
    b = np.asarray(slab_gt, dtype=np.float64)
    if a.shape != b.shape:
        raise PreconditionError(f"slab shapes differ: {a.shape} vs {b.shape}")
    return float(np.sqrt(np.sum((a - b) ** 2)))


INITS = ("full", "zero", "sparse", "filled")


@dataclass
class ToyStudy:
    left: np.ndarray
    right: np.ndarray
    gt: np.ndarray
    cost: np.ndarray
    inits: dict
    slabs: dict
    laplacian: dict
    error: dict
    error_lowpass: dict
    spectra: dict


def toy_study(size=40, fg_size=15, d_bg=6, d_fg=15, stride=6, radius=4, lowpass_radius=2):
    """Retrieve slabs from the toy L1 volume under four initial maps.

    ``full`` is ground truth, ``zero`` all zeros, ``sparse`` ground truth on
    every ``stride``-th column and ``filled`` its nearest-sample fill.
    Spectra are taken on the centre channel of the middle row.
    """
    left, right, gt = make_toy_pair(size, fg_size, d_bg, d_fg)
    cost = l1_cost_volume(left, right)
    sparse = sparse_gt_disparity(gt, stride)
    pts = SparsePointSet.from_dense(np.where(sparse > 0, sparse, np.nan), unit="px")
    inits = {
        "full": gt,
        "zero": np.zeros_like(gt),
        "sparse": sparse,
        "filled": fill_nearest(pts, gt.shape),
    }
    slabs = {name: retrieve_local(cost, d, radius) for name, d in inits.items()}
    ref = slabs["full"]
    mid = size // 2
    return ToyStudy(
        left=left, right=right, gt=gt, cost=cost, inits=inits, slabs=slabs,
        laplacian={k: laplacian_energy(s) for k, s in slabs.items()},
        error={k: retrieval_error(s, ref) for k, s in slabs.items()},
        error_lowpass={k: retrieval_error(lowpass(s, lowpass_radius), ref) for k, s in slabs.items()},
        spectra={k: spectrum_1d(s[mid, :, radius]) for k, s in slabs.items()},
    )
