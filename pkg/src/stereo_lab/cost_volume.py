"""Correlation volumes and local cost retrieval.

Indexing follows absolute columns: ``C[h, w, w2]`` scores left pixel
``(h, w)`` against right pixel ``(h, w2)``.  A local slab gathers the
``2K+1`` scores around ``w2 = w - D(h, w)``.
"""

from __future__ import annotations

import numpy as np

from stereo_lab.errors import PreconditionError

FEATURE_METHODS = ("census", "zncc", "raw")


def _as_hwc(image):
    img = np.asarray(image, dtype=np.float64)
    if img.ndim == 2:
        img = img[:, :, None]
    if img.ndim != 3:
        raise PreconditionError(f"expected an H x W or H x W x C image, got shape {img.shape}")
    return img


def _window_stack(img, window):
    """Stack of shifted copies, shape H x W x C x window**2 (edge padded)."""
    r = window // 2
    h, w, _ = img.shape
    padded = np.pad(img, ((r, r), (r, r), (0, 0)), mode="edge")
    shifts = [
        padded[dy:dy + h, dx:dx + w, :]
        for dy in range(window)
        for dx in range(window)
    ]
    return np.stack(shifts, axis=-1)


def _unit_rows(vectors):
    norm = np.linalg.norm(vectors, axis=-1, keepdims=True)
    out = np.zeros_like(vectors)
    np.divide(vectors, norm, out=out, where=norm > 1e-12)
    return out


def featurize(image, method="census", window=5):
    """Per-pixel unit-norm feature vectors, H x W x J.

    ``census`` compares every window neighbour with the centre pixel per
    channel and encodes the sign as +-1/sqrt(J).  ``zncc`` subtracts the
    per-channel window mean and normalises the patch; flat patches give the
    zero vector.  ``raw`` normalises the channel vector itself.
    """
    if method not in FEATURE_METHODS:
        raise PreconditionError(f"unknown feature method {method!r}")
    if window % 2 == 0:
        raise PreconditionError(f"window must be odd, got {window}")
    if method != "raw" and window < 3:
        raise PreconditionError(f"{method} needs window >= 3, got {window}")

    img = _as_hwc(image)
    h, w, c = img.shape
    if method == "raw":
        return _unit_rows(img)

    stack = _window_stack(img, window)
    if method == "census":
        centre = (window * window) // 2
        neighbours = np.delete(stack, centre, axis=-1)
        bits = neighbours > img[:, :, :, None]
        feats = np.where(bits, 1.0, -1.0).reshape(h, w, -1)
        return feats / np.sqrt(feats.shape[-1])

    centred = stack - stack.mean(axis=-1, keepdims=True)
    return _unit_rows(centred.reshape(h, w, -1))


def build_correlation(xl, xr):
    """Inner-product volume ``C[h, w, w2] = sum_j xl[h, w, j] * xr[h, w2, j]``."""
    xl = np.asarray(xl, dtype=np.float64)
    xr = np.asarray(xr, dtype=np.float64)
    if xl.shape != xr.shape or xl.ndim != 3:
        raise PreconditionError(f"feature maps must share an H x W x J shape: {xl.shape} vs {xr.shape}")
    return np.matmul(xl, xr.transpose(0, 2, 1))


def disparity_view(cost, max_disp):
    """Disparity-indexed view ``V[h, w, d] = C[h, w, w - d]`` for d in [0, max_disp].

    Columns left of the image clamp to the border score, like retrieval.
    """
    cost = np.asarray(cost)
    h, w, _ = cost.shape
    d = np.arange(max_disp + 1)
    cols = np.clip(np.arange(w)[:, None] - d[None, :], 0, w - 1)
    return np.take_along_axis(cost, np.broadcast_to(cols, (h, w, max_disp + 1)), axis=2)


def retrieve_local(cost, disparity, radius):
    """Local slab ``S[h, w, k] = C[h, w, w - D[h, w] + (k - radius)]``.

    Fractional positions interpolate linearly along the right-image column;
    positions outside ``[0, W-1]`` clamp to the border.  Integer disparities
    reproduce direct indexing exactly.
    """
    if radius < 1:
        raise PreconditionError(f"radius must be >= 1, got {radius}")
    cost = np.asarray(cost)
    disp = np.asarray(disparity, dtype=np.float64)
    h, w, w2 = cost.shape
    if disp.shape != (h, w):
        raise PreconditionError(f"disparity shape {disp.shape} does not match volume {(h, w)}")
    if not np.all(np.isfinite(disp)):
        raise PreconditionError("disparity must be finite; resolve invalid pixels first")

    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    pos = np.arange(w, dtype=np.float64)[None, :, None] - disp[:, :, None] + offsets
    pos = np.clip(pos, 0.0, w2 - 1)
    lo = np.floor(pos)
    frac = pos - lo
    lo = lo.astype(np.intp)
    hi = np.minimum(lo + 1, w2 - 1)
    c_lo = np.take_along_axis(cost, lo, axis=2)
    c_hi = np.take_along_axis(cost, hi, axis=2)
    return c_lo + frac * (c_hi - c_lo)
