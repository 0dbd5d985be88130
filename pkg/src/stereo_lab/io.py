"""File formats: KITTI depth PNG, PFM, sparse-points text and tensor dumps."""

from __future__ import annotations

import re
from pathlib import Path

import cv2
import numpy as np

from stereo_lab.errors import FormatError
from stereo_lab.points import UNITS, SparsePointSet

KITTI_SCALE = 256.0


def read_kitti_depth_png(path):
    """Depth in meters from a 16-bit KITTI PNG; zero pixels become NaN."""
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise FormatError(f"{path}: not a readable image")
    if raw.dtype != np.uint16 or raw.ndim != 2:
        raise FormatError(
            f"{path}: expected a 16-bit single-channel PNG, got dtype={raw.dtype} shape={raw.shape}"
        )
    depth = raw.astype(np.float64) / KITTI_SCALE
    depth[raw == 0] = np.nan
    return depth


def write_kitti_depth_png(depth, path):
    """Inverse of :func:`read_kitti_depth_png`; NaN and non-positive write 0."""
    depth = np.asarray(depth, dtype=np.float64)
    if depth.ndim != 2:
        raise FormatError(f"depth map must be 2-D, got shape {depth.shape}")
    ok = np.isfinite(depth) & (depth > 0)
    scaled = np.zeros(depth.shape, dtype=np.float64)
    scaled[ok] = np.rint(depth[ok] * KITTI_SCALE)
    if np.any(scaled > np.iinfo(np.uint16).max):
        raise FormatError("depth exceeds the 16-bit KITTI range (255.99 m)")
    if not cv2.imwrite(str(path), scaled.astype(np.uint16)):
        raise FormatError(f"{path}: could not write PNG")


def read_pfm(path):
    """Read a PFM (``Pf`` grey or ``PF`` colour) into top-down row order."""
    with open(path, "rb") as f:
        kind = f.readline().rstrip()
        if kind == b"Pf":
            channels = 1
        elif kind == b"PF":
            channels = 3
        else:
            raise FormatError(f"{path}: not a PFM file (magic {kind!r})")
        dims = f.readline()
        m = re.match(rb"^\s*(\d+)\s+(\d+)\s*$", dims)
        if not m:
            raise FormatError(f"{path}: malformed PFM size line {dims!r}")
        width, height = int(m.group(1)), int(m.group(2))
        try:
            scale = float(f.readline().strip())
        except ValueError:
            raise FormatError(f"{path}: malformed PFM scale line") from None
        if scale == 0:
            raise FormatError(f"{path}: PFM scale must be non-zero")
        dtype = "<f4" if scale < 0 else ">f4"
        count = width * height * channels
        data = np.frombuffer(f.read(count * 4), dtype=dtype)
    if data.size != count:
        raise FormatError(f"{path}: truncated PFM ({data.size} of {count} values)")
    shape = (height, width) if channels == 1 else (height, width, 3)
    return np.flipud(data.reshape(shape)).astype(np.float32)


def write_pfm(image, path, little_endian=True):
    """Write a float32 PFM; a negative scale marks little-endian data."""
    arr = np.asarray(image, dtype=np.float32)
    if arr.ndim == 2:
        kind = b"Pf"
    elif arr.ndim == 3 and arr.shape[2] == 3:
        kind = b"PF"
    else:
        raise FormatError(f"PFM stores H x W or H x W x 3 arrays, got {arr.shape}")
    h, w = arr.shape[:2]
    dtype = "<f4" if little_endian else ">f4"
    scale = b"-1.0" if little_endian else b"1.0"
    with open(path, "wb") as f:
        f.write(kind + b"\n" + f"{w} {h}".encode() + b"\n" + scale + b"\n")
        f.write(np.flipud(arr).astype(dtype).tobytes())


SPARSE_HEADER = re.compile(r"^#\s*sparse-points\s+v1\s+(\d+)\s+(\d+)\s+unit=(\S+)\s*$")


def write_sparse_points(points: SparsePointSet, path):
    """One ``row col value [confidence]`` line per point, after a header."""
    h, w = points.shape
    lines = [f"# sparse-points v1 {h} {w} unit={points.unit}"]
    conf = points.confidence
    for i in range(len(points)):
        line = f"{points.rows[i]} {points.cols[i]} {float(points.values[i])!r}"
        if conf is not None:
            line += f" {float(conf[i])!r}"
        lines.append(line)
    Path(path).write_text("\n".join(lines) + "\n")


def read_sparse_points(path) -> SparsePointSet:
    text = Path(path).read_text().splitlines()
    if not text:
        raise FormatError(f"{path}: empty file, missing sparse-points header")
    m = SPARSE_HEADER.match(text[0].strip())
    if not m:
        raise FormatError(f"{path}: bad header {text[0]!r}")
    h, w, unit = int(m.group(1)), int(m.group(2)), m.group(3)
    if unit not in UNITS:
        raise FormatError(f"{path}: unknown unit {unit!r}")

    rows, cols, values, conf = [], [], [], []
    seen = set()
    for lineno, raw in enumerate(text[1:], 2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (3, 4):
            raise FormatError(f"{path}:{lineno}: expected 'row col value [confidence]'")
        try:
            r, c = int(parts[0]), int(parts[1])
            v = float(parts[2])
            cf = float(parts[3]) if len(parts) == 4 else None
        except ValueError:
            raise FormatError(f"{path}:{lineno}: bad number in {raw!r}") from None
        if not (0 <= r < h and 0 <= c < w):
            raise FormatError(f"{path}:{lineno}: ({r}, {c}) outside {h}x{w}")
        if (r, c) in seen:
            raise FormatError(f"{path}:{lineno}: duplicate coordinate ({r}, {c})")
        if not (np.isfinite(v) and v > 0):
            raise FormatError(f"{path}:{lineno}: value must be finite and > 0")
        seen.add((r, c))
        rows.append(r)
        cols.append(c)
        values.append(v)
        conf.append(cf)

    has_conf = [c is not None for c in conf]
    if any(has_conf) and not all(has_conf):
        raise FormatError(f"{path}: confidence given on some lines only")
    confidence = np.array(conf, dtype=np.float64) if conf and all(has_conf) else None
    return SparsePointSet(np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64),
                          np.array(values, dtype=np.float64), (h, w), unit, confidence)


TENSOR_HEADER = re.compile(rb"^# tensor v1 (\d+) (\d+) (\d+) f32le$")


def write_tensors(arrays, path):
    """Concatenated tensor records: ``# tensor v1 H W C f32le`` line + raw floats."""
    with open(path, "wb") as f:
        for arr in arrays:
            a = np.asarray(arr, dtype="<f4")
            if a.ndim == 2:
                a = a[:, :, None]
            h, w, c = a.shape
            f.write(f"# tensor v1 {h} {w} {c} f32le\n".encode())
            f.write(np.ascontiguousarray(a).tobytes())


def read_tensors(path):
    out = []
    with open(path, "rb") as f:
        while True:
            header = f.readline()
            if not header:
                break
            m = TENSOR_HEADER.match(header.rstrip(b"\n"))
            if not m:
                raise FormatError(f"{path}: bad tensor header {header[:60]!r}")
            h, w, c = (int(g) for g in m.groups())
            n = h * w * c
            data = np.frombuffer(f.read(4 * n), dtype="<f4")
            if data.size != n:
                raise FormatError(f"{path}: truncated tensor record")
            out.append(data.reshape(h, w, c).astype(np.float32))
    return out


def read_image(path):
    """RGB image as stored (uint8 or uint16); greyscale stays 2-D."""
    img = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if img is None:
        raise FormatError(f"{path}: not a readable image")
    if img.ndim == 3:
        if img.shape[2] == 4:
            img = img[:, :, :3]
        img = img[:, :, ::-1]
    return np.ascontiguousarray(img)


def write_image(img, path):
    img = np.asarray(img)
    if img.ndim == 3:
        img = img[:, :, ::-1]
    if not cv2.imwrite(str(path), np.ascontiguousarray(img)):
        raise FormatError(f"{path}: could not write image")


def read_disparity_or_depth(path):
    """Load a map and report its space: PFM is disparity, PNG is KITTI depth."""
    suffix = Path(path).suffix.lower()
    if suffix == ".pfm":
        return read_pfm(path).astype(np.float64), "px"
    if suffix == ".png":
        return read_kitti_depth_png(path), "m"
    raise FormatError(f"{path}: expected .pfm or .png")

