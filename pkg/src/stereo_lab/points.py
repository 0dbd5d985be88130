from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from stereo_lab.errors import PreconditionError

UNITS = ("m", "px")


@dataclass(frozen=True, eq=False)
class SparsePointSet:
    """Sparse samples on an H x W grid: integer pixel coordinates plus values.

    ``unit`` is ``"m"`` for depth samples and ``"px"`` for disparities.
    ``confidence`` is optional and lies in [0, 1] when present.
    """

    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray
    shape: tuple
    unit: str = "m"
    confidence: np.ndarray | None = None

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64).ravel()
        cols = np.asarray(self.cols, dtype=np.int64).ravel()
        values = np.asarray(self.values, dtype=np.float64).ravel()
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "shape", (int(self.shape[0]), int(self.shape[1])))
        if self.confidence is not None:
            conf = np.asarray(self.confidence, dtype=np.float64).ravel()
            object.__setattr__(self, "confidence", conf)
            if conf.shape != values.shape:
                raise PreconditionError("confidence length does not match values")
            if np.any(~(conf >= 0) | ~(conf <= 1)):
                raise PreconditionError("confidence must lie in [0, 1]")
        if not (rows.shape == cols.shape == values.shape):
            raise PreconditionError("rows, cols and values must have equal length")
        if self.unit not in UNITS:
            raise PreconditionError(f"unit must be one of {UNITS}, got {self.unit!r}")
        h, w = self.shape
        if np.any((rows < 0) | (rows >= h) | (cols < 0) | (cols >= w)):
            raise PreconditionError(f"point coordinates outside the {h}x{w} frame")
        if np.any(~(values > 0)) or not np.all(np.isfinite(values)):
            raise PreconditionError("point values must be finite and > 0")
        flat = rows * w + cols
        if np.unique(flat).size != flat.size:
            raise PreconditionError("duplicate (row, col) in point set")

    def __len__(self):
        return int(self.values.size)

    @property
    def flat_index(self):
        return self.rows * self.shape[1] + self.cols

    @classmethod
    def from_dense(cls, grid, unit="m", confidence=None):
        """Every finite, positive pixel of ``grid`` in row-major order."""
        grid = np.asarray(grid, dtype=np.float64)
        rows, cols = np.nonzero(np.isfinite(grid) & (grid > 0))
        conf = None if confidence is None else np.asarray(confidence)[rows, cols]
        return cls(rows, cols, grid[rows, cols], grid.shape, unit, conf)

    def to_dense(self, fill=np.nan):
        grid = np.full(self.shape, fill, dtype=np.float64)
        grid[self.rows, self.cols] = self.values
        return grid

    def with_values(self, values, unit):
        return SparsePointSet(self.rows, self.cols, values, self.shape, unit, self.confidence)

    def sorted(self):
        """Copy in row-major order."""
        order = np.argsort(self.flat_index, kind="stable")
        conf = None if self.confidence is None else self.confidence[order]
        return SparsePointSet(self.rows[order], self.cols[order], self.values[order],
                              self.shape, self.unit, conf)
