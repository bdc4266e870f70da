"""Uniform cell-centered grids and scalar grid functions.

A cell belongs to a domain iff its center is inside; every field in the
package lives on cell centers. Values off the grid box are zero by
convention (the exterior condition); forms may optionally drop the
exterior interaction, which models extension by a constant instead.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform d-dimensional grid of cells over an axis-aligned box."""

    lo: tuple
    h: float
    shape: tuple

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("grid spacing must be positive")
        if len(self.lo) != len(self.shape):
            raise ValueError("lo and shape dimension mismatch")
        if any(n <= 0 for n in self.shape):
            raise ValueError("grid shape must be positive")

    @classmethod
    def from_box(cls, lo, hi, h):
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        if np.any(hi <= lo):
            raise ValueError("box must satisfy lo < hi componentwise")
        counts = (hi - lo) / h
        n = np.rint(counts).astype(int)
        if np.any(np.abs(counts - n) > 1e-9 * np.maximum(1.0, np.abs(counts))):
            raise ValueError("h does not divide the box sides")
        return cls(lo=tuple(lo), h=float(h), shape=tuple(int(k) for k in n))

    @property
    def d(self) -> int:
        return len(self.shape)

    @property
    def hi(self) -> tuple:
        return tuple(l + n * self.h for l, n in zip(self.lo, self.shape))

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.shape))

    @property
    def cell_volume(self) -> float:
        return self.h ** self.d

    def axis_centers(self, axis: int) -> np.ndarray:
        return self.lo[axis] + (np.arange(self.shape[axis]) + 0.5) * self.h

    def centers(self) -> np.ndarray:
        """Cell-center coordinates, shape (*grid.shape, d)."""
        axes = [self.axis_centers(a) for a in range(self.d)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack(mesh, axis=-1)

    def flat_centers(self) -> np.ndarray:
        return self.centers().reshape(-1, self.d)

    def cell_index(self, points) -> np.ndarray:
        """Integer cell indices of points, shape (N, d); may fall off-grid."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.floor((pts - np.asarray(self.lo)) / self.h).astype(int)

    def contains_points(self, points) -> np.ndarray:
        idx = self.cell_index(points)
        ok = np.ones(len(idx), dtype=bool)
        for a in range(self.d):
            ok &= (idx[:, a] >= 0) & (idx[:, a] < self.shape[a])
        return ok

    def scaled(self, s: float) -> "Grid":
        """Grid for the dilated box s*box with spacing s*h (same cell count)."""
        return Grid(lo=tuple(s * l for l in self.lo), h=s * self.h, shape=self.shape)


@dataclass
class GridFunction:
    """Scalar field on a grid with an optional mask of pinned cells."""

    grid: Grid
    values: np.ndarray
    fixed_mask: np.ndarray = field(default=None)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError("values shape does not match grid")
        if self.fixed_mask is None:
            self.fixed_mask = np.zeros(self.grid.shape, dtype=bool)
        else:
            self.fixed_mask = np.asarray(self.fixed_mask, dtype=bool)
            if self.fixed_mask.shape != self.grid.shape:
                raise ValueError("fixed_mask shape does not match grid")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("values must be finite")

    def copy(self) -> "GridFunction":
        return GridFunction(self.grid, self.values.copy(), self.fixed_mask.copy())

    def interp(self, points) -> np.ndarray:
        """Multilinear interpolation at points (N, d); zero off the box."""
        from scipy.interpolate import RegularGridInterpolator

        axes = [self.grid.axis_centers(a) for a in range(self.grid.d)]
        f = RegularGridInterpolator(
            axes, self.values, bounds_error=False, fill_value=0.0
        )
        return f(np.atleast_2d(np.asarray(points, dtype=float)))

    def to_json_header(self) -> dict:
        return {
            "lo": list(self.grid.lo),
            "hi": list(self.grid.hi),
            "h": self.grid.h,
            "shape": list(self.grid.shape),
            "order": "row-major",
        }

    def save_csv(self, path, header_path=None):
        """Row-major CSV of values, JSON header alongside."""
        vals = self.values.reshape(self.grid.shape[0], -1)
        np.savetxt(path, vals, delimiter=",", fmt="%.12g")
        if header_path is not None:
            with open(header_path, "w") as fh:
                json.dump(self.to_json_header(), fh, indent=1, sort_keys=True)
