"""Uniform-grid index for sup-norm eps-neighbour queries on 3D point sets."""
from __future__ import annotations

import numpy as np

from . import kernels


class GridIndex:
    """Points hashed into cubic cells of side ``cell``; queries with eps <= cell
    only need the 27 surrounding cells."""

    def __init__(self, points: np.ndarray, cell: float, labels: np.ndarray | None = None):
        pts = np.ascontiguousarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError("GridIndex expects an (n, 3) array")
        if cell <= 0:
            raise ValueError("cell size must be positive")
        self.cell = float(cell)
        self.n = len(pts)
        if self.n == 0:
            self.origin = np.zeros(3)
            self.dims = np.ones(3, dtype=np.int64)
            self.pts = pts
            self.keys = np.zeros(0, dtype=np.int64)
            self.starts = self.ends = np.zeros(0, dtype=np.int64)
            self.labels = np.zeros(0, dtype=np.int64)
            return
        self.origin = pts.min(axis=0) - cell
        c = np.floor((pts - self.origin) / cell).astype(np.int64)
        self.dims = c.max(axis=0) + 2
        key = (c[:, 0] * self.dims[1] + c[:, 1]) * self.dims[2] + c[:, 2]
        order = np.argsort(key, kind="stable")
        key = key[order]
        self.pts = np.ascontiguousarray(pts[order])
        lab = np.zeros(self.n, dtype=np.int64) if labels is None else np.asarray(labels, dtype=np.int64)
        self.labels = np.ascontiguousarray(lab[order])
        self.keys, self.starts, counts = np.unique(key, return_index=True, return_counts=True)
        self.starts = self.starts.astype(np.int64)
        self.ends = self.starts + counts.astype(np.int64)

    def _query(self, queries, eps, labelmask, backend=None):
        if eps > self.cell * (1 + 1e-12):
            raise ValueError("eps must not exceed the cell size")
        q = np.ascontiguousarray(np.atleast_2d(queries), dtype=np.float64)
        if self.n == 0 or len(q) == 0:
            return np.zeros(len(q), dtype=np.int64)
        impl = backend or kernels
        return impl.grid_query(self.pts, self.keys, self.starts, self.ends, self.dims,
                               self.origin, self.cell, q, float(eps), self.labels,
                               bool(labelmask))

    def count(self, queries, eps, backend=None) -> np.ndarray:
        """Number of points within sup-distance eps of each query."""
        return self._query(queries, eps, False, backend)

    def label_mask(self, queries, eps, backend=None) -> np.ndarray:
        """Bitmask of labels (bit i for label i) present within eps of each query."""
        return self._query(queries, eps, True, backend)
