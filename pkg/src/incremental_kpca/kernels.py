"""Kernel evaluation and the median-distance bandwidth heuristic."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

# Rows per block when building large kernel matrices.
_CHUNK = 256


@dataclass(frozen=True)
class KernelConfig:
    """Kernel family and bandwidth.

    ``rbf`` evaluates ``exp(-||x - y||^2 / sigma)``; note that ``sigma``
    divides the squared distance directly.
    """

    sigma: float
    family: str = "rbf"

    def __post_init__(self):
        if self.family != "rbf":
            raise ValueError(f"unsupported kernel family {self.family!r}")
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"sigma must be a positive finite number, got {self.sigma}")

    def from_sq_dist(self, sq_dist):
        return np.exp(-np.asarray(sq_dist) / self.sigma)


def as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2:
        raise ValueError("points must be a 2-d array of shape (n, d)")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points contain non-finite values")
    return pts


def _sq_dist(points, x):
    diff = points - x
    return np.sum(diff * diff, axis=-1)


def kernel_eval(cfg: KernelConfig, x, y) -> float:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return float(cfg.from_sq_dist(_sq_dist(x, y)))


def kernel_vector(cfg: KernelConfig, points, x_new) -> np.ndarray:
    """Kernel values of every row of ``points`` against ``x_new``."""
    pts = as_points(points)
    x_new = np.atleast_1d(np.asarray(x_new, dtype=float))
    if pts.shape[0] == 0:
        raise ValueError("points must be nonempty")
    if x_new.shape != (pts.shape[1],):
        raise ValueError(f"dimension mismatch: {x_new.shape} vs ({pts.shape[1]},)")
    return cfg.from_sq_dist(_sq_dist(pts, x_new))


def cross_kernel(cfg: KernelConfig, points, others) -> np.ndarray:
    """``K[i, j] = k(points[i], others[j])``, built in row blocks."""
    pts, oth = as_points(points), as_points(others)
    if pts.shape[1] != oth.shape[1]:
        raise ValueError("dimension mismatch between point sets")
    out = np.empty((pts.shape[0], oth.shape[0]))
    for start in range(0, pts.shape[0], _CHUNK):
        block = pts[start:start + _CHUNK]
        out[start:start + _CHUNK] = cfg.from_sq_dist(_sq_dist(block[:, None, :], oth[None, :, :]))
    return out


def kernel_matrix(cfg: KernelConfig, points) -> np.ndarray:
    pts = as_points(points)
    if pts.shape[0] == 0:
        raise ValueError("points must be nonempty")
    return cross_kernel(cfg, pts, pts)


def median_bandwidth(points) -> float:
    """Median Euclidean distance over all unordered pairs of ``points``."""
    pts = as_points(points)
    if pts.shape[0] < 2:
        raise ValueError("need at least two points for the median heuristic")
    sigma = float(np.median(pdist(pts)))
    if sigma <= 0:
        raise ValueError("degenerate sample: median pairwise distance is zero")
    return sigma
