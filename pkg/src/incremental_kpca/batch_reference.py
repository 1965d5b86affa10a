"""Batch ground truth: Jacobi eigensolver, centred kernel, Nystrom formula.

Nothing here depends on the incremental code, so it can serve as the
independent oracle for every equivalence test.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .eigen_update import EigenDecomposition
from .kernels import KernelConfig, as_points, cross_kernel, kernel_matrix

JACOBI_TOL = 1e-13
MAX_SWEEPS = 60
PINV_RTOL = 1e-10
_EPS = np.finfo(float).eps


@lru_cache(maxsize=64)
def _round_robin(n: int):
    """Pairings for one cyclic sweep in which every round is a set of disjoint pairs."""
    players = list(range(n + (n % 2)))
    size = len(players)
    rounds = []
    for _ in range(size - 1):
        p, q = [], []
        for k in range(size // 2):
            a, b = players[k], players[size - 1 - k]
            if a < n and b < n:
                p.append(min(a, b))
                q.append(max(a, b))
        rounds.append((np.array(p, dtype=int), np.array(q, dtype=int)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _offdiag_norm(a):
    return np.linalg.norm(a - np.diag(np.diag(a)))


def jacobi_eigh(a, tol: float = JACOBI_TOL, max_sweeps: int = MAX_SWEEPS):
    """Cyclic Jacobi on a symmetric matrix; returns unsorted ``(values, vectors)``.

    Each round rotates a set of disjoint index pairs at once, which is
    equivalent to applying the rotations one after another.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    vt = np.eye(n)
    if n < 2:
        return np.diag(a).copy(), vt
    target = tol * np.linalg.norm(a)
    rounds = _round_robin(n)
    for _ in range(max_sweeps):
        if _offdiag_norm(a) <= target:
            break
        for p, q in rounds:
            apq = a[p, q]
            # Rotations this small would not change the matrix in floating point.
            nz = np.abs(apq) > _EPS * np.sqrt(np.abs(a[p, p] * a[q, q]))
            if not np.any(nz):
                continue
            p, q, apq = p[nz], q[nz], apq[nz]
            app, aqq = a[p, p], a[q, q]
            with np.errstate(over="ignore"):
                theta = (aqq - app) / (2.0 * apq)
                t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            cr, sr = c[:, None], s[:, None]
            # J^T A J as two row passes: rows of J^T A, then rows of (J^T A)^T J.
            for _pass in range(2):
                ap, aq = a[p], a[q]
                a[p], a[q] = cr * ap - sr * aq, sr * ap + cr * aq
                a = a.T.copy()
            a[p, q] = 0.0
            a[q, p] = 0.0
            a[p, p] = app - t * apq
            a[q, q] = aqq + t * apq
            vp, vq = vt[p], vt[q]
            vt[p], vt[q] = cr * vp - sr * vq, sr * vp + cr * vq
    else:
        if _offdiag_norm(a) > target:
            raise ArithmeticError("Jacobi sweeps did not converge")
    return np.diag(a).copy(), vt.T.copy()


def batch_eig(a) -> EigenDecomposition:
    """Full eigendecomposition of a symmetric matrix, values ascending.

    Each eigenvector is signed so that its largest-magnitude entry is positive.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    scale = np.linalg.norm(a)
    if np.linalg.norm(a - a.T) > 1e-9 * scale:
        raise ValueError("matrix is not symmetric")
    values, vectors = jacobi_eigh(0.5 * (a + a.T))
    order = np.argsort(values, kind="stable")
    values, vectors = values[order], vectors[:, order]
    if vectors.size:
        lead = np.argmax(np.abs(vectors), axis=0)
        signs = np.sign(vectors[lead, np.arange(vectors.shape[1])])
        vectors = vectors * np.where(signs == 0, 1.0, signs)
    return EigenDecomposition(values, vectors)


def center_kernel(k) -> np.ndarray:
    """``K - 1K - K1 + 1K1`` where ``1`` is the matrix with every entry ``1/n``."""
    k = np.asarray(k, dtype=float)
    n = k.shape[0]
    ones = np.full((n, n), 1.0 / n)
    return k - ones @ k - k @ ones + ones @ k @ ones


def batch_centered_kernel(cfg: KernelConfig, points) -> np.ndarray:
    return center_kernel(kernel_matrix(cfg, points))


def nystrom_from_blocks(k_nm, k_mm, rtol: float = PINV_RTOL) -> np.ndarray:
    """``K_nm K_mm^+ K_mn`` with eigenvalues below ``rtol * max`` dropped."""
    dec = batch_eig(k_mm)
    top = dec.values.max()
    if not top > 0:
        raise ArithmeticError("landmark block has no positive eigenvalues")
    keep = dec.values >= rtol * top
    f = k_nm @ dec.vectors[:, keep]
    return (f / dec.values[keep]) @ f.T


def batch_nystrom(cfg: KernelConfig, points, landmark_indices, rtol: float = PINV_RTOL):
    pts = as_points(points)
    idx = np.asarray(landmark_indices, dtype=int)
    k_nm = cross_kernel(cfg, pts, pts[idx])
    return nystrom_from_blocks(k_nm, k_nm[idx], rtol)
