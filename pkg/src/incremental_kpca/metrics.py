"""Norms of matrix differences for drift and approximation-error reports."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import ikpca, nystrom


class NormTriple(NamedTuple):
    frobenius: float
    spectral: float
    trace: float


def norm_triple(a) -> NormTriple:
    """Frobenius, spectral and trace (nuclear) norms of a symmetric matrix."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.size == 0:
        return NormTriple(0.0, 0.0, 0.0)
    a = 0.5 * (a + a.T)
    ev = np.abs(np.linalg.eigvalsh(a))
    return NormTriple(float(np.linalg.norm(a)), float(ev.max()), float(ev.sum()))


def drift_report(state: ikpca.IkpcaState) -> NormTriple:
    """Norms of (batch matrix of the accepted points) minus the reconstruction."""
    return norm_triple(ikpca.batch_target(state) - ikpca.reconstruct(state))


def nystrom_error(state: nystrom.NystromState, k_full) -> NormTriple:
    k_full = np.asarray(k_full, dtype=float)
    if k_full.shape != (state.n, state.n):
        raise ValueError(f"full kernel has shape {k_full.shape}, expected {(state.n, state.n)}")
    return norm_triple(k_full - nystrom.approx_kernel(state))
