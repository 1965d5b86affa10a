"""Nystrom approximation grown one landmark at a time.

The landmark block ``K_mm`` is tracked by a zero-mean incremental state; the
cross-kernel ``K_nm`` gains one column per landmark.  The approximate
eigensystem of the full kernel matrix is the rescaled block eigensystem.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import ikpca
from .batch_reference import PINV_RTOL
from .kernels import KernelConfig, as_points, cross_kernel, kernel_vector


@dataclass(frozen=True)
class NystromState:
    data: np.ndarray
    landmark_indices: tuple
    cross_kernel: np.ndarray  # n x m
    block_state: ikpca.IkpcaState

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def m(self) -> int:
        return len(self.landmark_indices)

    @property
    def kernel(self) -> KernelConfig:
        return self.block_state.kernel

    @property
    def excluded(self) -> tuple:
        return self.block_state.excluded


def nystrom_init(cfg: KernelConfig, dataset, first_index: int = 0) -> NystromState:
    return nystrom_init_batch(cfg, dataset, [first_index])


def nystrom_init_batch(cfg: KernelConfig, dataset, indices) -> NystromState:
    """Start from a batch decomposition of the landmark block for ``indices``."""
    data = as_points(dataset)
    idx = [int(i) for i in indices]
    if not idx:
        raise ValueError("need at least one initial landmark")
    if len(set(idx)) != len(idx):
        raise ValueError("initial landmarks must be distinct")
    if len(idx) == 1:
        block = ikpca.init_zero_mean(cfg, data[idx[0]])
    else:
        block = ikpca.init_batch(cfg, data[idx], ikpca.Mode.ZERO_MEAN)
    c = np.asfortranarray(cross_kernel(cfg, data, data[idx]))
    return NystromState(data, tuple(idx), c, block)


def add_landmark(state: NystromState, idx: int):
    """Add landmark ``idx``; returns ``(new_state, accepted)``.

    A landmark rejected by the block update leaves every field but the
    block's exclusion log unchanged.
    """
    idx = int(idx)
    if not 0 <= idx < state.n:
        raise IndexError(f"landmark index {idx} out of range for n={state.n}")
    if idx in state.landmark_indices:
        raise ValueError(f"index {idx} is already a landmark")
    block = ikpca.add_point_zero_mean(state.block_state, state.data[idx])
    if block.m == state.block_state.m:
        return dataclasses.replace(state, block_state=block), False
    column = kernel_vector(state.kernel, state.data, state.data[idx])
    c = np.asfortranarray(np.column_stack([state.cross_kernel, column]))
    return NystromState(state.data, state.landmark_indices + (idx,), c, block), True


def rescale(state: NystromState, rtol: float = PINV_RTOL):
    """Approximate eigenvalues and eigenvectors of the full kernel matrix.

    Block eigenpairs with eigenvalue below ``rtol`` times the largest are
    dropped.
    """
    dec = state.block_state.decomp
    top = dec.values.max()
    if not top > 0:
        raise ArithmeticError("landmark block has no positive eigenvalues")
    keep = dec.values >= rtol * top
    n, m = state.n, state.m
    values = (n / m) * dec.values[keep]
    vectors = np.sqrt(m / n) * (state.cross_kernel @ dec.vectors[:, keep]) / dec.values[keep]
    return values, vectors


def approx_kernel(state: NystromState, rtol: float = PINV_RTOL) -> np.ndarray:
    values, vectors = rescale(state, rtol)
    k = (vectors * values) @ vectors.T
    return 0.5 * (k + k.T)
