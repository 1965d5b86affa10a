"""Incremental kernel PCA through symmetric rank-one eigendecomposition updates."""
from .eigen_update import (
    EigenDecomposition,
    EigenvalueCollisionError,
    NumericalError,
    RankOnePerturbation,
    RootNotFoundError,
    rank_one_update,
)
from .ikpca import IkpcaState, Mode, add_point, init_batch, init_centered, init_zero_mean
from .kernels import KernelConfig, kernel_matrix, median_bandwidth
from .metrics import NormTriple, norm_triple
from .nystrom import NystromState, add_landmark, approx_kernel, nystrom_init

__all__ = [
    "EigenDecomposition",
    "EigenvalueCollisionError",
    "IkpcaState",
    "KernelConfig",
    "Mode",
    "NormTriple",
    "NumericalError",
    "NystromState",
    "RankOnePerturbation",
    "RootNotFoundError",
    "add_landmark",
    "add_point",
    "approx_kernel",
    "init_batch",
    "init_centered",
    "init_zero_mean",
    "kernel_matrix",
    "median_bandwidth",
    "norm_triple",
    "nystrom_init",
    "rank_one_update",
]
