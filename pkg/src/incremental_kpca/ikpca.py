"""Incremental eigendecomposition of a growing kernel matrix.

Two modes are supported.  ``ZERO_MEAN`` tracks the plain kernel matrix ``K``;
each new point expands the decomposition by one eigenpair and applies two
symmetric rank-one updates.  ``CENTERED`` tracks the mean-adjusted matrix
``K' = K - 1K - K1 + 1K1``; two extra rank-one updates first shift the old
block to the new mean.  Neither mode stores ``K'``: the state holds only the
decomposition, the retained points, the sum of all kernel entries and the
row sums of ``K``.

States are immutable; ``add_point`` returns a new state.  A point that would
make the update numerically rank deficient is excluded and recorded, and the
returned state is otherwise identical to the input.
"""
from __future__ import annotations

import dataclasses
import enum
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .batch_reference import batch_eig, center_kernel
from .eigen_update import EigenDecomposition, EigenvalueCollisionError, NumericalError, rank_one_update
from .kernels import KernelConfig, as_points, kernel_eval, kernel_matrix, kernel_vector

EXCLUSION_RTOL = 1e-12
SNAPSHOT_VERSION = 1


class Mode(str, enum.Enum):
    ZERO_MEAN = "zero_mean"
    CENTERED = "centered"


class PivotTooSmallError(NumericalError):
    """The diagonal entry of the expansion is too small to expand safely."""


@dataclass(frozen=True)
class Exclusion:
    stream_index: int
    reason: str


@dataclass(frozen=True)
class ExpansionPieces:
    """Vectors for growing a matrix by one row/column ``v`` with two rank-one updates.

    ``[[M, 0], [0, v[-1]/4]] + sigma v1 v1^T - sigma v2 v2^T`` equals ``M``
    bordered by ``v``.
    """

    v1: np.ndarray
    v2: np.ndarray
    sigma: float
    new_eigenvalue: float


def expansion_pieces(v) -> ExpansionPieces:
    v = np.asarray(v, dtype=float)
    pivot = v[-1]
    v1 = v.copy()
    v1[-1] = pivot / 2
    v2 = v.copy()
    v2[-1] = pivot / 4
    return ExpansionPieces(v1, v2, 4.0 / pivot, pivot / 4)


def expand_decomposition(decomp: EigenDecomposition, pivot: float, threshold: float = 0.0):
    """Append the eigenpair ``(pivot / 4, e_{m+1})`` and restore ascending order."""
    if not pivot > threshold:
        raise PivotTooSmallError(f"pivot {pivot:.3e} not above threshold {threshold:.3e}")
    m = decomp.n
    vectors = np.zeros((m + 1, m + 1))
    vectors[:m, :m] = decomp.vectors
    vectors[m, m] = 1.0
    values = np.append(decomp.values, pivot / 4)
    return EigenDecomposition(values, vectors).sorted()


@dataclass(frozen=True)
class IkpcaState:
    mode: Mode
    kernel: KernelConfig
    decomp: EigenDecomposition
    points: np.ndarray
    kernel_sum: float
    row_sums: np.ndarray
    bootstrap_size: int = 1
    update_count: int = 0
    offered: int = 0
    excluded: tuple = field(default_factory=tuple)

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def accepted(self) -> int:
        return self.m


def init_zero_mean(cfg: KernelConfig, x1) -> IkpcaState:
    x1 = np.atleast_1d(np.asarray(x1, dtype=float))
    k11 = kernel_eval(cfg, x1, x1)
    return IkpcaState(
        mode=Mode.ZERO_MEAN,
        kernel=cfg,
        decomp=EigenDecomposition(np.array([k11]), np.eye(1)),
        points=x1[None, :].copy(),
        kernel_sum=k11,
        row_sums=np.array([k11]),
        bootstrap_size=1,
        offered=1,
    )


def init_batch(cfg: KernelConfig, batch, mode: Mode = Mode.ZERO_MEAN) -> IkpcaState:
    """Start from a batch eigendecomposition of the first ``m0`` points."""
    pts = as_points(batch).copy()
    mode = Mode(mode)
    if mode is Mode.CENTERED and pts.shape[0] < 2:
        raise ValueError("centered mode needs a bootstrap batch of at least 2 points")
    k = kernel_matrix(cfg, pts)
    target = center_kernel(k) if mode is Mode.CENTERED else k
    if mode is Mode.CENTERED and not np.any(target):
        raise EigenvalueCollisionError("centered bootstrap is the zero matrix; points must be distinct")
    row_sums = k.sum(axis=1)
    return IkpcaState(
        mode=mode,
        kernel=cfg,
        decomp=batch_eig(target),
        points=pts,
        kernel_sum=float(row_sums.sum()),
        row_sums=row_sums,
        bootstrap_size=pts.shape[0],
        offered=pts.shape[0],
    )


def init_centered(cfg: KernelConfig, batch) -> IkpcaState:
    return init_batch(cfg, batch, Mode.CENTERED)


def mean_update_vector(state: IkpcaState, a, k_new: float) -> np.ndarray:
    """Vector ``u`` with ``K'_{m+1}[:m, :m] = K'_m + 1 u^T + u 1^T``."""
    a = np.asarray(a, dtype=float)
    m = state.m
    if a.size != m:
        raise ValueError(f"kernel vector has length {a.size}, expected {m}")
    s_next = state.kernel_sum + 2 * a.sum() + k_new
    c = -state.kernel_sum / m**2 + s_next / (m + 1) ** 2
    return state.row_sums / (m * (m + 1)) - a / (m + 1) + 0.5 * c


def _exclude(state: IkpcaState, reason: str) -> IkpcaState:
    record = Exclusion(state.offered, reason)
    return dataclasses.replace(state, offered=state.offered + 1, excluded=state.excluded + (record,))


def _expand_and_update(decomp, v, threshold=0.0):
    decomp = expand_decomposition(decomp, v[-1], threshold)
    pieces = expansion_pieces(v)
    decomp = rank_one_update(decomp, pieces.sigma, pieces.v1)
    return rank_one_update(decomp, -pieces.sigma, pieces.v2)


def add_point_zero_mean(state: IkpcaState, x_new) -> IkpcaState:
    if state.mode is not Mode.ZERO_MEAN:
        raise ValueError("state is not in zero-mean mode")
    x_new = np.atleast_1d(np.asarray(x_new, dtype=float))
    a = kernel_vector(state.kernel, state.points, x_new)
    k_new = kernel_eval(state.kernel, x_new, x_new)
    try:
        decomp = _expand_and_update(state.decomp, np.append(a, k_new))
    except NumericalError as exc:
        return _exclude(state, f"{type(exc).__name__}: {exc}")
    return dataclasses.replace(
        state,
        decomp=decomp,
        points=np.vstack([state.points, x_new]),
        kernel_sum=state.kernel_sum + 2 * a.sum() + k_new,
        row_sums=np.append(state.row_sums + a, a.sum() + k_new),
        update_count=state.update_count + 2,
        offered=state.offered + 1,
    )


def add_point_centered(state: IkpcaState, x_new) -> IkpcaState:
    if state.mode is not Mode.CENTERED:
        raise ValueError("state is not in centered mode")
    x_new = np.atleast_1d(np.asarray(x_new, dtype=float))
    a = kernel_vector(state.kernel, state.points, x_new)
    k_new = kernel_eval(state.kernel, x_new, x_new)
    u = mean_update_vector(state, a, k_new)
    ones = np.ones(state.m)

    row_sums = np.append(state.row_sums + a, a.sum() + k_new)
    kernel_sum = state.kernel_sum + 2 * a.sum() + k_new
    m = state.m + 1
    k_col = np.append(a, k_new)
    v = k_col - ((a.sum() + k_new) + row_sums - kernel_sum / m) / m
    try:
        decomp = rank_one_update(state.decomp, 0.5, ones + u)
        decomp = rank_one_update(decomp, -0.5, ones - u)
        threshold = EXCLUSION_RTOL * max(np.max(np.abs(decomp.values)), 0.0)
        decomp = _expand_and_update(decomp, v, threshold)
    except NumericalError as exc:
        return _exclude(state, f"{type(exc).__name__}: {exc}")
    return dataclasses.replace(
        state,
        decomp=decomp,
        points=np.vstack([state.points, x_new]),
        kernel_sum=kernel_sum,
        row_sums=row_sums,
        update_count=state.update_count + 4,
        offered=state.offered + 1,
    )


def add_point(state: IkpcaState, x_new) -> IkpcaState:
    if state.mode is Mode.CENTERED:
        return add_point_centered(state, x_new)
    return add_point_zero_mean(state, x_new)


def reconstruct(state: IkpcaState) -> np.ndarray:
    return state.decomp.reconstruct()


def orthogonality_error(state_or_vectors) -> float:
    """``||U U^T - I||_F`` for a state or a bare eigenvector matrix."""
    u = state_or_vectors.decomp.vectors if isinstance(state_or_vectors, IkpcaState) else np.asarray(state_or_vectors)
    return float(np.linalg.norm(u @ u.T - np.eye(u.shape[0])))


def batch_target(state: IkpcaState) -> np.ndarray:
    """The matrix the state should reproduce, recomputed from its points."""
    k = kernel_matrix(state.kernel, state.points)
    return center_kernel(k) if state.mode is Mode.CENTERED else k


def project(state: IkpcaState, x, top_k: int) -> np.ndarray:
    """Coordinates of ``x`` along the ``top_k`` leading kernel principal axes."""
    if not 0 <= top_k <= state.m:
        raise ValueError(f"top_k must lie in [0, {state.m}]")
    if top_k == 0:
        return np.empty(0)
    kx = kernel_vector(state.kernel, state.points, x)
    if state.mode is Mode.CENTERED:
        m = state.m
        kx = kx - state.row_sums / m - kx.sum() / m + state.kernel_sum / m**2
    values = state.decomp.values[::-1][:top_k]
    vectors = state.decomp.vectors[:, ::-1][:, :top_k]
    if np.any(values <= 0):
        raise ValueError("requested components include non-positive eigenvalues")
    return (vectors.T @ kx) / np.sqrt(values)


def state_to_dict(state: IkpcaState) -> dict:
    return {
        "format": "incremental_kpca.state",
        "version": SNAPSHOT_VERSION,
        "mode": state.mode.value,
        "kernel": {"family": state.kernel.family, "sigma": state.kernel.sigma},
        "m": state.m,
        "dim": state.points.shape[1],
        "values": state.decomp.values.tolist(),
        "vectors": state.decomp.vectors.reshape(-1).tolist(),
        "kernel_sum": state.kernel_sum,
        "row_sums": state.row_sums.tolist(),
        "points": state.points.reshape(-1).tolist(),
        "bootstrap_size": state.bootstrap_size,
        "update_count": state.update_count,
        "offered": state.offered,
        "excluded": [[e.stream_index, e.reason] for e in state.excluded],
    }


def state_from_dict(data: dict) -> IkpcaState:
    if data.get("format") != "incremental_kpca.state":
        raise ValueError("not an incremental_kpca state snapshot")
    if data.get("version") != SNAPSHOT_VERSION:
        raise ValueError(f"unsupported snapshot version {data.get('version')}")
    m, dim = data["m"], data["dim"]
    return IkpcaState(
        mode=Mode(data["mode"]),
        kernel=KernelConfig(sigma=data["kernel"]["sigma"], family=data["kernel"]["family"]),
        decomp=EigenDecomposition(
            np.array(data["values"], dtype=float),
            np.array(data["vectors"], dtype=float).reshape(m, m),
        ),
        points=np.array(data["points"], dtype=float).reshape(m, dim),
        kernel_sum=float(data["kernel_sum"]),
        row_sums=np.array(data["row_sums"], dtype=float),
        bootstrap_size=data["bootstrap_size"],
        update_count=data["update_count"],
        offered=data["offered"],
        excluded=tuple(Exclusion(int(i), str(r)) for i, r in data["excluded"]),
    )


def save_state(state: IkpcaState, path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(state)), encoding="utf-8")


def load_state(path) -> IkpcaState:
    return state_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
