"""Symmetric rank-one modification of an eigendecomposition.

Given ``A = U diag(d) U^T`` and a perturbation ``sigma * v v^T``, the
eigenvalues of the perturbed matrix are the roots of the secular function

    omega(x) = 1 + sigma * sum_j z_j**2 / (d_j - x),    z = U^T v,

one root per interlacing interval.  Each root is stored as an offset ``tau``
from its closest pole ``d[origin]`` so that the differences ``d_j - root``
needed for the eigenvectors are available to full relative accuracy.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFLATION_TOL = 1e-12
SEPARATION_FLOOR = 1e-13
ROOT_RTOL = 1e-14
OMEGA_ATOL = 1e-13
MAX_SECULAR_ITER = 200


class NumericalError(ArithmeticError):
    """Base class for recoverable numerical failures of an update."""


class RootNotFoundError(NumericalError):
    """The secular function shows no sign change inside a bracket."""


class EigenvalueCollisionError(NumericalError):
    """An updated eigenvalue coincides with an old pole in an active column."""


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in ascending order and the matching eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).reshape(-1)
        # one canonical layout, so BLAS rounding does not depend on provenance
        vectors = np.ascontiguousarray(self.vectors, dtype=float)
        if vectors.ndim != 2 or vectors.shape != (values.size, values.size):
            raise ValueError(
                f"vectors must be {values.size}x{values.size}, got {vectors.shape}"
            )
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "vectors", vectors)

    @property
    def n(self) -> int:
        return self.values.size

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T

    def sorted(self) -> "EigenDecomposition":
        order = np.argsort(self.values, kind="stable")
        return EigenDecomposition(self.values[order], self.vectors[:, order])


@dataclass(frozen=True)
class RankOnePerturbation:
    sigma: float
    v: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float).reshape(-1)
        if not np.all(np.isfinite(v)) or not np.isfinite(self.sigma):
            raise ValueError("perturbation must have finite entries")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "sigma", float(self.sigma))

    def apply(self, decomp: EigenDecomposition) -> EigenDecomposition:
        return rank_one_update(decomp, self.sigma, self.v)


def project_update(decomp: EigenDecomposition, v) -> np.ndarray:
    """Express ``v`` in the eigenbasis, ``z = U^T v``."""
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.size != decomp.n:
        raise ValueError(f"vector of length {v.size} does not match n={decomp.n}")
    return decomp.vectors.T @ v


def deflate(z, tol_rel: float = DEFLATION_TOL):
    """Split indices into (active, inert) by the size of ``|z_i|`` relative to ``||z||``.

    Inert eigenpairs are left untouched by the update.  An all-zero ``z``
    makes every index inert.
    """
    if tol_rel <= 0:
        raise ValueError("tol_rel must be positive")
    z = np.asarray(z, dtype=float)
    norm = np.linalg.norm(z)
    inert_mask = np.abs(z) <= tol_rel * norm
    return np.flatnonzero(~inert_mask), np.flatnonzero(inert_mask)


def root_bracket(i: int, values, sigma: float, zTz: float):
    """Interlacing interval for the ``i``-th (0-based) updated eigenvalue."""
    values = np.asarray(values, dtype=float)
    n = values.size
    if not 0 <= i < n:
        raise IndexError(f"root index {i} out of range for n={n}")
    if sigma == 0:
        raise ValueError("sigma must be nonzero")
    if sigma > 0:
        if i < n - 1:
            return values[i], values[i + 1]
        return values[n - 1], values[n - 1] + sigma * zTz
    if i > 0:
        return values[i - 1], values[i]
    return values[0] + sigma * zTz, values[0]


def _solve_positive(d, rho, z):
    """Roots of ``diag(d) + rho z z^T`` for ``rho > 0``, ``d`` strictly ascending.

    Returns ``(origin, tau)`` with root ``i`` equal to ``d[origin[i]] + tau[i]``.
    Newton's method is applied to ``F(tau) = tau * omega(d[origin] + tau)``,
    which is smooth at the origin pole, and safeguarded by bisection on the
    half-interval that contains the root.
    """
    k = d.size
    z2 = z * z
    if k == 1:
        return np.zeros(1, dtype=int), np.array([rho * z2[0]])

    origin = np.arange(k)
    # Half of each gap; the last root lives in (d[-1], d[-1] + rho * z^T z].
    gaps = np.diff(d)
    half = 0.5 * gaps
    delta_mid = d[None, :] - d[:-1, None] - half[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        omega_mid = 1.0 + rho * np.sum(z2[None, :] / delta_mid, axis=1)
    if not np.all(np.isfinite(omega_mid)):
        raise RootNotFoundError("secular function is not finite at a bracket midpoint")
    right = omega_mid < 0
    origin[:-1][right] += 1

    # Bracket in tau, as (pole end, far end); F < 0 at the pole end, F >= 0 at the far end.
    far = np.empty(k)
    far[:-1] = np.where(right, half - gaps, half)
    far[-1] = rho * z2.sum() * (1.0 + 4 * np.finfo(float).eps)
    pole = np.zeros(k)

    delta = d[None, :] - d[origin][:, None]

    def evaluate(tau, rows):
        den = delta[rows] - tau[:, None]
        w = z2[None, :] / den
        f = tau * (1.0 + rho * np.sum(w, axis=1))
        fp = 1.0 + rho * np.sum(w * delta[rows] / den, axis=1)
        return f, fp

    f_far, _ = evaluate(far[-1:], np.array([k - 1]))
    if not f_far[0] >= 0:
        raise RootNotFoundError("no sign change in the outermost bracket")

    lo = pole.copy()
    hi = far.copy()
    tau = np.zeros(k)
    f = -rho * z2[origin]
    fp = 1.0 + rho * np.sum(
        np.divide(z2[None, :], delta, out=np.zeros_like(delta), where=delta != 0), axis=1
    )
    active = np.ones(k, dtype=bool)
    for _ in range(MAX_SECULAR_ITER):
        rows = np.flatnonzero(active)
        if rows.size == 0:
            break
        t, ft, fpt = tau[rows], f[rows], fp[rows]
        lo_r, hi_r = lo[rows], hi[rows]
        with np.errstate(divide="ignore", invalid="ignore"):
            step = ft / fpt
        newton = t - step
        inside = np.isfinite(newton) & ((newton - lo_r) * (newton - hi_r) < 0)
        new_t = np.where(inside, newton, 0.5 * (lo_r + hi_r))
        new_f, new_fp = evaluate(new_t, rows)
        if not np.all(np.isfinite(new_f)):
            raise RootNotFoundError("secular function evaluation overflowed")
        neg = new_f < 0
        lo_r = np.where(neg, new_t, lo_r)
        hi_r = np.where(neg, hi_r, new_t)
        lo[rows], hi[rows] = lo_r, hi_r
        tau[rows], f[rows], fp[rows] = new_t, new_f, new_fp
        scale = np.maximum(np.abs(new_t), np.finfo(float).tiny)
        # new_f / new_t is omega itself.
        done = (
            (new_f == 0)
            | (np.abs(hi_r - lo_r) <= ROOT_RTOL * scale)
            | (np.abs(new_t - t) <= 2 * np.finfo(float).eps * scale)
            | (np.abs(new_f) < OMEGA_ATOL * scale)
        )
        active[rows[done]] = False
    else:
        raise RootNotFoundError("secular iteration did not converge")
    return origin, tau


def _lowner_weights(d, rho, origin, tau):
    """Magnitudes of the vector ``w`` for which the computed roots are exact.

    The eigenvalues of ``diag(d) + rho w w^T`` are the roots when

        w_i**2 = prod_j (root_j - d_i) / (rho * prod_{j != i} (d_j - d_i)),

    evaluated here as a product of interlacing ratios, all positive.
    """
    k = d.size
    # diff[i, j] = root_j - d_i, formed from the origin pole of root j.
    diff = (d[origin][None, :] - d[:, None]) + tau[None, :]
    w2 = diff[:, -1] / rho
    if k > 1:
        idx = np.arange(k - 1)
        den_index = np.where(idx[None, :] < np.arange(k)[:, None], idx[None, :], idx[None, :] + 1)
        den = d[den_index] - d[:, None]
        w2 = w2 * np.prod(diff[:, :-1] / den, axis=1)
    return np.sqrt(np.abs(w2))


def _solve_secular(d, sigma, z):
    """Roots as ``(origin, tau)`` plus the consistent weight magnitudes."""
    if sigma > 0:
        origin, tau = _solve_positive(d, sigma, z)
        return origin, tau, _lowner_weights(d, sigma, origin, tau)
    # diag(d) - |s| z z^T = -(diag(-d) + |s| z z^T); reverse to keep -d ascending.
    flipped = -d[::-1]
    origin, tau = _solve_positive(flipped, -sigma, z[::-1])
    weights = _lowner_weights(flipped, -sigma, origin, tau)
    k = d.size
    return (k - 1 - origin)[::-1], -tau[::-1], weights[::-1]


def _separate(values, vectors, z, active):
    """Givens-rotate z-weight off eigenvalues that coincide within the floor.

    Works in place on ``vectors`` and ``z``; returns the surviving active set.
    """
    if active.size < 2:
        return active
    floor = SEPARATION_FLOOR * np.max(np.abs(values))
    keep = [active[0]]
    for i in active[1:]:
        p = keep[-1]
        if values[i] - values[p] <= floor:
            r = np.hypot(z[p], z[i])
            c, s = z[i] / r, z[p] / r
            if vectors is not None:
                up, ui = vectors[:, p].copy(), vectors[:, i].copy()
                vectors[:, p] = c * up - s * ui
                vectors[:, i] = s * up + c * ui
            z[p], z[i] = 0.0, r
            keep[-1] = i
        else:
            keep.append(i)
    return np.asarray(keep, dtype=int)


def secular_roots(values, sigma: float, z, tol: float = ROOT_RTOL) -> np.ndarray:
    """Eigenvalues of ``diag(values) + sigma z z^T``, ascending.

    Components of ``z`` below the deflation threshold, and all but one of any
    cluster of coincident eigenvalues, keep their old eigenvalue.
    """
    values = np.asarray(values, dtype=float)
    z = np.array(z, dtype=float)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if sigma == 0 or not np.any(z):
        return values.copy()
    active, _ = deflate(z)
    active = _separate(values, None, z, active)
    new = values.copy()
    origin, tau, _ = _solve_secular(values[active], sigma, z[active])
    new[active] = values[active][origin] + tau
    return np.sort(new, kind="stable")


def update_eigenvectors(decomp: EigenDecomposition, new_values, z, *, origin=None, tau=None):
    """Eigenvectors for the updated eigenvalues of the active block.

    Column ``i`` is ``U D_i^{-1} z / ||D_i^{-1} z||`` with ``D_i = diag(d) - new_i I``.
    When the roots are supplied as ``(origin, tau)`` the diagonal differences
    are formed relative to the origin pole, which keeps them accurate for
    roots that sit very close to an old eigenvalue.  Indices with ``z_i == 0``
    keep their old column.
    """
    d = decomp.values
    z = np.asarray(z, dtype=float)
    new_values = np.asarray(new_values, dtype=float)
    active = np.flatnonzero(z)
    out = decomp.vectors.copy()
    if active.size == 0:
        return out
    da, za = d[active], z[active]
    if origin is None:
        diff = da[:, None] - new_values[active][None, :]
    else:
        diff = (da[:, None] - da[origin][None, :]) - tau[None, :]
    if np.any(diff == 0):
        raise EigenvalueCollisionError("updated eigenvalue equals an old pole")
    w = za[:, None] / diff
    norms = np.linalg.norm(w, axis=0)
    if not np.all(np.isfinite(norms)) or np.any(norms == 0):
        raise EigenvalueCollisionError("eigenvector normalisation failed")
    out[:, active] = decomp.vectors[:, active] @ (w / norms)
    return out


def rank_one_update(decomp: EigenDecomposition, sigma: float, v) -> EigenDecomposition:
    """Eigendecomposition of ``U diag(d) U^T + sigma v v^T``."""
    sigma = float(sigma)
    z = project_update(decomp, v)
    if sigma == 0 or not np.any(z):
        return decomp
    active, _ = deflate(z)
    vectors = decomp.vectors.copy()
    active = _separate(decomp.values, vectors, z, active)
    d_active = decomp.values[active]
    origin, tau, weights = _solve_secular(d_active, sigma, z[active])
    # Eigenvectors are built from the recomputed weights, not z itself, so that
    # they stay orthogonal when roots cluster against the old eigenvalues.
    z_active = np.zeros_like(z)
    z_active[active] = np.copysign(weights, z[active])

    values = decomp.values.copy()
    values[active] = d_active[origin] + tau
    rotated = EigenDecomposition(decomp.values, vectors)
    new_vectors = update_eigenvectors(rotated, values, z_active, origin=origin, tau=tau)
    return EigenDecomposition(values, new_vectors).sorted()
