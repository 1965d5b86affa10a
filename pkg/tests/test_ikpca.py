import dataclasses

import numpy as np
import pytest

from conftest import rel_fro
from incremental_kpca.eigen_update import EigenDecomposition
from incremental_kpca.ikpca import (
    Mode,
    PivotTooSmallError,
    add_point,
    batch_target,
    expand_decomposition,
    expansion_pieces,
    init_batch,
    init_centered,
    init_zero_mean,
    load_state,
    mean_update_vector,
    orthogonality_error,
    project,
    reconstruct,
    save_state,
)
from incremental_kpca.batch_reference import center_kernel
from incremental_kpca.kernels import KernelConfig, kernel_matrix, kernel_vector

CFG = KernelConfig(1.0)


def stream(state, points):
    for p in points:
        state = add_point(state, p)
    return state


def test_init_zero_mean():
    s = init_zero_mean(CFG, [0.5, 0.5])
    assert s.m == 1
    np.testing.assert_array_equal(s.decomp.values, [1.0])
    np.testing.assert_array_equal(s.decomp.vectors, [[1.0]])


def test_init_centered_two_points():
    s = init_centered(CFG, [[0.0], [1.0]])
    c = (1 - np.exp(-1.0)) / 2
    np.testing.assert_allclose(s.decomp.values, [0.0, 2 * c], atol=1e-15)


def test_init_centered_needs_two_points():
    with pytest.raises(ValueError):
        init_centered(CFG, [[0.0]])


def test_expansion_pieces_reconstruct_bordered_matrix(rng):
    m = rng.standard_normal((4, 4))
    m = m + m.T
    v = np.append(rng.standard_normal(4), 2.3)
    p = expansion_pieces(v)
    base = np.zeros((5, 5))
    base[:4, :4] = m
    base[4, 4] = p.new_eigenvalue
    got = base + p.sigma * np.outer(p.v1, p.v1) - p.sigma * np.outer(p.v2, p.v2)
    expected = np.zeros((5, 5))
    expected[:4, :4] = m
    expected[4, :] = v
    expected[:, 4] = v
    np.testing.assert_allclose(got, expected, atol=1e-14)


def test_expansion_pieces_example():
    p = expansion_pieces([0.5, 1.0])
    np.testing.assert_array_equal(p.v1, [0.5, 0.5])
    np.testing.assert_array_equal(p.v2, [0.5, 0.25])
    assert p.sigma == 4.0 and p.new_eigenvalue == 0.25


def test_expand_decomposition_sorts():
    dec = expand_decomposition(EigenDecomposition([1.0, 2.0], np.eye(2)), 6.0)
    np.testing.assert_array_equal(dec.values, [1.0, 1.5, 2.0])
    assert dec.vectors[2, 1] == 1.0


def test_expand_decomposition_rejects_small_pivot():
    with pytest.raises(PivotTooSmallError):
        expand_decomposition(EigenDecomposition([1.0], np.eye(1)), 0.0)


def test_mean_update_vector_repeated_point_is_zero():
    s = init_zero_mean(CFG, [0.0])
    np.testing.assert_allclose(mean_update_vector(s, [1.0], 1.0), [0.0], atol=1e-16)


def test_mean_update_vector_two_points():
    # centered 2x2 kernel has diagonal (1 - e^-1)/2, the single-point one is 0
    s = init_zero_mean(CFG, [0.0])
    u = mean_update_vector(s, [np.exp(-1.0)], 1.0)
    np.testing.assert_allclose(u, [(1 - np.exp(-1.0)) / 4], rtol=1e-14)


def test_mean_update_vector_matches_centering(rng):
    pts = rng.standard_normal((7, 2))
    s = init_batch(CFG, pts[:6], Mode.CENTERED)
    a = kernel_vector(CFG, pts[:6], pts[6])
    u = mean_update_vector(s, a, 1.0)
    k = kernel_matrix(CFG, pts)
    lhs = center_kernel(k)[:6, :6]
    rhs = center_kernel(k[:6, :6]) + u[:, None] + u[None, :]
    np.testing.assert_allclose(lhs, rhs, atol=1e-14)


def test_second_point_example():
    # RBF bandwidth chosen so that k12 = 0.5
    cfg = KernelConfig(1.0 / np.log(2.0))
    s = add_point(init_zero_mean(cfg, [0.0]), [1.0])
    np.testing.assert_allclose(s.decomp.values, [0.5, 1.5], rtol=1e-14)


def test_distant_point_decouples():
    s = init_zero_mean(CFG, [0.0])
    s = add_point(s, [0.5])
    before = s.decomp.values
    s = add_point(s, [1e6])
    np.testing.assert_allclose(s.decomp.values, np.sort(np.append(before, 1.0)), rtol=1e-14)


def test_centered_has_near_zero_eigenvalue(rng):
    s = stream(init_centered(CFG, rng.standard_normal((2, 3))), rng.standard_normal((20, 3)))
    assert np.min(np.abs(s.decomp.values)) <= 1e-6 * np.max(np.abs(s.decomp.values))


def test_third_point_zero_mean():
    pts = np.array([[0.0], [1.0], [2.0]])
    s = stream(init_zero_mean(CFG, pts[0]), pts[1:])
    np.testing.assert_allclose(s.decomp.values, np.linalg.eigvalsh(kernel_matrix(CFG, pts)), atol=1e-14)


@pytest.mark.parametrize("mode, per_point", [(Mode.ZERO_MEAN, 2), (Mode.CENTERED, 4)])
def test_update_counts(rng, mode, per_point):
    pts = rng.standard_normal((12, 3))
    s = stream(init_batch(CFG, pts[:3], mode), pts[3:])
    assert s.m == 12 and not s.excluded
    assert s.update_count == per_point * 9


@pytest.mark.parametrize("mode", list(Mode))
def test_matches_batch(rng, mode):
    pts = rng.standard_normal((40, 3))
    s = stream(init_batch(CFG, pts[:3], mode), pts[3:])
    assert rel_fro(reconstruct(s), batch_target(s)) < 1e-10
    assert orthogonality_error(s) < 1e-10


@pytest.mark.parametrize("mode", list(Mode))
def test_duplicate_point_keeps_batch_equivalence(rng, mode):
    pts = rng.standard_normal((6, 2))
    s = add_point(init_batch(CFG, pts, mode), pts[2])
    assert s.m + len(s.excluded) == 7
    assert rel_fro(reconstruct(s), batch_target(s)) < 1e-10


def assert_rolled_back(before, after):
    assert after.m == before.m and len(after.excluded) == len(before.excluded) + 1
    assert after.excluded[-1].stream_index == before.offered
    assert after.offered == before.offered + 1
    assert after.decomp is before.decomp
    assert after.points is before.points and after.row_sums is before.row_sums
    assert after.kernel_sum == before.kernel_sum
    assert after.update_count == before.update_count


def test_identical_centered_bootstrap_is_rejected():
    from incremental_kpca.eigen_update import EigenvalueCollisionError

    with pytest.raises(EigenvalueCollisionError):
        init_centered(CFG, [[1.0], [1.0]])


@pytest.mark.parametrize("mode", list(Mode))
def test_root_failure_rolls_back(monkeypatch, rng, mode):
    import incremental_kpca.ikpca as ik
    from incremental_kpca.eigen_update import RootNotFoundError

    s = init_batch(CFG, rng.standard_normal((5, 2)), mode)
    calls = []

    def failing(decomp, sigma, v):
        calls.append(sigma)
        if len(calls) == 2:
            raise RootNotFoundError("forced")
        return real(decomp, sigma, v)

    real = ik.rank_one_update
    monkeypatch.setattr(ik, "rank_one_update", failing)
    assert_rolled_back(s, add_point(s, rng.standard_normal(2)))


def test_orthogonality_error_of_bare_matrix():
    assert orthogonality_error(np.diag([1.0, 2.0])) == 3.0


def test_projection_recovers_gram(rng):
    pts = rng.standard_normal((8, 2))
    s = stream(init_zero_mean(CFG, pts[0]), pts[1:])
    coords = np.array([project(s, p, 8) for p in pts])
    np.testing.assert_allclose(coords @ coords.T, kernel_matrix(CFG, pts), atol=1e-9)


def test_projection_centered_recovers_centered_gram(rng):
    pts = rng.standard_normal((8, 2))
    s = init_centered(CFG, pts)
    coords = np.array([project(s, p, 7) for p in pts])
    np.testing.assert_allclose(coords @ coords.T, batch_target(s), atol=1e-9)


def test_projection_top_k_zero_and_range(rng):
    s = init_zero_mean(CFG, [0.0])
    assert project(s, [1.0], 0).shape == (0,)
    with pytest.raises(ValueError):
        project(s, [1.0], 2)


def test_snapshot_round_trip(tmp_path, rng):
    pts = rng.standard_normal((10, 2))
    s = stream(init_centered(CFG, pts[:3]), np.vstack([pts[3:], pts[4:5]]))
    save_state(s, tmp_path / "state.json")
    back = load_state(tmp_path / "state.json")
    for f in dataclasses.fields(s):
        a, b = getattr(s, f.name), getattr(back, f.name)
        if isinstance(a, EigenDecomposition):
            assert np.array_equal(a.values, b.values) and np.array_equal(a.vectors, b.vectors)
        elif isinstance(a, np.ndarray):
            assert np.array_equal(a, b)
        else:
            assert a == b
    # continuing from the restored state is bit-identical
    nxt = rng.standard_normal(2)
    assert np.array_equal(add_point(s, nxt).decomp.vectors, add_point(back, nxt).decomp.vectors)
