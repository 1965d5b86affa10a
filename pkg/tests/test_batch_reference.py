import numpy as np
import pytest

from conftest import random_symmetric
from incremental_kpca.batch_reference import (
    batch_centered_kernel,
    batch_eig,
    batch_nystrom,
    center_kernel,
    jacobi_eigh,
    nystrom_from_blocks,
)
from incremental_kpca.kernels import KernelConfig, kernel_matrix


def test_diagonal_input():
    dec = batch_eig(np.diag([3.0, 1.0]))
    np.testing.assert_array_equal(dec.values, [1.0, 3.0])
    np.testing.assert_array_equal(np.abs(dec.vectors), [[0, 1], [1, 0]])


def test_two_by_two():
    dec = batch_eig(np.array([[2.0, 1.0], [1.0, 2.0]]))
    np.testing.assert_allclose(dec.values, [1.0, 3.0], rtol=1e-15)
    s = np.sqrt(0.5)
    np.testing.assert_allclose(dec.vectors[:, 1], [s, s], rtol=1e-15)


def test_sign_convention(rng):
    dec = batch_eig(random_symmetric(rng, 12))
    idx = np.argmax(np.abs(dec.vectors), axis=0)
    assert np.all(dec.vectors[idx, np.arange(12)] > 0)


def test_jacobi_against_lapack(rng):
    a = random_symmetric(rng, 40)
    w, _ = jacobi_eigh(a)
    np.testing.assert_allclose(np.sort(w), np.linalg.eigvalsh(a), atol=1e-12)


@pytest.mark.parametrize(
    "bad",
    [np.ones((2, 3)), np.array([[1.0, 2.0], [0.0, 1.0]]), np.array([[np.nan, 0.0], [0.0, 1.0]])],
)
def test_rejects_bad_input(bad):
    with pytest.raises(ValueError):
        batch_eig(bad)


def test_center_kernel_examples():
    np.testing.assert_array_equal(center_kernel(np.ones((3, 3))), np.zeros((3, 3)))
    np.testing.assert_allclose(center_kernel(np.eye(2)), [[0.5, -0.5], [-0.5, 0.5]], rtol=1e-15)


def test_center_kernel_zero_row_sums(rng):
    kc = batch_centered_kernel(KernelConfig(1.0), rng.standard_normal((15, 3)))
    assert np.abs(kc.sum(axis=1)).max() < 1e-13


def test_linear_kernel_centering_is_gram_of_centered_data(rng):
    x = rng.standard_normal((5, 3))
    xc = x - x.mean(axis=0)
    np.testing.assert_allclose(center_kernel(x @ x.T), xc @ xc.T, atol=1e-13)


def test_single_landmark_formula():
    k_nm = np.array([[1.0], [0.5], [0.25]])
    approx = nystrom_from_blocks(k_nm, np.array([[1.0]]))
    np.testing.assert_allclose(approx, k_nm @ k_nm.T, rtol=1e-15)


def test_all_landmarks_reproduce_kernel(rng):
    cfg = KernelConfig(2.0)
    pts = rng.standard_normal((12, 2))
    k = kernel_matrix(cfg, pts)
    approx = batch_nystrom(cfg, pts, range(12))
    assert np.linalg.norm(approx - k) / np.linalg.norm(k) < 1e-10
