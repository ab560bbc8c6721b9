import math

import numpy as np
import pytest
from hypothesis import given

from conftest import dims, random_hermitian, random_unitary, seeds
from mixphase.errors import NotHermitian, NotPSD, RankDeficient
from mixphase.linalg import (
    angle_distance,
    eig_hermitian,
    expm_antihermitian_many,
    matrix_exp,
    matrix_inv_sqrt_pd,
    matrix_sqrt_psd,
    ordered_product,
    polar_decompose,
    principal_arg,
    wrap_angle,
)

SZ = np.diag([1.0, -1.0]).astype(complex)


def test_eig_identity():
    es = eig_hermitian(np.eye(3))
    np.testing.assert_allclose(es.values, [1, 1, 1])
    np.testing.assert_allclose(es.vectors.conj().T @ es.vectors, np.eye(3), atol=1e-14)


def test_eig_sigma_z_order_and_vectors():
    es = eig_hermitian(SZ)
    np.testing.assert_allclose(es.values, [-1, 1])
    np.testing.assert_allclose(np.abs(es.vectors), [[0, 1], [1, 0]], atol=1e-14)


def test_eig_reconstruction_8x8(rng):
    m = random_hermitian(rng, 8)
    es = eig_hermitian(m)
    assert np.linalg.norm(es.reconstruct() - m) <= 1e-12 * np.linalg.norm(m) * 8


def test_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        eig_hermitian(np.array([[0, 1], [0, 0]], dtype=complex))


@given(seeds, dims)
def test_eig_orthonormal_and_sorted(seed, n):
    rng = np.random.default_rng(seed)
    es = eig_hermitian(random_hermitian(rng, n))
    assert np.all(np.diff(es.values) >= 0)
    np.testing.assert_allclose(es.vectors.conj().T @ es.vectors, np.eye(n), atol=1e-12)


def test_sqrt_trivial_cases():
    np.testing.assert_allclose(matrix_sqrt_psd(np.eye(3)), np.eye(3))
    np.testing.assert_allclose(matrix_sqrt_psd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-15)


def test_sqrt_squares_back(rng):
    g = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    m = g @ g.conj().T
    s = matrix_sqrt_psd(m)
    assert np.linalg.norm(s @ s - m) <= 1e-11 * np.linalg.norm(m)


def test_sqrt_rejects_negative():
    with pytest.raises(NotPSD):
        matrix_sqrt_psd(np.diag([1.0, -0.5]))


def test_inv_sqrt_rank_deficient():
    with pytest.raises(RankDeficient):
        matrix_inv_sqrt_pd(np.diag([1.0, 0.0]))
    np.testing.assert_allclose(matrix_inv_sqrt_pd(np.diag([4.0, 0.25])), np.diag([0.5, 2.0]))


def test_exp_trivial():
    np.testing.assert_allclose(matrix_exp(np.zeros((3, 3))), np.eye(3))
    np.testing.assert_allclose(matrix_exp(1j * math.pi / 2 * SZ), np.diag([1j, -1j]), atol=1e-15)


@given(seeds, dims)
def test_exp_inverse_pair(seed, n):
    a = 1j * random_hermitian(np.random.default_rng(seed), n)
    assert np.linalg.norm(matrix_exp(a) @ matrix_exp(-a) - np.eye(n)) <= 1e-12 * n


def test_exp_general_matches_series():
    a = np.array([[0.1, 1.0], [0.0, 0.1]])  # not normal
    expect = math.exp(0.1) * np.array([[1.0, 1.0], [0.0, 1.0]])
    np.testing.assert_allclose(matrix_exp(a), expect, atol=1e-14)


def test_expm_batched_matches_single(rng):
    stack = np.array([1j * random_hermitian(rng, 3) for _ in range(5)])
    batched = expm_antihermitian_many(stack)
    for a, e in zip(stack, batched):
        np.testing.assert_allclose(e, matrix_exp(a), atol=1e-13)


def test_ordered_product_later_on_left(rng):
    fs = np.array([random_unitary(rng, 3) for _ in range(7)])
    expect = np.eye(3)
    for f in fs:
        expect = f @ expect
    np.testing.assert_allclose(ordered_product(fs), expect, atol=1e-13)


def test_polar_trivial(rng):
    u = random_unitary(rng, 4)
    p, v = polar_decompose(u)
    np.testing.assert_allclose(p, np.eye(4), atol=1e-12)
    np.testing.assert_allclose(v, u, atol=1e-12)
    g = rng.standard_normal((4, 4))
    pos = g @ g.T + np.eye(4)
    p, v = polar_decompose(pos)
    np.testing.assert_allclose(p, pos, atol=1e-12)
    np.testing.assert_allclose(v, np.eye(4), atol=1e-12)


@given(seeds)
def test_polar_reconstruction(seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    p, v = polar_decompose(a)
    assert np.linalg.norm(p @ v - a) <= 1e-11 * np.linalg.norm(a)
    np.testing.assert_allclose(v @ v.conj().T, np.eye(5), atol=1e-12)
    assert np.all(np.linalg.eigvalsh(p) > 0)


def test_polar_rank_deficient():
    with pytest.raises(RankDeficient):
        polar_decompose(np.diag([1.0, 0.0]))


def test_principal_arg_branch():
    assert principal_arg(1) == 0.0
    assert principal_arg(-1) == math.pi
    assert principal_arg(complex(-1, -0.0)) == math.pi
    assert principal_arg(1j) == pytest.approx(math.pi / 2, abs=1e-15)


@given(seeds)
def test_wrap_angle_range(seed):
    x = np.random.default_rng(seed).uniform(-50, 50)
    w = wrap_angle(x)
    assert -math.pi < w <= math.pi
    assert angle_distance(w, x) < 1e-12
