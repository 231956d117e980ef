import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from mmm.errors import AmbientError, DimensionError
from mmm.linalg import (
    Ambient,
    MatrixPoint,
    frobenius_inner,
    frobenius_norm,
    generator,
    matrix_unit,
    numeric_rank,
    omega_matrix,
    plane_rotation,
    random_orthogonal,
    skew_normal_form,
    spectral_ordered,
    svd_ordered,
)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
seeds = st.integers(0, 2 ** 32 - 1)


def test_ambient_dims():
    assert Ambient.rect(2, 3).dim == 6
    assert Ambient.skew(4).dim == 6
    assert Ambient.sym(4).dim == 10


def test_rect_point_transposes_tall_input():
    p = MatrixPoint.rect(np.ones((4, 2)))
    assert p.shape == (2, 4)
    assert p.transposed
    assert not MatrixPoint.rect(np.ones((2, 4))).transposed


def test_points_are_read_only():
    p = MatrixPoint.sym(np.eye(2))
    with pytest.raises(ValueError):
        p.entries[0, 0] = 3.0


def test_structure_is_exact_by_default():
    with pytest.raises(AmbientError):
        MatrixPoint.skew([[0.0, 1.0], [-1.0 + 1e-15, 0.0]])
    with pytest.raises(AmbientError):
        MatrixPoint.sym([[1.0, 2.0], [2.0 + 1e-15, 1.0]])
    MatrixPoint.sym([[1.0, 2.0], [2.0 + 1e-15, 1.0]], tol=1e-12)


def test_frobenius_examples():
    assert frobenius_inner(np.eye(2), np.eye(2)) == 2.0
    a = np.array([[1.0, 2], [3, 4]])
    b = np.array([[5.0, 6], [7, 8]])
    assert frobenius_inner(a, b) == 70.0


def test_frobenius_invariance(rng):
    a = np.array([[1.0, 2], [3, 4]])
    b = np.array([[5.0, 6], [7, 8]])
    u, v = random_orthogonal(2, rng), random_orthogonal(2, rng)
    assert frobenius_inner(u @ a @ v.T, u @ b @ v.T) == pytest.approx(70.0, abs=1e-12)


def test_frobenius_rejects_mismatch():
    with pytest.raises(DimensionError):
        frobenius_inner(np.eye(2), np.eye(3))
    with pytest.raises(DimensionError):
        frobenius_inner(MatrixPoint.sym(np.eye(2)), MatrixPoint.skew(np.zeros((2, 2))))


@given(arrays(float, (3, 4), elements=finite), arrays(float, (3, 4), elements=finite))
def test_frobenius_symmetric_and_matches_trace(a, b):
    assert frobenius_inner(a, b) == frobenius_inner(b, a)
    assert frobenius_inner(a, b) == pytest.approx(np.trace(a.T @ b), abs=1e-9)
    assert frobenius_norm(a) ** 2 == pytest.approx(frobenius_inner(a, a), rel=1e-12, abs=1e-12)


def test_generator_definition():
    np.testing.assert_array_equal(generator(2, 1, 2), [[0, -1], [1, 0]])
    np.testing.assert_array_equal(generator(3, 1, 3), matrix_unit(3, 3, 3, 1) - matrix_unit(3, 3, 1, 3))


def test_generator_squared_on_sigma():
    sig = np.diag([3.0, 2.0, 0.0])
    out = generator(3, 1, 2) @ generator(3, 1, 2) @ sig
    assert out[0, 0] == -3.0
    assert out[1, 1] == -2.0


def test_generator_index_errors():
    with pytest.raises(IndexError):
        generator(3, 2, 2)
    with pytest.raises(IndexError):
        generator(3, 0, 2)
    with pytest.raises(IndexError):
        matrix_unit(2, 3, 3, 1)


def test_plane_rotation_examples():
    np.testing.assert_array_equal(plane_rotation(3, 1, 2, 0.0), np.eye(3))
    np.testing.assert_allclose(plane_rotation(2, 1, 2, np.pi / 2), [[0, -1], [1, 0]], atol=1e-15)


def test_plane_rotation_derivative():
    h = 1e-5
    fd = (plane_rotation(2, 1, 2, h) - plane_rotation(2, 1, 2, -h)) / (2 * h)
    assert np.max(np.abs(fd - generator(2, 1, 2))) <= 1e-9


@given(st.integers(2, 6), st.data(), st.floats(-7, 7))
def test_plane_rotation_matches_expm(n, data, theta):
    from scipy.linalg import expm
    i = data.draw(st.integers(1, n - 1))
    j = data.draw(st.integers(i + 1, n))
    q = plane_rotation(n, i, j, theta)
    np.testing.assert_allclose(q, expm(theta * generator(n, i, j)), atol=1e-12)
    np.testing.assert_allclose(q.T @ q, np.eye(n), atol=1e-14)


def test_svd_examples():
    res = svd_ordered(np.zeros((2, 3)))
    np.testing.assert_array_equal(res.sigma, [0.0, 0.0])
    assert res.rank == 0
    a = np.zeros((2, 3))
    a[0, 0], a[1, 1] = 3.0, 1.0
    res = svd_ordered(a)
    np.testing.assert_allclose(res.sigma, [3.0, 1.0])
    assert res.rank == 2


@given(seeds)
def test_svd_reconstruction(seed):
    a = np.random.default_rng(seed).normal(size=(4, 5))
    res = svd_ordered(a)
    assert np.max(np.abs(res.reconstruct() - a)) <= 1e-12 * np.linalg.norm(a)
    assert np.all(np.diff(res.sigma) <= 0)
    np.testing.assert_allclose(res.u @ res.u.T, np.eye(4), atol=1e-12)
    np.testing.assert_allclose(res.v @ res.v.T, np.eye(5), atol=1e-12)


def test_svd_rank_is_scale_invariant():
    a = np.outer([1.0, 2.0], [1.0, 0.0, 1.0])
    assert svd_ordered(a).rank == 1
    assert svd_ordered(1e-20 * a).rank == 1


def test_skew_normal_form_examples():
    res = skew_normal_form(np.array([[0.0, 3.0], [-3.0, 0.0]]))
    np.testing.assert_allclose(res.omega, [3.0])
    np.testing.assert_allclose(res.reconstruct(), [[0, 3], [-3, 0]], atol=1e-14)
    a = np.array([[0.0, 1, 0], [-1, 0, 0], [0, 0, 0]])
    res = skew_normal_form(a)
    np.testing.assert_allclose(res.omega, [1.0])
    assert res.rank2r == 2


def test_omega_matrix_convention():
    om = omega_matrix(4, [2.0, 1.0])
    assert om[0, 1] == 2.0 and om[1, 0] == -2.0
    assert om[2, 3] == 1.0 and om[3, 2] == -1.0


@given(seeds, st.integers(2, 7))
def test_skew_normal_form_recovers_conjugated_omega(seed, n):
    rng = np.random.default_rng(seed)
    r = n // 2
    omega = 0.5 + np.cumsum(rng.uniform(0.2, 1.0, size=r))[::-1]
    v = random_orthogonal(n, rng)
    a = v.T @ omega_matrix(n, omega) @ v
    res = skew_normal_form(a)
    np.testing.assert_allclose(res.omega, omega, rtol=1e-10)
    assert res.rank2r == 2 * r
    np.testing.assert_allclose(res.reconstruct(), a, atol=1e-12 * np.abs(a).max())
    np.testing.assert_allclose(res.v @ res.v.T, np.eye(n), atol=1e-12)


def test_skew_normal_form_rejects_non_skew():
    with pytest.raises(AmbientError):
        skew_normal_form(np.eye(3))


def test_spectral_examples():
    np.testing.assert_allclose(spectral_ordered(np.eye(3)).lam, [1, 1, 1])
    res = spectral_ordered(np.diag([2.0, -5.0]))
    np.testing.assert_allclose(res.lam, [2.0, -5.0])
    np.testing.assert_allclose(res.singular_values, [5.0, 2.0])


@given(seeds)
def test_spectral_conjugation(seed):
    rng = np.random.default_rng(seed)
    lam = np.sort(rng.uniform(-3, 3, size=4))[::-1]
    v = random_orthogonal(4, rng)
    res = spectral_ordered(v.T @ np.diag(lam) @ v)
    np.testing.assert_allclose(res.lam, lam, atol=1e-12)
    np.testing.assert_allclose(res.reconstruct(), v.T @ np.diag(lam) @ v, atol=1e-12)


def test_random_orthogonal_special(rng):
    for _ in range(5):
        q = random_orthogonal(4, rng, special=True)
        assert np.linalg.det(q) == pytest.approx(1.0)


def test_numeric_rank():
    vecs = np.array([np.eye(2), 2 * np.eye(2), [[0, 1], [0, 0]]])
    assert numeric_rank(vecs) == 2
