import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from npivtest.errors import InputError
from npivtest.linalg import frobenius_norm, pinv, projection_matrix, svd, sym_inv_sqrt


def test_svd_identity():
    res = svd(np.eye(3))
    np.testing.assert_allclose(res.s, [1.0, 1.0, 1.0])


def test_svd_diagonal():
    res = svd(np.diag([3.0, 2.0, 1.0]))
    np.testing.assert_allclose(res.s, [3.0, 2.0, 1.0])


def test_svd_reconstruction(rng):
    a = rng.normal(size=(5, 3))
    res = svd(a)
    assert np.all(np.diff(res.s) <= 0)
    assert np.all(res.s >= 0)
    err = frobenius_norm(a - res.reconstruct())
    assert err <= 1e-10 * (1.0 + frobenius_norm(a))


def test_svd_rejects_nonfinite():
    with pytest.raises(InputError):
        svd(np.array([[1.0, np.nan], [0.0, 1.0]]))


def test_svd_transpose_same_singular_values(rng):
    a = rng.normal(size=(6, 4))
    np.testing.assert_allclose(svd(a).s, svd(a.T).s, atol=1e-12)


def test_pinv_full_rank_inverse():
    a = np.array([[2.0, 1.0], [1.0, 3.0]])
    np.testing.assert_allclose(pinv(a), np.linalg.inv(a), atol=1e-12)


def test_pinv_zero_matrix():
    np.testing.assert_allclose(pinv(np.zeros((3, 2))), np.zeros((2, 3)))


def test_pinv_rank_one_closed_form(rng):
    u = rng.normal(size=4)
    v = rng.normal(size=3)
    a = np.outer(u, v)
    expected = np.outer(v, u) / (np.dot(u, u) * np.dot(v, v))
    np.testing.assert_allclose(pinv(a), expected, atol=1e-12)


def test_pinv_penrose_identities(rng):
    a = rng.normal(size=(6, 4))
    ap = pinv(a)
    np.testing.assert_allclose(a @ ap @ a, a, atol=1e-8)
    np.testing.assert_allclose(ap @ a @ ap, ap, atol=1e-8)
    np.testing.assert_allclose((a @ ap).T, a @ ap, atol=1e-8)
    np.testing.assert_allclose((ap @ a).T, ap @ a, atol=1e-8)


def test_pinv_involution_well_conditioned(rng):
    a = rng.normal(size=(5, 4))
    np.testing.assert_allclose(pinv(pinv(a)), a, atol=1e-8)


def test_pinv_rcond_domain():
    with pytest.raises(InputError):
        pinv(np.eye(2), rcond=1.5)


def test_projection_orthonormal_columns(rng):
    q, _ = np.linalg.qr(rng.normal(size=(6, 3)))
    np.testing.assert_allclose(projection_matrix(q), q @ q.T, atol=1e-12)


def test_projection_mean():
    ones = np.ones((4, 1))
    np.testing.assert_allclose(projection_matrix(ones), np.full((4, 4), 0.25), atol=1e-12)


def test_projection_reproduces_range(rng):
    b = rng.normal(size=(8, 3))
    p = projection_matrix(b)
    np.testing.assert_allclose(p @ b, b, atol=1e-10)
    np.testing.assert_allclose(p, p.T, atol=1e-8)
    np.testing.assert_allclose(p @ p, p, atol=1e-8)
    assert abs(np.trace(p) - np.linalg.matrix_rank(b)) <= 1e-8


def test_sym_inv_sqrt_identity():
    np.testing.assert_allclose(sym_inv_sqrt(np.eye(3)), np.eye(3), atol=1e-12)


def test_sym_inv_sqrt_diagonal():
    np.testing.assert_allclose(
        sym_inv_sqrt(np.diag([4.0, 9.0])), np.diag([0.5, 1.0 / 3.0]), atol=1e-12
    )


def test_sym_inv_sqrt_defining_identity(rng):
    a = rng.normal(size=(5, 5))
    g = a.T @ a + 0.1 * np.eye(5)
    h = sym_inv_sqrt(g)
    np.testing.assert_allclose(h @ g @ h, np.eye(5), atol=1e-9)


def test_sym_inv_sqrt_rejects_asymmetric():
    g = np.array([[1.0, 0.5], [0.1, 1.0]])
    with pytest.raises(InputError):
        sym_inv_sqrt(g)


def test_frobenius_values():
    assert frobenius_norm(np.zeros((3, 3))) == 0.0
    assert frobenius_norm(np.eye(7)) == pytest.approx(np.sqrt(7))
    assert frobenius_norm(np.array([[1.0, 2.0], [3.0, 4.0]])) == pytest.approx(np.sqrt(30.0))


@given(st.integers(min_value=0, max_value=10_000))
def test_frobenius_orthogonal_invariance(seed):
    gen = np.random.default_rng(seed)
    a = gen.normal(size=(4, 4))
    q, _ = np.linalg.qr(gen.normal(size=(4, 4)))
    assert frobenius_norm(q @ a) == pytest.approx(frobenius_norm(a), abs=1e-10)
    assert frobenius_norm(a @ q) == pytest.approx(frobenius_norm(a), abs=1e-10)
