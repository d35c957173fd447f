from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nilcurv.pseudolinalg import (
    DegenerateMetric,
    IrrationalNorm,
    MetricTensor,
    Subspace,
    adjoint,
    as_array,
    default_tol,
    det,
    exact_sqrt,
    inertia,
    inv,
    is_nondegenerate,
    nullspace,
    orthogonal_complement,
    pseudo_orthonormalize,
    rank,
    rref,
    signature,
)

small_ints = st.integers(-4, 4)


def int_matrix(rows, cols):
    return st.lists(st.lists(small_ints, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


def test_signature_of_lorentzian_diagonal():
    assert signature(MetricTensor.diag([-1, 1, 1])) == (1, 2)
    assert signature(MetricTensor.diag([-1, 1, 1], exact=True)) == (1, 2)


def test_signature_of_hyperbolic_plane_exact():
    # zero diagonal forces the off-diagonal pivot branch of the congruence
    g = as_array([[0, 1], [1, 0]], True)
    assert inertia(g) == (1, 1)


def test_degenerate_metric_rejected():
    with pytest.raises(DegenerateMetric):
        MetricTensor(np.array([[1.0, 1.0], [1.0, 1.0]]))
    with pytest.raises(DegenerateMetric):
        MetricTensor(as_array([[1, 2], [2, 4]], True))


def test_anisotropic_metric_accepted():
    # widely spread but well-conditioned diagonal entries must not be flagged
    m = MetricTensor.diag([1, 1, 1, -25, 9, 16, 625])
    assert signature(m) == (1, 6)


def test_asymmetric_metric_rejected():
    with pytest.raises(ValueError, match="symmetric"):
        MetricTensor(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_exact_sqrt():
    assert exact_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert exact_sqrt(Fraction(2)) is None
    assert exact_sqrt(Fraction(0)) == 0


def test_nullspace_exact_example():
    ker = nullspace(as_array([[1, 2], [2, 4]], True))
    assert ker.shape == (1, 2)
    assert list(ker[0]) == [Fraction(-2), Fraction(1)]


def test_rref_pivots():
    r, piv = rref(as_array([[0, 2, 4], [1, 1, 1]], True))
    assert piv == [0, 1]
    assert list(r[1]) == [0, 1, 2]


@given(int_matrix(3, 4))
def test_rank_nullity_exact(rows):
    m = as_array(rows, True)
    ker = nullspace(m)
    assert rank(m) + ker.shape[0] == 4
    if ker.shape[0]:
        assert all(x == 0 for x in (m @ ker.T).flat)


@given(int_matrix(4, 4))
def test_rank_float_matches_exact(rows):
    m = as_array(rows, True)
    assert rank(np.asarray(m, dtype=float)) == rank(m)


@given(st.lists(st.sampled_from([-3, -1, 1, 2, 5]), min_size=2, max_size=5), st.integers(0, 2**31))
def test_inertia_invariant_under_congruence(diag, seed):
    rng = np.random.default_rng(seed)
    n = len(diag)
    g = as_array(np.diag(diag), True)
    t = as_array(np.eye(n, dtype=int) + np.triu(rng.integers(-2, 3, size=(n, n)), 1), True)
    neg = sum(d < 0 for d in diag)
    assert inertia(t.T @ g @ t) == (neg, n - neg)
    assert inertia(np.asarray(t.T @ g @ t, dtype=float)) == (neg, n - neg)


def test_inverse_and_determinant_exact():
    m = as_array([[2, 1], [1, 1]], True)
    assert det(m) == 1
    assert all(x == y for x, y in zip((inv(m) @ m).flat, np.eye(2).flat))


def test_null_line_is_degenerate():
    m = MetricTensor.diag([-1, 1], exact=True)
    s = Subspace.span([[1, 1]], 2, True)
    assert not is_nondegenerate(s, m)
    comp = orthogonal_complement(s, m)
    assert comp.degenerate and comp.dim == 1


def test_orthogonal_complement_keeps_orthogonal_coordinates():
    m = MetricTensor.diag([-1, 1, 1], exact=True)
    s = Subspace.span([[0, 0, 1]], 3, True)
    comp = orthogonal_complement(s, m)
    assert comp.dim == 2
    assert comp.contains([1, 0, 0]) and comp.contains([0, 1, 0])


def test_pseudo_orthonormalize_puts_timelike_first():
    m = MetricTensor.diag([1, -1, 1], exact=True)
    whole = Subspace(as_array(np.eye(3, dtype=int), True), 3)
    basis, signs = pseudo_orthonormalize(whole, m)
    assert signs == [-1, 1, 1]
    gram = basis @ m.g @ basis.T
    assert all(gram[i, j] == (signs[i] if i == j else 0) for i in range(3) for j in range(3))


def test_pseudo_orthonormalize_null_basis():
    # span of two null vectors of a Lorentzian plane
    m = MetricTensor.diag([-1, 1])
    s = Subspace(np.array([[1.0, 1.0], [1.0, -1.0]]), 2)
    basis, signs = pseudo_orthonormalize(s, m)
    assert sorted(signs) == [-1, 1]
    assert np.allclose(basis @ m.g @ basis.T, np.diag(signs))


def test_pseudo_orthonormalize_irrational_norm_exact():
    m = MetricTensor.diag([2, 1], exact=True)
    whole = Subspace(as_array(np.eye(2, dtype=int), True), 2)
    with pytest.raises(IrrationalNorm):
        pseudo_orthonormalize(whole, m)
    basis, signs = pseudo_orthonormalize(whole, m, normalize=False)
    assert signs == [1, 1]


def test_adjoint_is_metric_transpose():
    m = MetricTensor.diag([-1, 1, 2], exact=True)
    f = as_array([[1, 2, 0], [0, 1, 3], [1, 0, 1]], True)
    fs = adjoint(f, m)
    u, v = as_array([1, 2, 3], True), as_array([3, -1, 1], True)
    assert m.inner(f @ u, v) == m.inner(u, fs @ v)


def test_default_tolerance_env(monkeypatch):
    monkeypatch.setenv("NILCURV_TOL", "1e-6")
    assert default_tol() == 1e-6
    monkeypatch.delenv("NILCURV_TOL")
    assert default_tol() == 1e-9
