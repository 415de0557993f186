import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kreintrace import linalg
from kreintrace import ssf_selfadjoint as sa
from kreintrace.errors import NotHermitian


def test_identical_pair_is_zero(rng):
    A = linalg.random_hermitian(5, rng)
    xi = sa.ssf_counting_sa(A, A)
    assert len(xi.values) == 0 and xi.integral() == 0


def test_scalar_closed_form():
    xi = sa.ssf_counting_sa(np.array([[0.2]]), np.array([[0.7]]))
    np.testing.assert_array_equal(xi.breakpoints, [0.2, 0.7])
    np.testing.assert_array_equal(xi.values, [-1.0])
    assert xi.integral() == pytest.approx(0.2 - 0.7)
    assert xi(0.1) == 0 and xi(0.5) == -1 and xi(0.7) == 0


def test_two_by_two_breakpoints():
    xi = sa.ssf_counting_sa(np.diag([-1.0, 2.0]), np.diag([0.5, 3.0]))
    assert len(xi.breakpoints) == 4
    assert set(xi.values) <= {-2, -1, 0, 1, 2}


def test_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        sa.ssf_counting_sa(np.array([[0, 1], [0, 0]]), np.eye(2))


@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(1, 32))
@settings(max_examples=40, deadline=None)
def test_sign_and_support(seed, dim):
    rng = np.random.default_rng(seed)
    A, B = linalg.random_hermitian(dim, rng), linalg.random_hermitian(dim, rng)
    xi = sa.ssf_counting_sa(A, B)
    assert xi.integral() == pytest.approx(np.trace(A - B).real, abs=1e-10)
    spectra = np.concatenate([np.linalg.eigvalsh(A), np.linalg.eigvalsh(B)])
    outside = np.array([spectra.min() - 0.1, spectra.max() + 0.1])
    assert np.all(xi(outside) == 0)
    np.testing.assert_array_equal(xi.values, np.round(xi.values))


def test_verify_linear_and_identical(rng):
    A, B = linalg.random_hermitian(6, rng), linalg.random_hermitian(6, rng)
    r = sa.verify_trace_formula_sa(A, B, sa.polynomial([0, 1]))
    assert r.lhs == pytest.approx(np.trace(A - B), abs=1e-12)
    assert r.rhs == pytest.approx(np.trace(A - B), abs=1e-12)
    r0 = sa.verify_trace_formula_sa(A, A, sa.polynomial([1, 2, 3]))
    assert r0.lhs == 0 and r0.rhs == 0 and r0.passed


def test_verify_cubic(rng):
    A, B = linalg.random_hermitian(8, rng), linalg.random_hermitian(8, rng)
    r = sa.verify_trace_formula_sa(A, B, sa.polynomial([0, 0, 0, 1]))
    assert r.passed and r.residual <= 1e-8


@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(1, 32), degree=st.integers(0, 12))
@settings(max_examples=30, deadline=None)
def test_verify_property(seed, dim, degree):
    rng = np.random.default_rng(seed)
    A, B = linalg.random_hermitian(dim, rng), linalg.random_hermitian(dim, rng)
    assert sa.verify_trace_formula_sa(A, B, sa.polynomial(rng.uniform(-1, 1, degree + 1))).passed


def test_real_divided_difference(rng):
    p = sa.polynomial(rng.normal(size=6))
    x, y = rng.normal(size=4), rng.normal(size=5)
    quotient = (p(x)[:, None] - p(y)[None, :]) / (x[:, None] - y[None, :])
    np.testing.assert_allclose(sa.real_divided_difference(p, x, y), quotient, rtol=1e-9)
    np.testing.assert_allclose(np.diagonal(sa.real_divided_difference(p, x, x)), p.deriv()(x), rtol=1e-12)


def test_derivative_zero_direction(rng):
    A = linalg.random_hermitian(4, rng)
    r = sa.derivative_check_sa(A, np.zeros((4, 4)), sa.polynomial([1, 2, 3]), [1e-2, 1e-3])
    assert r.meta["err"] == [0.0, 0.0] and r.passed


def test_derivative_linear_function(rng):
    A, K = linalg.random_hermitian(4, rng), linalg.random_hermitian(4, rng)
    r = sa.derivative_check_sa(A, K, sa.polynomial([0, 1]), [1e-2, 1e-3])
    assert max(r.meta["err"]) <= 1e-10 and r.passed


def test_derivative_square_expansion(rng):
    A, K = linalg.random_hermitian(6, rng), linalg.random_hermitian(6, rng, scale=0.3)
    ts = [1e-2, 1e-3, 1e-4]
    r = sa.derivative_check_sa(A, K, sa.polynomial([0, 0, 1]), ts)
    for t, err in zip(ts, r.meta["err"]):
        assert err == pytest.approx(t * np.linalg.norm(K @ K), rel=1e-6)
    assert r.meta["order"] >= 0.9 and r.passed
