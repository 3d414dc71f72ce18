import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import eval_jacobi, roots_jacobi

from frozenjacobi.special_fn import (
    JacobiWeightParams,
    jacobi_deriv,
    jacobi_eval,
    jacobi_leading_coeff,
    jacobi_monomial_coeffs,
    jacobi_operator_apply,
    jacobi_zeros,
    log_gamma_ratio,
)

SAMPLED = [(0.0, 0.0), (-0.5, -0.5), (1.3, 0.7)]


def hyp_oracle(r, s, j, x):
    """Terminating 2F1 summed term by term in extended precision."""
    with mpmath.workdps(40):
        x = mpmath.mpf(x)
        pre = mpmath.rf(r + 1, j) / mpmath.factorial(j)
        total = mpmath.fsum(
            mpmath.rf(-j, k) * mpmath.rf(r + s + j + 1, k) / (mpmath.rf(r + 1, k) * mpmath.factorial(k)) * x**k
            for k in range(j + 1)
        )
        return float(pre * total)


def test_weight_validation():
    with pytest.raises(ValueError):
        JacobiWeightParams(-1.0, 0.0)
    with pytest.raises(ValueError):
        JacobiWeightParams(0.0, -1.5)


def test_eval_examples():
    w = JacobiWeightParams(0.0, 0.0)
    assert jacobi_eval(w, 0, 0.3) == 1.0
    assert jacobi_eval(w, 1, 0.5) == 0.0
    w = JacobiWeightParams(-0.5, -0.5)
    # three hypergeometric terms at x = 1: (1/2)_2/2! * (1 - 2*... ) summed directly
    r, s = -0.5, -0.5
    terms = [1.0, (-2) * (r + s + 3) / (r + 1), (-2) * (-1) * (r + s + 3) * (r + s + 4) / ((r + 1) * (r + 2) * 2)]
    direct = (r + 1) * (r + 2) / 2 * sum(terms)
    assert jacobi_eval(w, 2, 1.0) == pytest.approx(direct, rel=1e-14)


@pytest.mark.parametrize("r,s", SAMPLED)
@pytest.mark.parametrize("j", range(11))
def test_recurrence_matches_hypergeometric(r, s, j):
    w = JacobiWeightParams(r, s)
    x = np.linspace(0, 1, 21)
    ours = jacobi_eval(w, j, x)
    ref = np.array([hyp_oracle(r, s, j, xx) for xx in x])
    scale = np.max(np.abs(ref))
    assert np.max(np.abs(ours - ref)) <= 1e-10 * scale


@pytest.mark.parametrize("r,s", SAMPLED)
def test_eval_against_scipy(r, s):
    w = JacobiWeightParams(r, s)
    x = np.linspace(0, 1, 17)
    for j in range(15):
        np.testing.assert_allclose(jacobi_eval(w, j, x), eval_jacobi(j, r, s, 1 - 2 * x), rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("r,s", SAMPLED)
def test_derivative_by_difference(r, s):
    w = JacobiWeightParams(r, s)
    x = np.linspace(0.05, 0.95, 9)
    h = 1e-6
    for j in range(8):
        fd = (jacobi_eval(w, j, x + h) - jacobi_eval(w, j, x - h)) / (2 * h)
        np.testing.assert_allclose(jacobi_deriv(w, j, x), fd, rtol=1e-6, atol=1e-6)


def test_leading_coeff_examples():
    for w in [JacobiWeightParams(0.0, 0.0), JacobiWeightParams(1.3, 0.7)]:
        assert jacobi_leading_coeff(w, 0) == 1.0
    w = JacobiWeightParams(0.0, 0.0)
    assert jacobi_leading_coeff(w, 1) == pytest.approx(1.0, rel=1e-15)
    assert jacobi_leading_coeff(w, 3) == pytest.approx(4 * 5 * 6 / (6 * 8), rel=1e-14)
    top = jacobi_monomial_coeffs(w, 3)[-1]
    assert top / (-2) ** 3 == pytest.approx(jacobi_leading_coeff(w, 3), rel=1e-14)


@pytest.mark.parametrize("r,s", SAMPLED)
def test_leading_coeff_matches_expansion(r, s):
    w = JacobiWeightParams(r, s)
    for j in range(1, 12):
        top = jacobi_monomial_coeffs(w, j)[-1]
        assert top == pytest.approx((-2) ** j * jacobi_leading_coeff(w, j), rel=1e-12)


@pytest.mark.parametrize("r,s", SAMPLED)
def test_monomial_coeffs_evaluate(r, s):
    w = JacobiWeightParams(r, s)
    x = np.linspace(0, 1, 11)
    for j in range(10):
        c = jacobi_monomial_coeffs(w, j)
        np.testing.assert_allclose(np.polynomial.polynomial.polyval(x, c), jacobi_eval(w, j, x), rtol=1e-10, atol=1e-10)


def test_zeros_examples():
    w = JacobiWeightParams(0.0, 0.0)
    np.testing.assert_allclose(jacobi_zeros(w, 1), [0.5], atol=1e-16)
    z2 = jacobi_zeros(w, 2)
    assert z2[0] + z2[1] == pytest.approx(1.0, abs=1e-15)
    # brute-force polynomial roots of the expanded coefficients
    w = JacobiWeightParams(-0.5, -0.5)
    brute = np.sort(np.roots(jacobi_monomial_coeffs(w, 3)[::-1]).real)
    np.testing.assert_allclose(jacobi_zeros(w, 3), brute, atol=1e-13)
    # Chebyshev-type nodes: cos^2 of equispaced half angles
    cheb = np.sort(np.cos((2 * np.arange(3) + 1) * np.pi / 12) ** 2)
    np.testing.assert_allclose(jacobi_zeros(w, 3), cheb, atol=1e-14)


@pytest.mark.parametrize("r,s", SAMPLED)
def test_zeros_against_scipy_and_residual(r, s):
    w = JacobiWeightParams(r, s)
    for j in (1, 5, 20, 60):
        x = jacobi_zeros(w, j)
        u, _ = roots_jacobi(j, r, s)
        np.testing.assert_allclose(x, np.sort((1 - u) / 2), atol=1e-13)
        der = np.abs(jacobi_deriv(w, j, x))
        assert np.all(np.abs(jacobi_eval(w, j, x)) <= 1e-12 * np.maximum(der, 1.0) * 10)


def test_zeros_reject_degree_zero():
    with pytest.raises(ValueError):
        jacobi_zeros(JacobiWeightParams(0, 0), 0)


params = st.tuples(st.floats(-0.95, 4.0), st.floats(-0.95, 4.0))


@given(params, st.integers(1, 25))
def test_zeros_bracket_and_interlace(rs, j):
    w = JacobiWeightParams(*rs)
    a = jacobi_zeros(w, j)
    b = jacobi_zeros(w, j + 1)
    assert np.all((a > 0) & (a < 1)) and np.all(np.diff(a) > 0)
    # each zero of degree j lies strictly between consecutive zeros of degree j+1
    assert np.all(b[:-1] < a) and np.all(a < b[1:])


@given(st.floats(-0.95, 4.0), st.integers(1, 30))
def test_zeros_symmetric_when_r_equals_s(r, j):
    x = jacobi_zeros(JacobiWeightParams(r, r), j)
    np.testing.assert_allclose(x, 1 - x[::-1], atol=1e-13)


def test_operator_examples():
    w = JacobiWeightParams(0.0, 0.0)
    np.testing.assert_array_equal(jacobi_operator_apply(w, [3.0]), [0.0])
    np.testing.assert_allclose(jacobi_operator_apply(w, [0.0, 1.0]), [1.0, -2.0])


@pytest.mark.parametrize("r,s", SAMPLED)
@pytest.mark.parametrize("j", range(13))
def test_eigenrelation(r, s, j):
    w = JacobiWeightParams(r, s)
    c = jacobi_monomial_coeffs(w, j)
    lhs = jacobi_operator_apply(w, c)
    rhs = -j * (j + r + s + 1) * c
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * max(np.max(np.abs(rhs)), 1.0)


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=8), st.floats(-0.9, 3), st.floats(-0.9, 3))
def test_operator_matches_symbolic_derivatives(coeffs, r, s):
    w = JacobiWeightParams(r, s)
    P = np.polynomial.Polynomial(coeffs)
    x = np.polynomial.Polynomial([0, 1])
    ref = x * (1 - x) * P.deriv(2) + ((r + 1) - (r + s + 2) * x) * P.deriv()
    got = jacobi_operator_apply(w, coeffs)
    refc = np.zeros(len(coeffs))
    refc[: ref.coef.size] = ref.coef[: len(coeffs)]
    np.testing.assert_allclose(got, refc, atol=1e-9)


def test_log_gamma_ratio():
    assert log_gamma_ratio([5.0], [3.0]) == pytest.approx(math.log(12.0))
    with pytest.raises(ValueError):
        log_gamma_ratio([0.0], [1.0])
