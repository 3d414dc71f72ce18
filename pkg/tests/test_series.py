from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frozenjacobi.series import PowerSeries

coef = st.floats(-2, 2, allow_nan=False)


def test_geometric_reciprocal():
    f = PowerSeries([1.0, -1.0], 10)
    np.testing.assert_allclose(f.reciprocal().coeffs, np.ones(11))


def test_reversion_point_mass():
    # psi = a z / (1 - a z) has inverse z / (a (1 + z))
    a, L = 0.7, 12
    psi = PowerSeries(np.concatenate([[0.0], a ** np.arange(1, L + 1)]))
    eta = psi.reversion()
    expected = np.concatenate([[0.0], (-1.0) ** np.arange(L) / a])
    np.testing.assert_allclose(eta.coeffs, expected, rtol=1e-13, atol=1e-13)


def exact_reversion(c):
    """Coefficient-by-coefficient solve of f(g(z)) = z in rationals."""
    L = len(c) - 1
    c = [Fraction(x) for x in c]
    g = [Fraction(0)] * (L + 1)
    g[1] = 1 / c[1]

    def mul(a, b):
        out = [Fraction(0)] * (L + 1)
        for i, x in enumerate(a):
            if x:
                for j in range(L + 1 - i):
                    out[i + j] += x * b[j]
        return out

    for n in range(2, L + 1):
        p, tot = [Fraction(1)] + [Fraction(0)] * L, Fraction(0)
        for k in range(1, L + 1):
            p = mul(p, g)
            tot += c[k] * p[n]
        g[n] = -tot / c[1]
    return np.array([float(x) for x in g])


# a_1 z (1 + sum u_k (rho z)^{k-1}): random series analytic on a disc of radius 1/rho
unit_series = st.tuples(st.floats(0.2, 5.0), st.lists(st.floats(-1, 1), min_size=15, max_size=15))


def _series(a1, u, rho):
    return np.concatenate([[0.0, a1], a1 * np.asarray(u) * rho ** np.arange(1, 16)])


@settings(max_examples=15)
@given(unit_series)
def test_reversion_matches_exact_rationals(data):
    c = _series(*data, rho=1.0)
    g = PowerSeries(c).reversion().coeffs
    ge = exact_reversion(c)
    assert np.max(np.abs(g - ge)) <= 1e-13 * np.max(np.abs(ge))


@given(unit_series)
def test_reversion_round_trip(data):
    c = _series(*data, rho=0.3)
    f = PowerSeries(c)
    g = f.reversion()
    resid = f.compose(g).coeffs - PowerSeries.identity(16).coeffs
    assert np.max(np.abs(resid)) <= 1e-12 * max(1.0, np.max(np.abs(g.coeffs)))
    assert np.max(np.abs(g.reversion().coeffs - c)) <= 1e-12 * np.max(np.abs(c))


@given(st.lists(coef, min_size=8, max_size=8), st.lists(coef, min_size=8, max_size=8), st.floats(-0.3, 0.3))
def test_arithmetic_matches_polynomials(a, b, z):
    f, g = PowerSeries(a), PowerSeries(b)
    trunc = lambda c: np.polynomial.polynomial.polyval(z, np.asarray(c)[:8])
    assert (f * g)(z) == pytest.approx(trunc(np.convolve(a, b)), abs=1e-12)
    assert (f + g)(z) == pytest.approx(trunc(np.add(a, b)), abs=1e-12)


@given(st.lists(coef, min_size=6, max_size=6), st.lists(coef, min_size=5, max_size=5))
def test_compose_matches_substitution(a, b):
    f = PowerSeries(a)
    g = PowerSeries(np.concatenate([[0.0], b]))
    z = 0.01
    # truncation drops O(z^6) terms with coefficients at most ~1e4
    assert f.compose(g)(z) == pytest.approx(f(g(z)), abs=1e-7)


def test_compose_requires_zero_constant():
    with pytest.raises(ValueError):
        PowerSeries([1.0, 1.0]).compose(PowerSeries([1.0, 1.0]))


def test_reversion_preconditions():
    with pytest.raises(ValueError):
        PowerSeries([1.0, 1.0]).reversion()
    with pytest.raises(ValueError):
        PowerSeries([0.0, 0.0, 1.0]).reversion()


def test_reciprocal_requires_unit():
    with pytest.raises(ZeroDivisionError):
        PowerSeries([0.0, 1.0]).reciprocal()


def test_complex_coefficients():
    f = PowerSeries([0, 1 + 1j, 0.5j])
    g = f.reversion()
    np.testing.assert_allclose(f.compose(g).coeffs, [0, 1, 0], atol=1e-14)
