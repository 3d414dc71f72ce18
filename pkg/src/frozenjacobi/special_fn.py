"""Classical Jacobi polynomials on [0, 1].

All polynomials here are the shifted family

    Q_j^{(r,s)}(x) = P_j^{(r,s)}(1 - 2x),

where ``P_j^{(r,s)}`` is the usual Jacobi polynomial on [-1, 1].  They are
the eigenpolynomials of

    L^{(r,s)} f = x(1-x) f'' + [(r+1) - (r+s+2)x] f'

with eigenvalue ``-j(j+r+s+1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln

__all__ = [
    "JacobiWeightParams",
    "jacobi_eval",
    "jacobi_deriv",
    "jacobi_monomial_coeffs",
    "jacobi_leading_coeff",
    "jacobi_zeros",
    "jacobi_operator_apply",
    "log_pochhammer",
    "log_gamma_ratio",
]


@dataclass(frozen=True)
class JacobiWeightParams:
    """Exponents of the beta weight ``u^r (1-u)^s`` on [0, 1]."""

    r: float
    s: float

    def __post_init__(self):
        if not (self.r > -1 and self.s > -1):
            raise ValueError(f"need r > -1 and s > -1, got r={self.r}, s={self.s}")


def log_pochhammer(a, n):
    """``log (a)_n`` for ``a > 0``."""
    return gammaln(np.asarray(a, dtype=float) + n) - gammaln(a)


def log_gamma_ratio(num, den):
    """``log prod Gamma(num_i) / prod Gamma(den_i)``, all arguments positive.

    Raises if any argument is nonpositive; every ratio used in this package
    has positive arguments once the removable ``j = 0`` case is handled by
    the caller.
    """
    num = np.atleast_1d(np.asarray(num, dtype=float))
    den = np.atleast_1d(np.asarray(den, dtype=float))
    if np.any(num <= 0) or np.any(den <= 0):
        raise ValueError("log_gamma_ratio needs positive arguments")
    return float(np.sum(gammaln(num)) - np.sum(gammaln(den)))


def _p_recurrence(j: int, a: float, b: float, u):
    """P_j^{(a,b)}(u) by the standard three-term recurrence."""
    u = np.asarray(u, dtype=float)
    p0 = np.ones_like(u)
    if j == 0:
        return p0
    p1 = (a + 1) + (a + b + 2) * (u - 1) / 2
    for n in range(2, j + 1):
        c = 2 * n + a + b
        a1 = 2 * n * (n + a + b) * (c - 2)
        a2 = (c - 1) * (c * (c - 2) * u + a * a - b * b)
        a3 = 2 * (n + a - 1) * (n + b - 1) * c
        p0, p1 = p1, (a2 * p1 - a3 * p0) / a1
    return p1


def jacobi_eval(w: JacobiWeightParams, j: int, x):
    """Evaluate Q_j^{(r,s)} at ``x`` (scalar or array)."""
    if j < 0:
        raise ValueError("degree must be nonnegative")
    x = np.asarray(x, dtype=float)
    out = _p_recurrence(j, w.r, w.s, 1 - 2 * x)
    return float(out) if out.ndim == 0 else out


def jacobi_deriv(w: JacobiWeightParams, j: int, x):
    """d/dx Q_j^{(r,s)}(x) = -(j+r+s+1) P_{j-1}^{(r+1,s+1)}(1-2x)."""
    x = np.asarray(x, dtype=float)
    if j == 0:
        out = np.zeros_like(x)
    else:
        out = -(j + w.r + w.s + 1) * _p_recurrence(j - 1, w.r + 1, w.s + 1, 1 - 2 * x)
    return float(out) if out.ndim == 0 else out


def jacobi_monomial_coeffs(w: JacobiWeightParams, j: int) -> np.ndarray:
    """Coefficients of Q_j^{(r,s)} in ``1, x, ..., x^j`` (ascending).

    Built term by term from the terminating hypergeometric series; exact up
    to rounding but with alternating signs, so only suited to small ``j``.
    """
    r, s = w.r, w.s
    coeffs = np.empty(j + 1)
    # (r+1)_j / j!
    term = math.exp(float(log_pochhammer(r + 1, j)) - math.lgamma(j + 1))
    coeffs[0] = term
    for k in range(j):
        term *= (k - j) * (r + s + j + 1 + k) / ((r + 1 + k) * (k + 1))
        coeffs[k + 1] = term
    return coeffs


def jacobi_leading_coeff(w: JacobiWeightParams, j: int) -> float:
    """Leading coefficient k_j = (r+s+1+j)_j / (j! 2^j) of P_j^{(r,s)} on [-1, 1].

    The x^j coefficient of Q_j^{(r,s)} is ``(-2)^j * k_j``.
    """
    if j < 0:
        raise ValueError("degree must be nonnegative")
    if j == 0:
        return 1.0
    a = w.r + w.s + 1 + j
    return math.exp(float(log_pochhammer(a, j)) - math.lgamma(j + 1) - j * math.log(2.0))


def _jacobi_matrix(j: int, a: float, b: float):
    """Symmetric tridiagonal matrix of the orthonormal P^{(a,b)} recurrence."""
    ab = a + b
    k = np.arange(j, dtype=float)
    c = 2 * k + ab
    with np.errstate(divide="ignore", invalid="ignore"):
        diag = (b * b - a * a) / (c * (c + 2))
    # k = 0 is 0/0 when a + b = 0
    diag[0] = (b - a) / (ab + 2)
    k = k[1:]
    c = c[1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        off2 = 4 * k * (k + a) * (k + b) * (k + ab) / (c * c * (c + 1) * (c - 1))
    if j > 1:
        # k = 1: the factor (k + a + b) cancels (c - 1)
        off2[0] = 4 * (1 + a) * (1 + b) / ((2 + ab) ** 2 * (3 + ab))
    return diag, np.sqrt(off2)


def jacobi_zeros(w: JacobiWeightParams, j: int) -> np.ndarray:
    """The ``j`` zeros of Q_j^{(r,s)} in (0, 1), increasing.

    Eigenvalues of the Jacobi matrix (Golub-Welsch) mapped by ``x = (1-u)/2``,
    followed by one Newton step on the three-term recurrence.
    """
    if j < 1:
        raise ValueError("need degree >= 1")
    diag, off = _jacobi_matrix(j, w.r, w.s)
    try:
        u = eigh_tridiagonal(diag, off, eigvals_only=True)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"Jacobi matrix eigensolve failed for j={j}, {w}") from exc
    x = np.sort((1 - u) / 2)
    val = jacobi_eval(w, j, x)
    der = jacobi_deriv(w, j, x)
    step = np.where(der != 0, val / np.where(der != 0, der, 1.0), 0.0)
    gaps = np.diff(np.concatenate(([0.0], x, [1.0])))
    # only accept the polish if it stays inside its bracket
    ok = np.abs(step) < 0.5 * np.minimum(gaps[:-1], gaps[1:])
    x = np.where(ok, x - step, x)
    if np.any(x <= 0) or np.any(x >= 1) or np.any(np.diff(x) <= 0):
        raise RuntimeError(f"zeros left (0,1) or lost order for j={j}, {w}")
    return x


def jacobi_operator_apply(w: JacobiWeightParams, coeffs) -> np.ndarray:
    """Apply L^{(r,s)} to a polynomial given by ascending monomial coefficients.

    The x^k coefficient of the image is
    ``-k(k+r+s+1) a_k + (k+1)(k+r+1) a_{k+1}``; degree is preserved.
    """
    a = np.asarray(coeffs, dtype=float)
    k = np.arange(a.size, dtype=float)
    out = -k * (k + w.r + w.s + 1) * a
    out[:-1] += (k[:-1] + 1) * (k[:-1] + w.r + 1) * a[1:]
    return out
