"""Hermite unitary polynomials and their link to the frozen Jacobi process at (-1/2, -1/2).

    H_d(z, t) = sum_k z^{d-k} (-1)^k C(d, k) exp(-t k (d-k) / 2)

has all roots on the unit circle for t > 0, and

    H_{2m}(z, 2t) = 4^m z^m chi_t((z + 1/z + 2) / 4)

where chi_t is the frozen Jacobi polynomial with r = s = -1/2 started at (x-1)^m.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln

from .frozen import JacobiParams, initial_expansion, propagate

__all__ = [
    "OffCircleError",
    "hermite_coeffs",
    "hermite_eval",
    "hermite_angles",
    "angle_flow_rhs",
    "szego_check",
    "szego_max_error",
]


class OffCircleError(RuntimeError):
    pass


def hermite_coeffs(d: int, t: float) -> np.ndarray:
    """Coefficients of H_d(., t) in descending powers of z (palindromic)."""
    if d < 0:
        raise ValueError("degree must be nonnegative")
    k = np.arange(d + 1)
    if d > 60:
        logc = gammaln(d + 1) - (gammaln(k + 1) + gammaln(d - k + 1))
        mag = np.exp(logc - t * (k * (d - k)) / 2)
    else:
        binom = np.array([math.comb(d, int(i)) for i in k], dtype=float)
        mag = binom * np.exp(-t * (k * (d - k)) / 2)
    return np.where(k % 2 == 0, mag, -mag)


def hermite_eval(d: int, t: float, z):
    """Horner evaluation of H_d(z, t)."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros_like(z)
    for a in hermite_coeffs(d, t):
        out = out * z + a
    return out if out.ndim else complex(out)


def _real_part_fn(d, t):
    """``R(theta) = e^{-i d theta / 2} H_d(e^{i theta}, t)``, which is real."""
    c = hermite_coeffs(d, t)
    freq = d / 2 - np.arange(d + 1)

    def R(theta):
        return float(np.dot(c, np.cos(freq * theta)))

    return R, c, freq


def _angles_bisection(d, t, n_grid):
    R, c, freq = _real_part_fn(d, t)
    # offset grid so that no node sits on theta = 0 or +-pi
    th = np.linspace(-math.pi, math.pi, n_grid + 1)[:-1] + math.pi / n_grid
    # same code path as R so grid signs and bracket signs agree
    vals = np.array([R(x) for x in th])
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    # the wrap-around interval through pi never holds a root since H(-1) != 0
    return np.array([brentq(R, th[i], th[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps) for i in idx])


def _angles_mp(d, t):
    # a cluster of width ~sqrt(t) makes the roots ill-conditioned like t^{d/2}
    dps = 30 + int(d * max(1.0, 0.5 * math.log10(1 / t)))
    for _ in range(3):
        with mpmath.workdps(dps):
            coeffs = [
                (-1) ** k * mpmath.binomial(d, k) * mpmath.exp(-mpmath.mpf(t) * k * (d - k) / 2)
                for k in range(d + 1)
            ]
            try:
                roots = mpmath.polyroots(coeffs, maxsteps=200, extraprec=dps)
            except mpmath.libmp.libhyper.NoConvergence:
                dps *= 2
                continue
            ang = np.array([float(mpmath.arg(z)) for z in roots])
            mods = np.array([float(abs(z)) for z in roots])
        if np.max(np.abs(mods - 1)) <= 1e-8:
            return np.sort(ang)
        dps *= 2
    raise OffCircleError(f"root off the unit circle for d={d}, t={t}")


def hermite_angles(d: int, t: float, n_grid: int = None) -> np.ndarray:
    """Arguments of the roots of H_d(., t), sorted in (-pi, pi].

    Sign changes of the real function ``R`` on a grid, refined by Brent's
    method.  When clustering hides some sign changes (small t), the roots are
    recomputed from the coefficients in extended precision.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if d < 1:
        raise ValueError("degree must be positive")
    if t == 0:
        return np.zeros(d)
    if n_grid is None:
        n_grid = max(4096, 64 * d)
    try:
        ang = _angles_bisection(d, t, n_grid)
    except ValueError:
        ang = np.empty(0)
    if ang.size != d:
        ang = _angles_mp(d, t)
    return ang


def angle_flow_rhs(angles) -> np.ndarray:
    """``d theta_j/dt = 1/2 sum_{k != j} cot((theta_j - theta_k)/2)``."""
    a = np.asarray(angles, dtype=float)
    diff = (a[:, None] - a[None, :]) / 2
    s = np.sin(diff)
    np.fill_diagonal(s, 1.0)
    if np.any(np.abs(s) < 1e-14):
        raise ValueError("coincident angles")
    cot = np.cos(diff) / s
    np.fill_diagonal(cot, 0.0)
    return 0.5 * cot.sum(axis=1)


def szego_check(m: int, t: float, z):
    """Return ``(H_{2m}(z, 2t), 4^m z^m chi_t((z + 1/z + 2)/4))``.

    On the unit circle the argument of chi_t is ``cos^2(arg z / 2)`` in [0, 1],
    where chi_t is summed in the Jacobi basis; the monomial form cancels badly
    near the root cluster.  Off the circle the monomial form is used.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise ZeroDivisionError("z = 0 is not allowed")
    exp_t = propagate(initial_expansion(JacobiParams(-0.5, -0.5, m)), t)
    lhs = hermite_eval(2 * m, 2 * t, z)
    on_circle = np.abs(np.abs(z) - 1) < 1e-14
    val = np.empty_like(z)
    if np.any(on_circle):
        val[on_circle] = exp_t(np.cos(np.angle(z[on_circle]) / 2) ** 2)
    if np.any(~on_circle):
        x = (z[~on_circle] + 1 / z[~on_circle] + 2) / 4
        acc = np.zeros_like(x)
        for a in exp_t.to_monic().coeffs_desc():
            acc = acc * x + a
        val[~on_circle] = acc
    rhs = 4.0**m * z**m * val
    return lhs, rhs


def szego_max_error(m: int, t: float, samples: int = 100, seed: int = 0) -> float:
    """Max relative gap of the identity at ``samples`` uniform random unit-circle points."""
    theta = np.random.default_rng(seed).uniform(0, 2 * math.pi, samples)
    z = np.exp(1j * theta)
    lhs, rhs = szego_check(m, t, z)
    return float(np.max(np.abs(lhs - rhs) / np.abs(lhs)))
