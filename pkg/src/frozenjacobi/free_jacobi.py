"""The free Jacobi process: moments, S transform, characteristic curves.

Conventions: ``M_t`` is the moment generating function, ``psi_t = M_t - 1``,
``eta_t`` its local inverse at 0 and ``S_t(z) = (1+z)/z * eta_t(z)``.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .frozen import JacobiParams, MonicPoly
from .ode import rk4_integrate
from .series import PowerSeries

__all__ = [
    "FreeParams",
    "MomentSeq",
    "PoleError",
    "KappaConvergenceError",
    "moment_rhs",
    "moment_flow",
    "frozen_moment_rhs",
    "empirical_moments",
    "esf_power_moments",
    "stationary_s",
    "stationary_t",
    "xi",
    "xi_prime",
    "kappa",
    "kappa_prime",
    "kappa_inv",
    "s_one_half",
    "t_one_half",
    "s_from_moments",
    "pde_s_residual",
    "t_pde_residual",
]


class PoleError(ZeroDivisionError):
    pass


class KappaConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class FreeParams:
    """``lam = lim m/p`` and ``theta = lim p/d``; ``lam*theta`` is the rank of P."""

    lam: float
    theta: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lambda must be positive")
        if not 0 < self.theta <= 1:
            raise ValueError("theta must lie in (0, 1]")
        if not 0 < self.lam * self.theta <= 1 + 1e-15:
            raise ValueError("need lambda*theta in (0, 1]")

    @classmethod
    def from_jacobi(cls, params: JacobiParams):
        """Finite-m values ``m/p`` and ``p/d``."""
        return cls(params.m / params.p, params.p / params.d)


@dataclass
class MomentSeq:
    """Moments ``m_0 = 1, m_1, ..., m_L`` at a time ``t``."""

    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.size < 2:
            raise ValueError("need horizon L >= 1")
        if abs(self.values[0] - 1.0) > 1e-14:
            raise ValueError("m_0 must be 1")

    @property
    def horizon(self) -> int:
        return self.values.size - 1

    @classmethod
    def point_mass(cls, a: float, horizon: int, time: float = 0.0):
        return cls(a ** np.arange(horizon + 1, dtype=float), time)


def moment_rhs(fp: FreeParams, m):
    """Right-hand side of the free Jacobi moment hierarchy (m_0 held at 1)."""
    m = np.asarray(m, dtype=float)
    out = np.zeros_like(m)
    ell = np.arange(1, m.size)
    out[1:] = ell * (-m[1:] + fp.theta * m[:-1] + fp.lam * fp.theta * _conv_term(m))
    return out


def _conv_term(m):
    """``sum_{j=0}^{l-2} m_{l-1-j} (m_j - m_{j+1})`` for l = 1..L.

    Entry l only reads m_0..m_{l-1}.  The sum runs over j in a fixed
    sequential order (axis-0 reduction of a zero-padded table), so results
    are bitwise independent of the horizon.
    """
    L = m.size - 1
    d = m[:-1] - m[1:]
    j = np.arange(L)[:, None]
    ell = np.arange(1, L + 1)[None, :]
    idx = ell - 1 - j
    table = np.where(idx >= 1, m[np.clip(idx, 0, L)] * d[:, None], 0.0)
    return np.add.reduce(table, axis=0)


def moment_flow(fp: FreeParams, m0: MomentSeq, t: float, dt: float = 1e-3) -> MomentSeq:
    """RK4 on the moment hierarchy for a duration ``t``.

    The system is lower triangular in the moment index, so truncating at the
    horizon loses nothing.  The step does not depend on the horizon, which
    keeps truncated runs bitwise identical to longer ones; RK4 stays stable
    while ``horizon * dt < 2.7``.
    """
    if dt * m0.horizon >= 2.7:
        raise ValueError("dt too large for this horizon (RK4 stability)")
    y = rk4_integrate(lambda m: moment_rhs(fp, m), m0.values, t, dt)
    y[0] = 1.0
    return MomentSeq(y, m0.time + t)


def frozen_moment_rhs(params: JacobiParams, M: MomentSeq, rescaled: bool = False) -> np.ndarray:
    """Exact time derivative of the root moments of the frozen process.

    ``dm_l/dt = -l(p+q-l+1) m_l + l(p-l+1) m_{l-1}
    + m l sum_{k=0}^{l-2} (m_k - m_{k+1}) m_{l-1-k}``.
    With ``rescaled=True`` this is the derivative in the clock ``t/d``.
    """
    m_, p, q = params.m, params.p, params.q
    v = M.values
    out = np.zeros_like(v)
    ell = np.arange(1, v.size)
    out[1:] = ell * (-(p + q - ell + 1) * v[1:] + (p - ell + 1) * v[:-1] + m_ * _conv_term(v))
    if rescaled:
        out /= params.d
    return out


def empirical_moments(roots, horizon: int, time: float = 0.0) -> MomentSeq:
    x = np.asarray(roots, dtype=float)
    ell = np.arange(horizon + 1)
    return MomentSeq(np.mean(x[None, :] ** ell[:, None], axis=1), time)


def esf_power_moments(poly: MonicPoly, horizon: int, time: float = 0.0) -> MomentSeq:
    """Root moments from the esf by Newton's identities (no root finding).

    Moment ``l`` only involves ``e_1..e_l``, so this stays usable for large
    degree where root extraction from coefficients is ill-conditioned.
    """
    m = poly.degree
    e = poly.esf
    if horizon > m:
        raise ValueError("Newton identities as written need horizon <= degree")
    pk = np.zeros(horizon + 1)
    pk[0] = m
    for k in range(1, horizon + 1):
        acc = (-1) ** (k - 1) * k * e[k]
        for i in range(1, k):
            acc += (-1) ** (i - 1) * e[i] * pk[k - i]
        pk[k] = acc
    return MomentSeq(pk / m, time)


def stationary_s(fp: FreeParams, z):
    """``(lam theta z + 1) / (lam theta z + theta)``."""
    a = fp.lam * fp.theta
    den = a * z + fp.theta
    if np.any(np.abs(den) == 0):
        raise PoleError(f"stationary S has a pole at z = {-1 / fp.lam}")
    return (a * z + 1) / den


def stationary_t(fp: FreeParams, z):
    """Stationary T on (0, 1) through ``T(z) = 1/S(z - 1)``."""
    return 1.0 / stationary_s(fp, z - 1)


def xi(t, u):
    """``(u-1)/(u+1) e^{ut}``; this is xi_{2t} in the doubled-clock notation."""
    if u == -1:
        raise PoleError("xi has a pole at u = -1")
    return (u - 1) / (u + 1) * cmath.exp(u * t) if isinstance(u, complex) else (u - 1) / (u + 1) * math.exp(u * t)


def xi_prime(t, u):
    e = cmath.exp(u * t) if isinstance(u, complex) else math.exp(u * t)
    return (2 / (u + 1) ** 2 + t * (u - 1) / (u + 1)) * e


def _sqrt1p(z):
    if isinstance(z, complex):
        if (1 + z).real <= 0:
            warnings.warn("1 + z is on or left of the imaginary axis; near the sqrt branch cut", RuntimeWarning)
        return cmath.sqrt(1 + z)
    if 1 + z <= 0:
        warnings.warn("1 + z <= 0; switching to complex sqrt", RuntimeWarning)
        return cmath.sqrt(1 + z)
    return math.sqrt(1 + z)


def _kappa_parts(t, z):
    u = _sqrt1p(z)
    um1 = z / (1 + u)  # u - 1 without cancellation
    e = cmath.exp(u * t) if isinstance(u, complex) else math.exp(u * t)
    x = um1 / (u + 1) * e
    return u, um1, x, e


def kappa(t, z):
    """Characteristic map ``kappa_t(z) = ((1+u) xi(u) + (u-1)) / (1 - xi(u))``, u = sqrt(1+z).

    ``u - 1`` is formed as ``z/(1+u)`` so the map stays accurate near 0.
    """
    u, um1, x, _ = _kappa_parts(t, z)
    return ((1 + u) * x + um1) / (1 - x)


def kappa_prime(t, z):
    u, um1, x, e = _kappa_parts(t, z)
    dx = (2 / (u + 1) ** 2 + t * um1 / (u + 1)) * e
    num = (1 + u) * x + um1
    den = 1 - x
    dnum = x + (1 + u) * dx + 1
    dden = -dx
    return (dnum * den - num * dden) / den**2 / (2 * u)


def _newton_kappa(t, z, w, tol, maxiter):
    for _ in range(maxiter):
        f = kappa(t, w) - z
        if abs(f) <= tol * max(1.0, abs(z)):
            return w
        w = w - f / kappa_prime(t, w)
    if abs(kappa(t, w) - z) <= tol * max(1.0, abs(z)):
        return w
    return None


def kappa_inv(t, z, seed=None, tol=1e-13, maxiter=50):
    """Local inverse of ``kappa_t`` near 0 by Newton's method.

    The default seed is the linearization ``z / kappa_t'(0) = 2z / (1 + e^t)``:
    it equals ``z`` at t = 0 and tends to 0 as the inverse collapses.  Seeding
    at ``z`` itself can land on a distant preimage once ``kappa_t'(0)`` is large.
    If Newton fails from the seed, the solution is continued along the
    segment from 0 to ``z`` in 32 steps before giving up.
    """
    if z == 0:
        return 0.0 * z
    if seed is None:
        seed = 2 * z / (1 + math.exp(t)) if t < 700 else 0.0 * z
    w = _newton_kappa(t, z, seed, tol, maxiter)
    if w is None:
        w = 0.0 * z
        for k in range(1, 33):
            w = _newton_kappa(t, z * k / 32, w, tol, maxiter)
            if w is None:
                break
    if w is None:
        raise KappaConvergenceError(f"kappa_inv did not converge at t={t}, z={z}")
    return w


def s_one_half(t, z):
    """S transform at ``lam = 1, theta = 1/2`` from the point mass at 1.

    ``S_t(z) = (z^2 + 2z - kappa_t^{-1}(z)) / (z(1+z))``; the removable
    value at ``z = 0`` is ``2 e^t / (1 + e^t)``.
    """
    if z == 0:
        return 2.0 / (1.0 + math.exp(-t))
    if z == -1:
        raise PoleError("s_one_half is singular at z = -1")
    w = kappa_inv(t, z)
    return (z * z + 2 * z - w) / (z * (1 + z))


def t_one_half(t, v):
    """T transform on (0, 1) from the duality ``T(v) = 1 / S(v - 1)``."""
    return 1.0 / s_one_half(t, v - 1)


def s_from_moments(M: MomentSeq) -> PowerSeries:
    """S-transform series from moments by series reversion.

    Returns the series of ``(1+z) eta(z) / z`` through order ``L - 1``.
    """
    if M.values[1] == 0:
        raise ValueError("degenerate moment sequence: m_1 = 0")
    L = M.horizon
    psi = PowerSeries(np.concatenate([[0.0], M.values[1:]]))
    eta = psi.reversion()
    eta_over_z = PowerSeries(eta.coeffs[1:], L - 1)
    one_plus_z = PowerSeries([1.0, 1.0], L - 1)
    return one_plus_z * eta_over_z


def _dz(f, z, h, order):
    """Central difference in z of order 2 or 4."""
    if order == 2:
        return (f(z + h) - f(z - h)) / (2 * h)
    if order == 4:
        return (-f(z + 2 * h) + 8 * f(z + h) - 8 * f(z - h) + f(z - 2 * h)) / (12 * h)
    raise ValueError("order must be 2 or 4")


def pde_s_residual(S, fp: FreeParams, t, z, h_t=1e-4, h_z=1e-4, z_order=4):
    """``|d_t S - (2 lam theta z + 1) S + theta (1 + 2 lam z) S^2 + theta z (1 + lam z)/2 d_z S^2|``.

    ``S`` is a callable ``(t, z)``.  Time uses a second-order central
    difference (one-sided second order when ``t < h_t``), space a central
    difference of order ``z_order``, so Richardson slopes in ``h_t`` read 2
    while a time-independent S gives a residual near rounding.
    """
    lam, th = fp.lam, fp.theta
    if t >= h_t:
        dt_s = (S(t + h_t, z) - S(t - h_t, z)) / (2 * h_t)
    else:
        dt_s = (-3 * S(t, z) + 4 * S(t + h_t, z) - S(t + 2 * h_t, z)) / (2 * h_t)
    s0 = S(t, z)
    dz_s2 = _dz(lambda zz: S(t, zz) ** 2, z, h_z, z_order)
    res = dt_s - (2 * lam * th * z + 1) * s0 + th * (1 + 2 * lam * z) * s0**2 + th * z * (1 + lam * z) / 2 * dz_s2
    return abs(res)


def t_pde_residual(T, fp: FreeParams, t, z, h_t=1e-4, h_z=1e-4, z_order=4):
    """``|d_t T - (2(1-z) lam theta - 1) T - theta (1 - 2 lam (1-z)) - theta (1 - lam (1-z))(1-z) d_z log T|``.

    Same stencils as :func:`pde_s_residual`; raises if T is nonpositive on the stencil.
    """
    lam, th = fp.lam, fp.theta

    def logT(zz):
        v = T(t, zz)
        if v <= 0:
            raise ValueError("T must be positive on the stencil")
        return math.log(v)

    T0 = T(t, z)
    dlog = _dz(logT, z, h_z, z_order)
    if t >= h_t:
        dt_t = (T(t + h_t, z) - T(t - h_t, z)) / (2 * h_t)
    else:
        dt_t = (-3 * T0 + 4 * T(t + h_t, z) - T(t + 2 * h_t, z)) / (2 * h_t)
    w = 1 - z
    res = dt_t - (2 * w * lam * th - 1) * T0 - th * (1 - 2 * lam * w) - th * (1 - lam * w) * w * dlog
    return abs(res)
