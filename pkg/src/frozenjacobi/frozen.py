"""The frozen Jacobi process.

Three solvers for the averaged characteristic polynomial of the Hermitian
Jacobi process, which cross-check one another:

* the exact heat propagator acting on the Jacobi-basis expansion,
* RK4 on the linear system for the elementary symmetric functions,
* RK4 on the root ODE.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.special import gammaln

from .ode import StepRejected, rk4_integrate
from .special_fn import (
    JacobiWeightParams,
    jacobi_eval,
    jacobi_leading_coeff,
    jacobi_monomial_coeffs,
    jacobi_operator_apply,
)

__all__ = [
    "JacobiParams",
    "MonicPoly",
    "JacobiExpansion",
    "RootEnsemble",
    "NonRealRootError",
    "RootDomainError",
    "CollisionError",
    "decay_rates",
    "nu_partition",
    "nu_partition_integer",
    "initial_expansion",
    "propagate",
    "general_expansion",
    "esf_rhs",
    "esf_flow",
    "root_drift",
    "root_flow",
    "drift_forms_agree",
    "extract_roots",
    "heat_residual",
    "frozen_roots",
    "frozen_esf",
    "seed_ensemble",
]

MAX_DEGREE = 170


class NonRealRootError(ValueError):
    pass


class RootDomainError(ValueError):
    pass


class CollisionError(RuntimeError):
    pass


@dataclass(frozen=True)
class JacobiParams:
    """Parameters ``(r, s, m)`` of the Jacobi particle system, with p = r+m, q = s+m."""

    r: float
    s: float
    m: int

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m}")
        if not (self.r > -1 and self.s > -1):
            raise ValueError(f"need r > -1 and s > -1 (p, q > m - 1), got r={self.r}, s={self.s}")

    @classmethod
    def from_pq(cls, p, q, m):
        return cls(p - m, q - m, m)

    @property
    def p(self) -> float:
        return self.r + self.m

    @property
    def q(self) -> float:
        return self.s + self.m

    @property
    def d(self) -> float:
        return self.p + self.q

    @property
    def weight(self) -> JacobiWeightParams:
        return JacobiWeightParams(self.r, self.s)


@dataclass
class MonicPoly:
    """Monic polynomial ``sum_k (-1)^k e_k x^(m-k)`` stored by its esf ``e_0..e_m``."""

    esf: np.ndarray

    def __post_init__(self):
        self.esf = np.asarray(self.esf, dtype=float)
        if self.esf.ndim != 1 or self.esf.size < 2:
            raise ValueError("need e_0..e_m with m >= 1")
        if self.esf[0] != 1.0:
            raise ValueError(f"monic polynomial needs e_0 = 1, got {self.esf[0]}")

    @property
    def degree(self) -> int:
        return self.esf.size - 1

    @classmethod
    def from_roots(cls, roots):
        c = np.poly(np.asarray(roots, dtype=float))
        k = np.arange(c.size)
        return cls((-1.0) ** k * c)

    def coeffs_desc(self) -> np.ndarray:
        """Coefficients of ``x^m, x^(m-1), ..., 1``."""
        k = np.arange(self.esf.size)
        return (-1.0) ** k * self.esf

    def coeffs_asc(self) -> np.ndarray:
        return self.coeffs_desc()[::-1].copy()

    def __call__(self, x):
        return np.polyval(self.coeffs_desc(), x)


@dataclass
class JacobiExpansion:
    """Coordinates ``c_0..c_m`` of a degree-m polynomial in the basis Q_j^{(r,s)}."""

    params: JacobiParams
    coeffs: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.size != self.params.m + 1:
            raise ValueError("need m + 1 coefficients")

    def __call__(self, x):
        w = self.params.weight
        x = np.asarray(x, dtype=float)
        return sum(c * jacobi_eval(w, j, x) for j, c in enumerate(self.coeffs))

    def monomial_coeffs(self) -> np.ndarray:
        """Ascending monomial coefficients.  Ill-conditioned for large m."""
        w = self.params.weight
        out = np.zeros(self.params.m + 1)
        for j, c in enumerate(self.coeffs):
            out[: j + 1] += c * jacobi_monomial_coeffs(w, j)
        return out

    def to_monic(self) -> MonicPoly:
        a = self.monomial_coeffs()
        desc = a[::-1] / a[-1]
        k = np.arange(desc.size)
        esf = (-1.0) ** k * desc
        esf[0] = 1.0
        return MonicPoly(esf)

    @classmethod
    def from_monic(cls, params: JacobiParams, poly: MonicPoly, time: float = 0.0):
        """Expand a monic polynomial in the Q basis (back substitution)."""
        m = params.m
        if poly.degree != m:
            raise ValueError("degree mismatch")
        w = params.weight
        basis = np.zeros((m + 1, m + 1))
        for j in range(m + 1):
            basis[: j + 1, j] = jacobi_monomial_coeffs(w, j)
        coeffs = np.linalg.solve(basis, poly.coeffs_asc())
        return cls(params, coeffs, time)


@dataclass
class RootEnsemble:
    roots: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.roots = np.asarray(self.roots, dtype=float)
        if np.any(np.diff(self.roots) <= 0):
            raise ValueError("roots must be strictly increasing")
        if self.time > 0 and (np.any(self.roots <= 0) or np.any(self.roots >= 1)):
            raise RootDomainError("roots at positive time must lie in (0, 1)")

    @property
    def m(self) -> int:
        return self.roots.size


def decay_rates(params: JacobiParams) -> np.ndarray:
    """``nu_j = (m-j)(r+s+1+m+j)``, the decay rate of the Q_j coordinate."""
    m = params.m
    j = np.arange(m + 1)
    return (m - j) * (params.r + params.s + 1 + m + j)


def nu_partition(tau, r, s, m):
    """``sum_i tau_i (tau_i + r + s + 1 + 2(m - i))`` for a partition of length <= m."""
    tau = list(tau) + [0] * (m - len(tau))
    return sum(t * (t + r + s + 1 + 2 * (m - i)) for i, t in enumerate(tau, start=1))


def nu_partition_integer(tau, m):
    """``nu_tau`` as the exact integer pair ``(A, B)`` with nu = A + B (r+s)."""
    tau = list(tau) + [0] * (m - len(tau))
    a = sum(t * (t + 1 + 2 * (m - i)) for i, t in enumerate(tau, start=1))
    b = sum(tau)
    return a, b


def _check_degree(m):
    if m > MAX_DEGREE:
        raise OverflowError(f"degree {m} exceeds the supported cap {MAX_DEGREE}")


def initial_expansion(params: JacobiParams) -> JacobiExpansion:
    """Q-basis coordinates of ``(x-1)^m``.

    ``(x-1)^m = (-1)^m m! sum_j Gamma(s+m+1) Gamma(r+s+j+1) (r+s+2j+1)
    / [(m-j)! Gamma(j+s+1) Gamma(r+s+m+j+2)] Q_j``, evaluated in log space.
    """
    m = params.m
    _check_degree(m)
    r, s = params.r, params.s
    out = np.empty(m + 1)
    for j in range(m + 1):
        # (r+s+2j+1) Gamma(r+s+j+1) -> Gamma(r+s+2) at j = 0
        if j == 0:
            lg = gammaln(r + s + 2)
        else:
            lg = gammaln(r + s + j + 1) + math.log(r + s + 2 * j + 1)
        log_c = (
            math.lgamma(m + 1)
            + gammaln(s + m + 1)
            + lg
            - math.lgamma(m - j + 1)
            - gammaln(j + s + 1)
            - gammaln(r + s + m + j + 2)
        )
        out[j] = (-1) ** m * math.exp(log_c)
    return JacobiExpansion(params, out, 0.0)


def propagate(exp0: JacobiExpansion, t: float) -> JacobiExpansion:
    """Exact heat flow over a duration ``t``: ``c_j -> c_j exp(-nu_j t)``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    c = exp0.coeffs * np.exp(-decay_rates(exp0.params) * t)
    return JacobiExpansion(exp0.params, c, exp0.time + t)


def _complete_homogeneous(w, kmax):
    """``H[c, k] = h_k(w_1..w_{c+1})`` for k = 0..kmax."""
    n = len(w)
    H = np.zeros((n, kmax + 1))
    row = np.zeros(kmax + 1)
    row[0] = 1.0
    for c in range(n):
        new = np.empty_like(row)
        new[0] = 1.0
        for k in range(1, kmax + 1):
            new[k] = row[k] + w[c] * new[k - 1]
        H[c] = new
        row = new
    return H


def general_expansion(params: JacobiParams, w) -> JacobiExpansion:
    """Q-basis expansion of ``prod (x - w_i)`` through the dual Cauchy identity.

    The coefficient of Q_j is
    ``(-2)^{-m(m+1)/2} (-1)^{m-j} [Q_{1^{m-j}}(w) / k_{1^{m-j}}] / k_j`` where
    ``Q_{1^{m-j}}(w)`` is ``det[Q_l(w_c)] / V(w)`` over degrees l != j.  The
    ratio is computed as a determinant of divided differences (complete
    homogeneous symmetric polynomials of the nodes), so coincident nodes are
    handled exactly.  Propagate the result to get the expansion at time t.
    """
    m = params.m
    _check_degree(m)
    w = np.asarray(w, dtype=float)
    if w.shape != (m,):
        raise ValueError(f"need {m} starting points")
    if np.any(w < 0) or np.any(w > 1):
        raise ValueError("starting points must lie in [0, 1]")
    wt = params.weight
    H = _complete_homogeneous(w, m)
    # DD[l, c] = Q_l[w_1, ..., w_{c+1}]
    DD = np.zeros((m + 1, m))
    for l in range(m + 1):
        a = jacobi_monomial_coeffs(wt, l)
        for c in range(min(l + 1, m)):
            DD[l, c] = np.dot(a[c:], H[c, : l - c + 1])
    kl = np.array([jacobi_leading_coeff(wt, l) for l in range(m + 1)])
    vander_sign = (-1) ** (m * (m - 1) // 2)
    pref = (-2.0) ** (-m * (m + 1) / 2)
    coeffs = np.empty(m + 1)
    for j in range(m + 1):
        rows = [l for l in range(m, -1, -1) if l != j]
        qtau = vander_sign * np.linalg.det(DD[rows])
        k_tau = np.prod(kl[rows])
        coeffs[j] = pref * (-1) ** (m - j) * qtau / k_tau / kl[j]
    return JacobiExpansion(params, coeffs, 0.0)


def esf_rhs(params: JacobiParams, e):
    """``de_n/dt = -n(p+q-(n-1)) e_n + (m-(n-1))(p-(n-1)) e_{n-1}``, e_0 fixed."""
    m, p, q = params.m, params.p, params.q
    n = np.arange(1, m + 1)
    out = np.zeros_like(e)
    out[1:] = -n * (p + q - (n - 1)) * e[1:] + (m - (n - 1)) * (p - (n - 1)) * e[:-1]
    return out


def _stable_dt(params, dt):
    stiff = params.m * params.d
    return min(dt, 0.1 / stiff)


def esf_flow(params: JacobiParams, e0: MonicPoly, t: float, dt: float = 1e-3) -> MonicPoly:
    """RK4 on the esf system over a duration ``t``.

    Steps producing a nonpositive e_n (the exact flow keeps them positive)
    are rejected and retried at half size.
    """
    if e0.degree != params.m:
        raise ValueError("degree mismatch")
    if t < 0:
        raise ValueError("t must be nonnegative")
    positive = e0.esf > 0
    y = rk4_integrate(
        lambda e: esf_rhs(params, e),
        e0.esf,
        t,
        _stable_dt(params, dt),
        accept=lambda e: bool(np.all(e[positive] > 0)),
    )
    y[0] = 1.0
    return MonicPoly(y)


def root_drift(params: JacobiParams, x):
    """Right-hand side of the root ODE in its (p, q) form."""
    x = np.asarray(x, dtype=float)
    diff = x[:, None] - x[None, :]
    num = x[:, None] * (1 - x[None, :]) + x[None, :] * (1 - x[:, None])
    np.fill_diagonal(diff, 1.0)
    inter = num / diff
    np.fill_diagonal(inter, 0.0)
    return params.p - params.d * x + inter.sum(axis=1)


def _root_drift_rs(params: JacobiParams, x):
    x = np.asarray(x, dtype=float)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, np.inf)
    return (params.r + 1) - (params.r + params.s + 2) * x + 2 * x * (1 - x) * (1.0 / diff).sum(axis=1)


def drift_forms_agree(params: JacobiParams, x) -> float:
    """Max difference of the two forms of the root drift, relative to its scale."""
    x = np.asarray(x, dtype=float)
    a = root_drift(params, x)
    b = _root_drift_rs(params, x)
    scale = max(1.0, float(np.max(np.abs(a))))
    return float(np.max(np.abs(a - b)) / scale)


def root_flow(params: JacobiParams, roots0: RootEnsemble, t: float, dt: float = 1e-3) -> RootEnsemble:
    """RK4 on the root ODE from ``roots0.time`` to absolute time ``t``.

    The step is capped near close encounters (a tenth of the time for the
    closest pair to meet at current speed) and halved whenever a step
    breaks ordering or leaves (0, 1).
    """
    x0 = roots0.roots
    if x0.size != params.m:
        raise ValueError("ensemble size must equal m")
    if t < roots0.time:
        raise ValueError("target time precedes the ensemble time")
    if np.any(x0 <= 0) or np.any(x0 >= 1):
        raise RootDomainError("root_flow needs initial roots in (0, 1); seed from propagate at a small time")

    def limit(x):
        gaps = np.diff(x)
        if gaps.size == 0:
            return np.inf
        g = float(gaps.min())
        if g < 1e-12:
            raise CollisionError(f"roots collided (gap {g:.3e})")
        v = root_drift(params, x)
        closing = float(np.max(np.abs(np.diff(v)))) + 1e-300
        return 0.1 * g / closing

    def accept(x):
        return bool(np.all(np.diff(x) > 0) and x[0] > 0 and x[-1] < 1)

    try:
        x = rk4_integrate(
            lambda x: root_drift(params, x),
            x0,
            t - roots0.time,
            _stable_dt(params, dt),
            accept=accept,
            step_limit=limit,
        )
    except StepRejected as exc:
        raise CollisionError(str(exc)) from exc
    return RootEnsemble(x, t)


def extract_roots(poly: MonicPoly, imag_tol: float = 1e-8, interval=(0.0, 1.0), time: float = None) -> RootEnsemble:
    """Real simple roots of a monic polynomial, sorted and Newton-polished.

    Companion-matrix eigenvalues (LAPACK balances the matrix), then up to
    five Newton steps per root.  Pass ``interval=None`` to skip the domain
    check.
    """
    c = poly.coeffs_desc()
    m = poly.degree
    comp = np.zeros((m, m))
    comp[0, :] = -c[1:]
    comp[1:, :-1] = np.eye(m - 1)
    z = np.linalg.eigvals(comp)
    scale = max(1.0, float(np.max(np.abs(z))))
    if np.max(np.abs(z.imag)) > imag_tol * scale:
        raise NonRealRootError(f"companion eigenvalues with imaginary part {np.max(np.abs(z.imag)):.3e}")
    x = np.sort(z.real)
    dc = np.polyder(c)
    norm = float(np.sum(np.abs(c)))
    for _ in range(5):
        val = np.polyval(c, x)
        if np.all(np.abs(val) <= 1e-12 * norm):
            break
        der = np.polyval(dc, x)
        step = np.where(der != 0, val / np.where(der != 0, der, 1.0), 0.0)
        trial = x - step
        better = np.abs(np.polyval(c, trial)) < np.abs(val)
        x = np.where(better, trial, x)
    x = np.sort(x)
    if interval is not None:
        lo, hi = interval
        if np.any(x <= lo) or np.any(x >= hi):
            raise RootDomainError(f"roots outside ({lo}, {hi}): min {x[0]}, max {x[-1]}")
    return RootEnsemble(x, 0.0 if time is None else time)


def _as_flow(flow):
    if isinstance(flow, JacobiExpansion):
        base = flow
        return lambda t: propagate(base, t)
    return flow


def _monomial(obj):
    if isinstance(obj, JacobiExpansion):
        return obj.monomial_coeffs()
    if isinstance(obj, MonicPoly):
        return obj.coeffs_asc()
    return np.asarray(obj, dtype=float)


def heat_residual(flow, params: JacobiParams, t: float, h_t: float = 1e-4, grid=None) -> float:
    """Max over a grid of ``|d_t chi + (L + m(r+s+m+1)) chi|`` at time ``t``.

    ``flow`` is either a time-0 :class:`JacobiExpansion` (propagated exactly)
    or a callable ``t -> JacobiExpansion | MonicPoly``.  The time derivative
    is a central difference with step ``h_t``; the operator is exact.
    """
    if t - h_t < 0:
        raise ValueError("need t > h_t")
    f = _as_flow(flow)
    if grid is None:
        grid = np.linspace(0.0, 1.0, 41)
    cm, c0, cp = (_monomial(f(tt)) for tt in (t - h_t, t, t + h_t))
    dchi = (cp - cm) / (2 * h_t)
    m = params.m
    res = dchi + jacobi_operator_apply(params.weight, c0) + m * (params.r + params.s + m + 1) * c0
    return float(np.max(np.abs(np.polynomial.polynomial.polyval(grid, res))))


def frozen_roots(params: JacobiParams, t: float, start: JacobiExpansion = None) -> RootEnsemble:
    """Roots at time ``t`` via the exact propagator (default start ``(x-1)^m``)."""
    exp0 = initial_expansion(params) if start is None else start
    poly = propagate(exp0, t).to_monic()
    return extract_roots(poly, time=t)


def frozen_esf(params: JacobiParams, t: float, dt: float = 1e-3) -> MonicPoly:
    """esf at time ``t`` from ``(x-1)^m``, by the esf ODE.

    Every quantity stays positive along this route, so it remains accurate
    at degrees where the monomial conversion of the Q expansion cancels.
    """
    m = params.m
    e0 = MonicPoly(np.array([math.comb(m, k) for k in range(m + 1)], dtype=float))
    return esf_flow(params, e0, t, dt)


def seed_ensemble(params: JacobiParams, t0: float, dps: int = 60) -> RootEnsemble:
    """Roots of the propagated ``(x-1)^m`` at a small time ``t0``, in extended precision.

    Near t = 0 the roots sit in a cluster of width ~ sqrt(t0) around 1 and
    double-precision coefficients cannot resolve them; this evaluates the
    same closed-form expansion with ``dps`` digits before root finding.
    """
    m = params.m
    if t0 <= 0:
        raise ValueError("seed time must be positive")
    with mpmath.workdps(dps):
        r, s, t0m = mpmath.mpf(params.r), mpmath.mpf(params.s), mpmath.mpf(t0)
        poly = [mpmath.mpf(0)] * (m + 1)  # ascending
        for j in range(m + 1):
            lead = mpmath.gamma(r + s + 2) if j == 0 else mpmath.gamma(r + s + j + 1) * (r + s + 2 * j + 1)
            c = (
                (-1) ** m
                * mpmath.factorial(m)
                * mpmath.gamma(s + m + 1)
                * lead
                / (mpmath.factorial(m - j) * mpmath.gamma(j + s + 1) * mpmath.gamma(r + s + m + j + 2))
            )
            c *= mpmath.exp(-(m - j) * (r + s + 1 + m + j) * t0m)
            term = mpmath.rf(r + 1, j) / mpmath.factorial(j)
            for k in range(j + 1):
                poly[k] += c * term
                term *= mpmath.mpf(k - j) * (r + s + j + 1 + k) / ((r + 1 + k) * (k + 1))
        desc = [a / poly[-1] for a in poly[::-1]]
        roots = mpmath.polyroots(desc, maxsteps=200, extraprec=4 * dps)
    x = np.sort(np.array([float(mpmath.re(z)) for z in roots]))
    return RootEnsemble(x, t0)
