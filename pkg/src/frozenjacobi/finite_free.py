"""Finite free S and T transforms of polynomials with nonnegative roots.

For a monic degree-m polynomial with signed esf ``e_k`` and ``r`` roots at 0,

    S(-k/m) = (m-k+1)/k * e_{k-1}/e_k,            k = 1..m-r,
    T(v)    = (m-k+1)/k * e_{m-k+1}/e_{m-k}   on [(k-1)/m, k/m),

with ``T = 0`` on (0, r/m).  The two are reciprocal: ``T(1 - k/m) S(-k/m) = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .frozen import JacobiParams, MonicPoly

__all__ = [
    "NonPositiveEsfError",
    "StepFn",
    "SGrid",
    "zero_run",
    "finite_s",
    "finite_t",
    "nabla",
    "nabla_left",
    "t_evolution_rhs",
    "ProfileRow",
    "convergence_profile",
]

ZERO_TAIL_RTOL = 1e-300
# lattice snapping for cell lookup at v = k/m
_SNAP = 1e-9


class NonPositiveEsfError(ValueError):
    """Some e_k with k <= m - r is nonpositive: the roots are not all nonnegative."""


def _snap(x: float) -> float:
    n = round(x)
    return float(n) if abs(x - n) < _SNAP else x


def _lattice_floor(x: float) -> int:
    return math.floor(_snap(x))


def _lattice_ceil(x: float) -> int:
    return math.ceil(_snap(x))


@dataclass(frozen=True)
class StepFn:
    """Right-continuous step function on (0, 1).

    ``values[i]`` is the value on the cell ``[(k-1)/m, k/m)`` with
    ``k = zero_run + 1 + i``; the function is 0 on ``(0, zero_run/m)``.
    The closed left end of the first cell is accepted, so ``T(0)`` is the
    first cell value (needed for duality at ``k = m``).
    """

    m: int
    zero_run: int
    values: np.ndarray

    def __post_init__(self):
        if len(self.values) != self.m - self.zero_run:
            raise ValueError("need m - zero_run cell values")

    def cell(self, v: float) -> int:
        """Index ``k`` of the cell ``[(k-1)/m, k/m)`` containing ``v``."""
        if not 0 <= v < 1:
            raise ValueError(f"T is defined on [0, 1), got v={v}")
        return _lattice_floor(self.m * v) + 1

    def __call__(self, v: float) -> float:
        k = self.cell(v)
        if k <= self.zero_run:
            return 0.0
        return float(self.values[k - self.zero_run - 1])


@dataclass(frozen=True)
class SGrid:
    """Values ``S(-k/m)`` for k = 1..m - zero_run, stored at ``values[k-1]``."""

    m: int
    zero_run: int
    values: np.ndarray

    def at(self, k: int) -> float:
        if not 1 <= k <= self.m - self.zero_run:
            raise ValueError(f"k={k} outside 1..{self.m - self.zero_run}")
        return float(self.values[k - 1])

    def interp(self, v: float) -> float:
        """Interpolated ``S(v) = S(-ceil(mv)/m)`` for ``v`` in (0, (m - r)/m]."""
        if v <= 0:
            raise ValueError("interpolated S needs v > 0")
        return self.at(_lattice_ceil(self.m * v))

    __call__ = interp


def zero_run(poly: MonicPoly) -> int:
    """Number of vanishing trailing esf, i.e. the multiplicity of the root 0."""
    e = poly.esf
    tol = ZERO_TAIL_RTOL * np.max(np.abs(e))
    r = 0
    for k in range(poly.degree, 0, -1):
        if abs(e[k]) <= tol:
            r += 1
        else:
            break
    return r


def _log_esf(poly: MonicPoly):
    r = zero_run(poly)
    m = poly.degree
    live = poly.esf[: m - r + 1]
    if np.any(live <= 0):
        k = int(np.argmax(live <= 0))
        raise NonPositiveEsfError(f"e_{k} = {live[k]!r} <= 0; roots must be nonnegative")
    return np.log(live), r


def finite_s(poly: MonicPoly) -> SGrid:
    le, r = _log_esf(poly)
    m = poly.degree
    k = np.arange(1, m - r + 1)
    vals = (m - k + 1) / k * np.exp(le[k - 1] - le[k])
    return SGrid(m, r, vals)


def finite_t(poly: MonicPoly) -> StepFn:
    le, r = _log_esf(poly)
    m = poly.degree
    k = np.arange(r + 1, m + 1)
    vals = (m - k + 1) / k * np.exp(le[m - k + 1] - le[m - k])
    return StepFn(m, r, vals)


def nabla(g, v: float, m: int) -> float:
    """Right difference ``m (g(v + 1/m) - g(v))``."""
    return m * (g(v + 1.0 / m) - g(v))


def nabla_left(g, v: float, m: int) -> float:
    """Left difference ``m (g(v) - g(v - 1/m))``."""
    return m * (g(v) - g(v - 1.0 / m))


def t_evolution_rhs(params: JacobiParams, T: StepFn, z: float) -> float:
    """Time derivative of the finite T transform along the frozen flow.

    With ``N = m - ceil(mz)`` and ``T+ = T(z + 1/m)``:

        [2N - (p+q)] T(z) + p - 2N + (nabla T(z) / (m T+)) (p - N + 1) N.

    The difference term is absent when N = 0 (the last cell).
    """
    m, p, q = params.m, params.p, params.q
    if T.m != m:
        raise ValueError("degree mismatch between params and T")
    N = m - _lattice_ceil(m * z)
    Tz = T(z)
    out = (2 * N - (p + q)) * Tz + p - 2 * N
    if N > 0:
        Tp = T(z + 1.0 / m)
        if Tp == 0:
            raise ZeroDivisionError("T(z + 1/m) = 0 on a zero-root cell")
        out += (nabla(T, z, m) / (m * Tp)) * (p - N + 1) * N
    return float(out)


@dataclass(frozen=True)
class ProfileRow:
    m: int
    s_err: float
    ds_err: float
    t_err: float = float("nan")
    dt_err: float = float("nan")


def convergence_profile(
    family,
    m_list,
    reference,
    derivative_reference,
    v_window=(0.2, 0.6),
    n_v: int = 201,
    t_reference=None,
    t_derivative_reference=None,
):
    """Sup errors of the interpolated finite transforms against a limit.

    ``family(m)`` returns a MonicPoly; ``reference(v)`` is the limit of the
    interpolated S at ``v`` (that is ``S_mu(-v)``) and
    ``derivative_reference(v)`` the limit of its right difference, which is
    ``d/dv S_mu(-v)``.  The optional T references play the same roles for
    the step function T.  Errors are maxima over ``n_v`` equispaced points
    of ``v_window``.
    """
    v = np.linspace(v_window[0], v_window[1], n_v)
    ref = np.array([reference(x) for x in v])
    dref = np.array([derivative_reference(x) for x in v])
    tref = dref_t = None
    if t_reference is not None:
        tref = np.array([t_reference(x) for x in v])
        dref_t = np.array([t_derivative_reference(x) for x in v]) if t_derivative_reference else None
    rows = []
    for m in m_list:
        poly = family(m)
        S = finite_s(poly)
        s_err = max(abs(S(x) - y) for x, y in zip(v, ref))
        ds_err = max(abs(nabla(S, x, m) - y) for x, y in zip(v, dref))
        t_err = dt_err = float("nan")
        if tref is not None:
            T = finite_t(poly)
            t_err = max(abs(T(x) - y) for x, y in zip(v, tref))
            if dref_t is not None:
                dt_err = max(abs(nabla(T, x, m) - y) for x, y in zip(v, dref_t))
        rows.append(ProfileRow(m, float(s_err), float(ds_err), float(t_err), float(dt_err)))
    return rows
