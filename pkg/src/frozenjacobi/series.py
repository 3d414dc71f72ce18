"""Truncated formal power series with composition and reversion."""

from __future__ import annotations

import numpy as np


class PowerSeries:
    """``a_0 + a_1 z + ... + a_L z^L``, all arithmetic truncated at order ``L``.

    Coefficients may be real or complex.
    """

    def __init__(self, coeffs, order=None):
        c = np.asarray(coeffs)
        if not np.iscomplexobj(c):
            c = c.astype(float)
        if order is None:
            order = c.size - 1
        out = np.zeros(order + 1, dtype=c.dtype)
        n = min(order + 1, c.size)
        out[:n] = c[:n]
        self.coeffs = out

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def __repr__(self):
        return f"PowerSeries({self.coeffs.tolist()!r})"

    def __getitem__(self, k):
        return self.coeffs[k]

    @classmethod
    def identity(cls, order):
        c = np.zeros(order + 1)
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    def _coerce(self, other):
        if isinstance(other, PowerSeries):
            return other.truncate(self.order)
        c = np.zeros(self.order + 1, dtype=np.result_type(self.coeffs, other))
        c[0] = other
        return PowerSeries(c)

    def truncate(self, order):
        return PowerSeries(self.coeffs, order)

    def __add__(self, other):
        other = self._coerce(other)
        return PowerSeries(self.coeffs + other.coeffs)

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries(-self.coeffs)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, PowerSeries):
            return PowerSeries(self.coeffs * other)
        other = other.truncate(self.order)
        return PowerSeries(np.convolve(self.coeffs, other.coeffs)[: self.order + 1])

    __rmul__ = __mul__

    def reciprocal(self):
        """``1/f``; needs ``a_0 != 0``."""
        a = self.coeffs
        if a[0] == 0:
            raise ZeroDivisionError("series with zero constant term has no reciprocal")
        b = np.zeros_like(a, dtype=np.result_type(a, 1.0))
        b[0] = 1.0 / a[0]
        for n in range(1, a.size):
            b[n] = -np.dot(a[1 : n + 1], b[n - 1 :: -1][:n]) / a[0]
        return PowerSeries(b)

    def __truediv__(self, other):
        if not isinstance(other, PowerSeries):
            return PowerSeries(self.coeffs / other)
        return self * other.truncate(self.order).reciprocal()

    def shift_down(self):
        """``(f - a_0)/z``, keeping the order (top coefficient set to 0)."""
        return PowerSeries(np.concatenate([self.coeffs[1:], [0]]))

    def derivative(self):
        k = np.arange(1, self.order + 1)
        return PowerSeries(np.concatenate([self.coeffs[1:] * k, [0]]))

    def compose(self, g: "PowerSeries") -> "PowerSeries":
        """``f(g(z))``; needs ``g(0) = 0``."""
        if g.coeffs[0] != 0:
            raise ValueError("inner series must have zero constant term")
        g = g.truncate(self.order)
        out = PowerSeries(np.zeros(self.order + 1, dtype=np.result_type(self.coeffs, g.coeffs)))
        for a in self.coeffs[::-1]:
            out = out * g + a
        return out

    def reversion(self) -> "PowerSeries":
        """Compositional inverse ``g`` with ``f(g(z)) = z`` through order ``L``.

        Newton iteration ``g <- g - (f(g) - z) / f'(g)``; each pass doubles the
        number of correct coefficients.
        """
        a = self.coeffs
        if a[0] != 0:
            raise ValueError("reversion needs a_0 = 0")
        if a.size < 2 or a[1] == 0:
            raise ValueError("reversion needs a_1 != 0")
        L = self.order
        g = PowerSeries.identity(L) * (1.0 / a[1])
        df = self.derivative()
        z = PowerSeries.identity(L)
        prec = 1
        while prec < L:
            prec = min(2 * prec, L)
            g = g - (self.compose(g) - z) / df.compose(g)
        # one extra pass to polish rounding
        g = g - (self.compose(g) - z) / df.compose(g)
        return g

    def __call__(self, z):
        """Horner evaluation of the truncated polynomial."""
        z = np.asarray(z)
        out = np.zeros_like(z, dtype=np.result_type(self.coeffs, z, 1.0))
        for a in self.coeffs[::-1]:
            out = out * z + a
        return out if out.ndim else out[()]
