"""Fixed-step classical RK4 with step halving on rejection."""

from __future__ import annotations

import numpy as np


class StepRejected(RuntimeError):
    """Raised when halving the step can no longer satisfy the acceptance test."""


def rk4_step(f, y, h):
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def rk4_integrate(f, y0, duration, dt, accept=None, step_limit=None, max_halvings=30):
    """Integrate the autonomous system ``y' = f(y)`` over ``duration``.

    ``step_limit(y)``, if given, caps the step from the current state (used
    for close encounters).  ``accept(y_new)`` returning False rejects a step,
    which is retried at half the size.  The final step is shortened to land
    exactly on ``duration``.
    """
    y = np.array(y0, dtype=float, copy=True)
    if duration < 0:
        raise ValueError("duration must be nonnegative")
    if dt <= 0:
        raise ValueError("dt must be positive")
    t = 0.0
    while duration - t > 1e-15 * max(1.0, duration):
        h = min(dt, duration - t)
        if step_limit is not None:
            h = min(h, step_limit(y))
        for _ in range(max_halvings + 1):
            y_new = rk4_step(f, y, h)
            if np.all(np.isfinite(y_new)) and (accept is None or accept(y_new)):
                break
            h *= 0.5
        else:
            raise StepRejected(f"step rejected after {max_halvings} halvings at t={t}")
        y = y_new
        t += h
    return y
