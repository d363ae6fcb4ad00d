"""Safeguarded Newton iteration inside a bisection bracket."""

from __future__ import annotations

import math
from typing import Callable, Optional


class BracketError(RuntimeError):
    """The supplied interval does not bracket a sign change."""


def central_difference(f: Callable[[float], float], x: float, h: float = 1e-6) -> float:
    return (f(x + h) - f(x - h)) / (2.0 * h)


def newton_bisect(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    fprime: Optional[Callable[[float], float]] = None,
    xtol: float = 1e-12,
    ftol: float = 1e-12,
    maxiter: int = 200,
    fd_step: float = 1e-6,
) -> float:
    """Root of ``f`` in ``[lo, hi]`` by Newton steps, falling back to bisection.

    A Newton step is accepted only if it lands strictly inside the current
    bracket; otherwise the bracket is halved.  Without ``fprime`` the slope is
    taken from central differences with step ``fd_step``.  Stops when
    ``|f| < ftol`` or the bracket is narrower than ``xtol``.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if math.copysign(1.0, flo) == math.copysign(1.0, fhi):
        raise BracketError(f"no sign change on [{lo}, {hi}]: f={flo:.3g}, {fhi:.3g}")

    x = 0.5 * (lo + hi)
    for _ in range(maxiter):
        fx = f(x)
        if abs(fx) < ftol or hi - lo < xtol:
            return x
        if math.copysign(1.0, fx) == math.copysign(1.0, flo):
            lo, flo = x, fx
        else:
            hi = x
        d = fprime(x) if fprime is not None else central_difference(f, x, fd_step)
        step_ok = False
        if d != 0.0 and math.isfinite(d):
            xn = x - fx / d
            if lo < xn < hi:
                x, step_ok = xn, True
        if not step_ok:
            x = 0.5 * (lo + hi)
    return x
