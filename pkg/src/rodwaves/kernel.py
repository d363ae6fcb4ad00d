"""Periodic Green kernel of ``(1 - d^2/dx^2)^{-1}`` and the weights built from it.

The kernel is the 1-periodic function

    p(x) = cosh(x - floor(x) - 1/2) / (2 sinh(1/2)),

and for a real ``beta`` the weight on ``(0, 1)`` is ``omega = p + beta p'``.
On the open unit interval both have the exponential form

    p(x)  = (e^x + e^(1-x)) / (2(e-1)),
    p'(x) = (e^x - e^(1-x)) / (2(e-1)),

which is what the evaluators below use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

E = math.e
BETA_MAX = (E + 1.0) / (E - 1.0)
"""Largest |beta| for which ``p + beta p'`` stays non-negative, i.e. coth(1/2)."""

_SINH_HALF = math.sinh(0.5)
_LIMIT_SCALE = 2.0 * E / (E - 1.0) ** 2
_ADMISSIBLE_TOL = 1e-12


class InadmissibleWeightError(ValueError):
    """Raised when ``|beta| > (e+1)/(e-1)``: the weight changes sign."""


def _frac(x):
    return x - np.floor(x)


def eval_p(x):
    """Value of the periodic kernel ``p`` (scalar or array)."""
    x = np.asarray(x, dtype=float)
    out = np.cosh(_frac(x) - 0.5) / (2.0 * _SINH_HALF)
    return float(out) if out.ndim == 0 else out


def eval_p_prime(x):
    """Classical derivative of ``p`` away from the integers.

    Raises
    ------
    ValueError
        If any ``x`` is an integer, where ``p'`` jumps from 1/2 to -1/2.
    """
    x = np.asarray(x, dtype=float)
    r = _frac(x)
    if np.any(r == 0.0):
        raise ValueError("derivative undefined at lattice points")
    out = np.sinh(r - 0.5) / (2.0 * _SINH_HALF)
    return float(out) if out.ndim == 0 else out


def p_prime_limit(n: int, side: str) -> float:
    """One-sided limit of ``p'`` at the integer ``n`` (``side`` is ``'+'`` or ``'-'``)."""
    if side == "+":
        return -0.5
    if side == "-":
        return 0.5
    raise ValueError(f"side must be '+' or '-', got {side!r}")


@dataclass(frozen=True)
class WeightSpec:
    """Weight ``omega = p + beta p'`` restricted to ``(0, 1)``."""

    beta: float

    @property
    def admissible(self) -> bool:
        return abs(self.beta) <= BETA_MAX + _ADMISSIBLE_TOL

    @property
    def is_limit(self) -> bool:
        """True at ``beta = +-(e+1)/(e-1)``, where the weight vanishes at an endpoint."""
        return abs(abs(self.beta) - BETA_MAX) <= _ADMISSIBLE_TOL

    def __call__(self, x):
        return weight_values(self.beta, x)

    def derivative(self, x):
        return weight_derivative(self.beta, x)

    def endpoint(self, side: int) -> float:
        """Limit of the weight at ``x = 0+`` (``side=0``) or ``x = 1-`` (``side=1``)."""
        return float(weight_values(self.beta, float(side)))


def weight_values(beta: float, x):
    """``p + beta p'`` on ``[0, 1]`` using the exponential form (endpoints are one-sided limits).

    No admissibility check; at the limit betas the sinh form is used so the
    vanishing endpoint is exactly zero.
    """
    x = np.asarray(x, dtype=float)
    if abs(beta - BETA_MAX) <= _ADMISSIBLE_TOL:
        out = _LIMIT_SCALE * np.sinh(x)
    elif abs(beta + BETA_MAX) <= _ADMISSIBLE_TOL:
        out = _LIMIT_SCALE * np.sinh(1.0 - x)
    else:
        out = ((1.0 + beta) * np.exp(x) + (1.0 - beta) * np.exp(1.0 - x)) / (2.0 * (E - 1.0))
    return float(out) if out.ndim == 0 else out


def weight_derivative(beta: float, x):
    """``d/dx (p + beta p')`` on ``[0, 1]``; equals ``p' + beta p``."""
    x = np.asarray(x, dtype=float)
    if abs(beta - BETA_MAX) <= _ADMISSIBLE_TOL:
        out = _LIMIT_SCALE * np.cosh(x)
    elif abs(beta + BETA_MAX) <= _ADMISSIBLE_TOL:
        out = -_LIMIT_SCALE * np.cosh(1.0 - x)
    else:
        out = ((1.0 + beta) * np.exp(x) - (1.0 - beta) * np.exp(1.0 - x)) / (2.0 * (E - 1.0))
    return float(out) if out.ndim == 0 else out


def eval_weight(spec: WeightSpec, x):
    """Evaluate ``omega`` for an admissible weight at points of ``(0, 1)``."""
    if not spec.admissible:
        raise InadmissibleWeightError(
            f"weight changes sign: |beta|={abs(spec.beta):.6g} > (e+1)/(e-1)"
        )
    xa = np.asarray(x, dtype=float)
    if np.any((xa <= 0.0) | (xa >= 1.0)):
        raise ValueError("weight is evaluated on the open interval (0, 1)")
    return spec(x)


def weight_mass(beta: float, k: int = 12) -> float:
    """Composite Simpson estimate of ``int_0^1 omega`` on ``2**k + 1`` points."""
    x = np.linspace(0.0, 1.0, 2**k + 1)
    return float(simpson(weight_values(beta, x), x=x))


def periodic_grid(n: int) -> np.ndarray:
    """Uniform grid ``j/n``, ``j = 0..n-1`` on the unit circle."""
    return np.arange(n) / n


def _check_grid_size(n: int) -> None:
    if n < 8 or n & (n - 1):
        raise ValueError(f"grid size must be a power of two >= 8, got {n}")


def convolve_periodic(f, kernel: str = "p") -> np.ndarray:
    """Spectral evaluation of ``p * f`` or ``p' * f`` for samples on ``periodic_grid(n)``.

    The Fourier multiplier of ``p`` is ``1 / (1 + 4 pi^2 k^2)``; ``p'`` adds the
    factor ``2 pi i k`` (Nyquist mode dropped, as usual for odd derivatives).
    """
    f = np.asarray(f, dtype=float)
    n = f.size
    _check_grid_size(n)
    k = np.fft.rfftfreq(n, d=1.0 / n)
    mult = 1.0 / (1.0 + (2.0 * np.pi * k) ** 2)
    if kernel == "p":
        pass
    elif kernel in ("p_prime", "p'"):
        mult = mult * (2j * np.pi * k)
        mult[-1] = 0.0
    else:
        raise ValueError(f"unknown kernel {kernel!r}")
    return np.fft.irfft(np.fft.rfft(f) * mult, n)


def convolve_weight(beta: float, f) -> np.ndarray:
    """``(p + beta p') * f`` on the periodic grid."""
    return convolve_periodic(f, "p") + beta * convolve_periodic(f, "p_prime")
