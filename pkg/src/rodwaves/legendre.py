"""Legendre functions of the first kind with complex degree.

``P_nu(z)`` is summed from its hypergeometric series ``2F1(-nu, nu+1; 1; (1-z)/2)``,
valid for ``|(1-z)/2| < 1``.  Gamma-function ratios are never formed: the
coefficients follow the term-ratio recurrence

    c_{k+1} = c_k (k - nu)(k + nu + 1) / (k + 1)^2,

which is entire in ``nu``.  Only real ``alpha = nu(nu+1)`` is used, so every
coefficient is real up to round-off.
"""

from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass

import numpy as np

from .roots import newton_bisect

COSH1 = math.cosh(1.0)
MAX_TERMS = 500
REL_TOL = 1e-14
IMAG_TOL = 1e-10


def _upper_sqrt(w: complex) -> complex:
    r = cmath.sqrt(complex(w))
    if r.imag < 0.0 or (r.imag == 0.0 and r.real < 0.0):
        r = -r
    return r


def complex_mu(alpha: float) -> complex:
    """``sqrt(1 + 4 alpha) / 2`` in the closed upper half-plane."""
    return 0.5 * _upper_sqrt(complex(1.0 + 4.0 * alpha, 0.0))


def degree(alpha: float) -> complex:
    """``nu(alpha) = -1/2 + sqrt(1 + 4 alpha)/2``, so that ``nu (nu + 1) = alpha``."""
    return -0.5 + complex_mu(alpha)


@dataclass(frozen=True)
class ComplexDegree:
    alpha: float

    @property
    def nu(self) -> complex:
        return degree(self.alpha)


def _as_degree(deg) -> ComplexDegree:
    if isinstance(deg, ComplexDegree):
        return deg
    return ComplexDegree(float(deg))


def _check_domain(z: float) -> float:
    w = 0.5 - 0.5 * z
    if not abs(w) < 1.0:
        raise ValueError(f"z={z} outside the convergence disc |1/2 - z/2| < 1")
    return w


def legendre_series(deg, z: float, *, keep_imag: bool = False):
    """Return ``(P, dP/dz, d2P/dz2)`` at real ``z`` from the hypergeometric series.

    Each of the three sums is truncated once its current term falls below
    ``1e-14`` times the largest partial sum seen so far (hard cap 500 terms).
    With ``keep_imag`` the raw complex sums are returned; otherwise the
    imaginary parts are checked to be below ``1e-10`` and dropped.
    """
    d = _as_degree(deg)
    nu = d.nu
    w = _check_domain(z)
    c = 1.0 + 0.0j
    sums = [c, 0j, 0j]
    scale = [1.0, 0.0, 0.0]
    done = [False, False, False]
    wpow = [1.0, 0.0, 0.0]  # w**k, w**(k-1), w**(k-2) for the current k
    for k in range(1, MAX_TERMS):
        c = c * (k - 1 - nu) * (k + nu) / (k * k)
        wpow = [wpow[0] * w, wpow[0], wpow[1]] if k > 1 else [w, 1.0, 0.0]
        terms = (
            c * wpow[0],
            -0.5 * k * c * wpow[1],
            0.25 * k * (k - 1) * c * wpow[2],
        )
        for j, t in enumerate(terms):
            if done[j]:
                continue
            sums[j] += t
            scale[j] = max(scale[j], abs(sums[j]))
            if abs(t) < REL_TOL * scale[j] and k > 2:
                done[j] = True
        if c == 0 or all(done):
            break
    if keep_imag:
        return tuple(sums)
    for s, sc in zip(sums, scale):
        if abs(s.imag) > IMAG_TOL * max(1.0, sc):
            raise ArithmeticError(f"non-real Legendre sum {s!r} for alpha={d.alpha}")
    return tuple(s.real for s in sums)


def legendre_P(deg, z: float) -> float:
    """``P_nu(z)`` for ``nu = nu(alpha)``; ``deg`` is a ComplexDegree or a real alpha."""
    return legendre_series(deg, z)[0]


def legendre_P_dz(deg, z: float) -> float:
    """``dP_nu/dz`` by termwise differentiation of the same series."""
    return legendre_series(deg, z)[1]


def legendre_P_d2z(deg, z: float) -> float:
    return legendre_series(deg, z)[2]


def legendre_ratio_cosh1(alpha: float) -> float:
    """``P'_nu(cosh 1) / P_nu(cosh 1)``."""
    p, dp, _ = legendre_series(alpha, COSH1)
    return dp / p


def p_at_cosh1(alpha: float) -> float:
    return legendre_series(alpha, COSH1)[0]


@functools.lru_cache(maxsize=None)
def find_alpha0() -> float:
    """Largest zero of ``alpha -> P_nu(alpha)(cosh 1)``.

    Coarse scan of ``[-10, 0]`` with step 0.05 from the right, then a
    Newton/bisection polish (slope by central differences, step 1e-6).
    """
    grid = np.round(np.arange(0.0, -10.0 - 1e-12, -0.05), 12)
    vals = [p_at_cosh1(a) for a in grid]
    for i in range(1, len(grid)):
        if vals[i] == 0.0:
            return float(grid[i])
        if np.sign(vals[i]) != np.sign(vals[i - 1]):
            return newton_bisect(
                p_at_cosh1, float(grid[i]), float(grid[i - 1]), xtol=1e-14, ftol=1e-12
            )
    raise RuntimeError("no sign change of P_nu(alpha)(cosh 1) on [-10, 0]")
