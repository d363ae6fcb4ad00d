"""The minimisation problem behind the convolution estimate.

For real ``alpha`` and ``beta`` let

    I(alpha, beta) = inf { int_0^1 omega (alpha u^2 + u_x^2) : u(0) = u(1) = 1 },

with ``omega = p + beta p'``.  Writing ``u = 1 + v`` reduces it to a quadratic
problem in ``H^1_0`` whose Euler-Lagrange equation is

    (omega v')' - alpha omega v = alpha omega,   v(0) = v(1) = 0,

and whose minimum equals the boundary flux ``omega(1) v'(1-) - omega(0) v'(0+)``.

Closed forms exist for ``beta = 1``, for the limit weights
``|beta| = (e+1)/(e-1)`` and for ``alpha = 2``; everything else goes through a
conservative finite-difference discretisation with one Richardson level.
"""

from __future__ import annotations

import cmath
import functools
import math
import os
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad
from scipy.linalg import eigh_tridiagonal, solve_banded

from .kernel import BETA_MAX, E, InadmissibleWeightError, WeightSpec, convolve_weight, weight_derivative, weight_values
from .legendre import COSH1, complex_mu, find_alpha0, legendre_series

METHOD_BETA1 = "closed-form-beta1"
METHOD_LIMIT = "closed-form-limit"
METHOD_ALPHA2 = "closed-form-alpha2"
METHOD_FD = "finite-difference"

DEFAULT_GRID = 4096
SAMPLES = 257

_COSH_HALF = math.cosh(0.5)
_SINH_HALF = math.sinh(0.5)
_BETA_TOL = 1e-12


def default_grid() -> int:
    """FD grid size, overridable through ``RODWAVES_GRID``."""
    raw = os.environ.get("RODWAVES_GRID")
    if raw is None:
        return DEFAULT_GRID
    n = int(raw)
    if n < 64:
        raise ValueError(f"RODWAVES_GRID must be >= 64, got {n}")
    return n


class ThresholdWarning(UserWarning):
    """alpha lies within 1e-6 of the finiteness threshold ``-1/C(beta)``."""


@dataclass(frozen=True)
class MinProblem:
    alpha: float
    beta: float


@dataclass
class MinResult:
    """Value of ``I(alpha, beta)`` with an optional sampled minimiser ``u = 1 + v``.

    ``value`` is ``-inf`` when the functional is unbounded below; ``bounded``
    is the tag to test rather than comparing floats.
    """

    value: float
    method: str
    error_estimate: float = 0.0
    x: Optional[np.ndarray] = field(default=None, repr=False)
    minimizer: Optional[np.ndarray] = field(default=None, repr=False)
    lambda_min: Optional[float] = None
    warning: Optional[str] = None

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.value)

    def reflected(self) -> "MinResult":
        """Result for ``-beta``: same value, minimiser mirrored by ``x -> 1 - x``."""
        mini = None if self.minimizer is None else self.minimizer[::-1].copy()
        return MinResult(self.value, self.method, self.error_estimate, self.x, mini,
                         self.lambda_min, self.warning)

    def to_dict(self, include_minimizer: bool = False) -> dict:
        out = {
            "bounded": self.bounded,
            "value": self.value,
            "method": self.method,
            "error_estimate": self.error_estimate,
            "lambda_min": self.lambda_min,
            "warning": self.warning,
        }
        if include_minimizer and self.minimizer is not None:
            out["x"] = self.x.tolist()
            out["minimizer"] = self.minimizer.tolist()
        return out


@dataclass(frozen=True)
class PoincareConstant:
    beta: float
    C: float
    lambda_min: float
    error_estimate: float = 0.0


def _unbounded(method: str, lambda_min: Optional[float] = None) -> MinResult:
    return MinResult(-math.inf, method, 0.0, lambda_min=lambda_min)


def _is_limit(beta: float) -> bool:
    return abs(abs(beta) - BETA_MAX) <= _BETA_TOL


def _sinh_ratio(m: complex, x):
    """``sinh(m x) / sinh(m)``, continuous through ``m = 0``."""
    if abs(m) < 1e-4:
        m2 = m * m
        return x * (1.0 + m2 * (x * x - 1.0) / 6.0)
    return np.sinh(m * x) / cmath.sinh(m)


# ---------------------------------------------------------------------------
# closed forms


def closed_form_I_beta1(alpha: float, n_samples: int = SAMPLES) -> MinResult:
    """``I(alpha, 1) = -1/2 + mu (cosh(1/2) cosh(mu) - 1) / (sinh(1/2) sinh(mu))``.

    ``mu = sqrt(1 + 4 alpha)/2``; the removable singularity at ``alpha = -1/4``
    is handled by a second-order Taylor branch for ``|mu| < 1e-4``.  Below
    ``alpha = -1/4 - pi^2`` the value is ``-inf``.
    """
    if alpha <= -0.25 - math.pi**2:
        return _unbounded(METHOD_BETA1)
    m = complex_mu(alpha)
    if abs(m) < 1e-4:
        m2 = (1.0 + 4.0 * alpha) / 4.0
        val = -0.5 + ((_COSH_HALF - 1.0) + m2 * (_COSH_HALF / 2.0 - (_COSH_HALF - 1.0) / 6.0)) / _SINH_HALF
    else:
        z = m * (_COSH_HALF * cmath.cosh(m) - 1.0) / (_SINH_HALF * cmath.sinh(m))
        val = -0.5 + z.real
    x = np.linspace(0.0, 1.0, n_samples)
    u = (math.sqrt(E) * _sinh_ratio(m, x) + _sinh_ratio(m, 1.0 - x)) / np.exp(x / 2.0)
    return MinResult(float(val), METHOD_BETA1, 0.0, x, np.real(u).astype(float))


def closed_form_I_limit(alpha: float, n_samples: int = SAMPLES) -> MinResult:
    """``I(alpha, (e+1)/(e-1)) = (e+1)^2/(2e) * P'_nu/P_nu (cosh 1)``.

    Finite only for ``alpha > alpha0``.  The minimiser is
    ``P_nu(cosh x) / P_nu(cosh 1)``; only its right endpoint is pinned to 1.
    """
    a0 = find_alpha0()
    if alpha <= a0:
        return _unbounded(METHOD_LIMIT)
    p1, dp1, _ = legendre_series(alpha, COSH1)
    val = (E + 1.0) ** 2 / (2.0 * E) * dp1 / p1
    x = np.linspace(0.0, 1.0, n_samples)
    u = np.array([legendre_series(alpha, math.cosh(xi))[0] for xi in x]) / p1
    return MinResult(float(val), METHOD_LIMIT, 0.0, x, u)


def _inv_cube_series(B: float, y: float, terms: int = 40) -> float:
    # antiderivative of 8 y^2/(y^2+B)^3 expanded in B, |B| < y^2
    s = 0.0
    for n in range(terms):
        coef = 8.0 * (n + 1) * (n + 2) / 2.0 * (-B) ** n
        s += coef * y ** (-3 - 2 * n) / (-3 - 2 * n)
    return s


def _inv_cube_antiderivative(B: float, y: float) -> float:
    """An antiderivative of ``8 y^2 / (y^2 + B)^3`` in ``y``.

    Three branches by the sign of ``B``; near ``B = 0`` the closed forms
    cancel badly, so a power series in ``B`` is used for ``|B| < 1e-2``.
    """
    if B == 0.0:
        return -8.0 / (3.0 * y**3)
    if abs(B) < 1e-2:
        return _inv_cube_series(B, y)
    rational = y / (B * (y * y + B)) - 2.0 * y / (y * y + B) ** 2
    if B > 0.0:
        rb = math.sqrt(B)
        return rational + math.atan(y / rb) / (B * rb)
    c = math.sqrt(-B)
    return rational + math.log((y - c) / (y + c)) / (2.0 * c * B)


def inverse_cube_integral(beta: float, x: float = 1.0) -> float:
    """``int_0^x omega^{-3}`` for ``0 <= beta < (e+1)/(e-1)`` via ``y = e^x``.

    ``omega(x) = (1+beta)(y^2 + B) / (2(e-1) y)`` with ``B = e(1-beta)/(1+beta)``.
    """
    B = E * (1.0 - beta) / (1.0 + beta)
    scale = ((E - 1.0) / (1.0 + beta)) ** 3
    return scale * (_inv_cube_antiderivative(B, math.exp(x)) - _inv_cube_antiderivative(B, 1.0))


def _alpha2_coefficients(beta: float):
    w0, w1 = weight_values(beta, 0.0), weight_values(beta, 1.0)
    d0, d1 = weight_derivative(beta, 0.0), weight_derivative(beta, 1.0)
    K1 = inverse_cube_integral(beta, 1.0)
    # v = -1 + lam*omega_x + mu*(2 omega_x K + omega^-2), K(x) = int_0^x omega^-3
    A = np.array([[d0, 1.0 / w0**2], [d1, 2.0 * d1 * K1 + 1.0 / w1**2]])
    lam, mu = np.linalg.solve(A, np.ones(2))
    return lam, mu, w0, w1, K1


def closed_form_I2(beta: float, n_samples: int = SAMPLES) -> MinResult:
    """Explicit ``I(2, beta)`` for ``0 <= beta <= (e+1)/(e-1)``.

    Uses ``omega'' = omega``: the homogeneous equation has the solutions
    ``omega_x`` and ``2 omega_x K + omega^{-2}`` with ``K = int_0^x omega^{-3}``,
    so ``v' = omega (lam + 2 mu K)`` and the flux value is
    ``omega(1)^2 (lam + 2 mu K(1)) - omega(0)^2 lam``.
    """
    if not (-_BETA_TOL <= beta <= BETA_MAX + _BETA_TOL):
        raise ValueError(f"closed_form_I2 needs 0 <= beta <= (e+1)/(e-1), got {beta}")
    x = np.linspace(0.0, 1.0, n_samples)
    if _is_limit(beta):
        val = (E + 1.0) ** 2 / (E * E + 1.0)
        return MinResult(val, METHOD_ALPHA2, 0.0, x, np.cosh(x) / math.cosh(1.0))
    beta = max(beta, 0.0)
    lam, mu, w0, w1, K1 = _alpha2_coefficients(beta)
    val = w1**2 * (lam + 2.0 * mu * K1) - w0**2 * lam
    K = np.array([inverse_cube_integral(beta, xi) for xi in x])
    w, dw = weight_values(beta, x), weight_derivative(beta, x)
    u = lam * dw + mu * (2.0 * dw * K + 1.0 / w**2)
    return MinResult(float(val), METHOD_ALPHA2, 0.0, x, u)


# ---------------------------------------------------------------------------
# weighted eigenvalue problem


def _stiffness(weight: Callable, n: int):
    h = 1.0 / n
    xm = (np.arange(n) + 0.5) * h
    return np.asarray(weight(xm), dtype=float) / h**2, h


def weighted_dirichlet_eigenvalue(weight: Callable, n: int, natural: Optional[str] = None) -> float:
    """Smallest ``lambda`` of ``-(omega v')' = lambda omega v`` by conservative FD.

    Dirichlet conditions at both ends unless ``natural`` is ``'left'`` or
    ``'right'``, used when the weight vanishes at that end.
    """
    wm, h = _stiffness(weight, n)
    x = np.arange(n + 1) * h
    wx = np.asarray(weight(x), dtype=float)
    diag = wm[:-1] + wm[1:]
    off = -wm[1:-1]
    mass = wx[1:-1].copy()
    if natural == "left":
        # unknown at x=0, half cell [0, h/2]
        m0 = quad(weight, 0.0, h / 2.0)[0] / h
        diag = np.concatenate([[wm[0]], diag])
        off = np.concatenate([[-wm[0]], off])
        mass = np.concatenate([[m0], mass])
    elif natural == "right":
        mN = quad(weight, 1.0 - h / 2.0, 1.0)[0] / h
        diag = np.concatenate([diag, [wm[-1]]])
        off = np.concatenate([off, [-wm[-1]]])
        mass = np.concatenate([mass, [mN]])
    elif natural is not None:
        raise ValueError(f"natural must be None, 'left' or 'right', got {natural!r}")
    s = 1.0 / np.sqrt(mass)
    d = diag * s * s
    e = off * s[:-1] * s[1:]
    lam = eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, 0))
    return float(lam[0])


def richardson_eigenvalue(weight: Callable, n: int, natural: Optional[str] = None):
    """Richardson-extrapolated eigenvalue from grids ``n`` and ``2n``; returns (lambda, error)."""
    l1 = weighted_dirichlet_eigenvalue(weight, n, natural)
    l2 = weighted_dirichlet_eigenvalue(weight, 2 * n, natural)
    return (4.0 * l2 - l1) / 3.0, abs(l2 - l1) / 3.0


@functools.lru_cache(maxsize=256)
def _poincare_cached(beta: float, n: int) -> PoincareConstant:
    spec = WeightSpec(beta)
    natural = None
    if _is_limit(beta):
        natural = "left" if beta > 0 else "right"
    lam, err = richardson_eigenvalue(spec, n, natural)
    return PoincareConstant(beta, 1.0 / lam, lam, err / lam**2)


def poincare_best_constant(beta: float, n: int = 2048) -> PoincareConstant:
    """Best constant ``C(beta)`` in ``int omega v^2 <= C int omega v_x^2``.

    ``C = 1/lambda_min`` from FD eigenvalues at ``n`` and ``2n`` points,
    Richardson-extrapolated.  At the limit weights the vanishing end carries
    no boundary condition.
    """
    spec = WeightSpec(beta)
    if not spec.admissible:
        raise ValueError(f"weight changes sign: |beta|={abs(beta):.6g} > (e+1)/(e-1)")
    return _poincare_cached(float(beta), int(n))


# ---------------------------------------------------------------------------
# finite differences


def _fd_tridiagonal(alpha: float, beta: float, n: int):
    wm, h = _stiffness(WeightSpec(beta), n)
    x = np.linspace(0.0, 1.0, n + 1)
    wi = weight_values(beta, x)
    main = wm[:-1] + wm[1:] + alpha * wi[1:-1]
    off = -wm[1:-1]
    return x, wi, wm, main, off, h


def fd_matrix(alpha: float, beta: float, n: int):
    """Dense interior matrix and right-hand side of the FD scheme (for oracles and tests)."""
    x, wi, wm, main, off, h = _fd_tridiagonal(alpha, beta, n)
    A = np.diag(main) + np.diag(off, 1) + np.diag(off, -1)
    rhs = -alpha * wi[1:-1]
    return A, rhs


def _fd_single(alpha: float, beta: float, n: int):
    """Solve the scheme on ``n + 1`` nodes; returns (x, v, flux value, energy value).

    For the limit weight ``beta = (e+1)/(e-1)`` the weight vanishes at
    ``x = 0``; that node becomes a free unknown with a half-cell mass
    (natural boundary condition) and contributes no flux.
    """
    x, wi, wm, main, off, h = _fd_tridiagonal(alpha, beta, n)
    free = _is_limit(beta)
    mass = wi.copy()
    if free:
        mass[0] = quad(WeightSpec(beta), 0.0, h / 2.0)[0] / h
        main = np.concatenate([[wm[0] + alpha * mass[0]], main])
        off = np.concatenate([[-wm[0]], off])
    rhs = -alpha * (mass[:-1] if free else mass[1:-1])
    m = rhs.size
    ab = np.zeros((3, m))
    ab[0, 1:] = off
    ab[1] = main
    ab[2, :-1] = off
    v = np.zeros(n + 1)
    if free:
        v[:-1] = solve_banded((1, 1), ab, rhs)
    else:
        v[1:-1] = solve_banded((1, 1), ab, rhs)
    dv0 = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
    dv1 = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * h)
    flux = wi[-1] * dv1 - (0.0 if free else wi[0] * dv0)
    u = 1.0 + v
    trap = np.full(n + 1, h)
    trap[[0, -1]] = h / 2.0
    wq = trap * wi
    if free:
        wq[0] = h * mass[0]
    energy = float(np.sum(wm * np.diff(u) ** 2) * h + alpha * np.sum(wq * u * u))
    return x, v, float(flux), energy


def solve_EL_fd(problem: MinProblem, n: Optional[int] = None) -> MinResult:
    """``I(alpha, beta)`` by finite differences, limit weights included.

    Second-order conservative stencil with midpoint weights; the value is the
    boundary flux with one-sided second-order differences, cross-checked by
    the discrete functional itself.  Grids ``n`` and ``2n`` are combined as
    ``(4 V_2n - V_n)/3``.  Unbounded problems (alpha at or below
    ``-lambda_min(beta)``) return ``-inf`` with the eigenvalue attached.
    """
    alpha, beta = float(problem.alpha), float(problem.beta)
    n = default_grid() if n is None else int(n)
    if n < 64:
        raise ValueError(f"grid size must be >= 64, got {n}")
    if abs(beta) > BETA_MAX + _BETA_TOL:
        raise InadmissibleWeightError(f"weight changes sign: |beta|={abs(beta):.6g} > (e+1)/(e-1)")
    if beta < 0.0:
        return solve_EL_fd(MinProblem(alpha, -beta), n).reflected()
    lam = None
    warn = None
    if alpha < 0.0:
        lam = poincare_best_constant(beta).lambda_min
        if alpha < -lam + 1e-9:
            return _unbounded(METHOD_FD, lam)
        if alpha < -lam + 1e-6:
            warn = f"alpha within 1e-6 of -lambda_min={-lam:.9g}; ill-conditioned"
            warnings.warn(warn, ThresholdWarning, stacklevel=2)
    x1, v1, f1, e1 = _fd_single(alpha, beta, n)
    x2, v2, f2, e2 = _fd_single(alpha, beta, 2 * n)
    flux = (4.0 * f2 - f1) / 3.0
    energy = (4.0 * e2 - e1) / 3.0
    err = max(abs(f2 - f1) / 3.0, abs(flux - energy))
    # minimiser on the coarse nodes, extrapolated
    v = (4.0 * v2[::2] - v1) / 3.0
    return MinResult(flux, METHOD_FD, err, x1, 1.0 + v, lam, warn)


def eval_I(problem: MinProblem, n: Optional[int] = None) -> MinResult:
    """Dispatch to a closed form when one applies, else to :func:`solve_EL_fd`.

    Parity ``I(alpha, beta) = I(alpha, -beta)`` is applied first; negative
    ``beta`` gets the mirrored minimiser.
    """
    alpha, beta = float(problem.alpha), float(problem.beta)
    b = abs(beta)
    if b > BETA_MAX + _BETA_TOL:
        return _unbounded("inadmissible-beta")
    if _is_limit(b):
        res = closed_form_I_limit(alpha)
    elif b == 1.0:
        res = closed_form_I_beta1(alpha)
    elif alpha == 2.0:
        res = closed_form_I2(b)
    else:
        res = solve_EL_fd(MinProblem(alpha, b), n)
    return res.reflected() if beta < 0 else res


def I_value(alpha: float, beta: float, n: Optional[int] = None) -> float:
    return eval_I(MinProblem(alpha, beta), n).value


def el_residual(problem: MinProblem, result: MinResult) -> float:
    """Max-norm residual of ``(omega v')' - alpha omega (1 + v)`` at interior nodes.

    Uses the same conservative stencil on the grid the minimiser is sampled on.
    """
    x, u = result.x, result.minimizer
    h = x[1] - x[0]
    beta = problem.beta
    xm = 0.5 * (x[1:] + x[:-1])
    wm = weight_values(beta, xm)
    flux = wm * np.diff(u) / h
    res = np.diff(flux) / h - problem.alpha * weight_values(beta, x[1:-1]) * u[1:-1]
    return float(np.max(np.abs(res)))


def convolution_estimate_check(problem: MinProblem, u, ux=None) -> float:
    """``min_x [(p + beta p') * (alpha u^2 + u_x^2) - I(alpha, beta) u^2]`` on the grid.

    ``u`` is sampled on ``periodic_grid(n)``; ``u_x`` is taken spectrally
    unless supplied (pass it for piecewise-smooth data).  Non-negative up to
    discretisation error.
    """
    res = eval_I(problem)
    if not res.bounded:
        raise ValueError("I(alpha, beta) = -inf: the convolution estimate has no finite constant")
    u = np.asarray(u, dtype=float)
    n = u.size
    if ux is None:
        k = np.fft.rfftfreq(n, d=1.0 / n)
        dk = 2j * np.pi * k
        dk[-1] = 0.0
        ux = np.fft.irfft(np.fft.rfft(u) * dk, n)
    F = problem.alpha * u * u + np.asarray(ux, dtype=float) ** 2
    conv = convolve_weight(problem.beta, F)
    return float(np.min(conv - res.value * u * u))
