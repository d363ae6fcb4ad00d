"""Blowup thresholds ``beta_gamma`` and the constants that delimit where they are finite.

With ``alpha = (3 - gamma)/gamma``,

    beta_gamma = inf { beta >= 0 : beta^2 + I(alpha, beta) - alpha >= 0 },

and ``+inf`` when the set is empty.  Only ``0 <= beta <= (e+1)/(e-1)`` can
qualify since ``I = -inf`` beyond.  Infinite thresholds are reported as
``None`` with ``finite = False``, never as a float sentinel.
"""

from __future__ import annotations

import cmath
import functools
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .kernel import BETA_MAX, E
from .legendre import complex_mu, find_alpha0, legendre_ratio_cosh1
from .roots import newton_bisect
from .variational import I_value, closed_form_I_beta1, closed_form_I_limit

SCAN_POINTS = 64
BETA_TOL = 1e-9


def alpha_of_gamma(gamma: float) -> float:
    if gamma == 0:
        raise ValueError(
            "gamma = 0 is the BBM case: all solutions are global and the blowup "
            "scenario is never fulfilled"
        )
    return (3.0 - gamma) / gamma


def gamma_of_alpha(alpha: float) -> float:
    return 3.0 / (1.0 + alpha)


@dataclass(frozen=True)
class GammaParams:
    gamma: float

    @property
    def alpha(self) -> float:
        return alpha_of_gamma(self.gamma)


@dataclass
class BetaGammaResult:
    gamma: Optional[float]
    alpha: float
    beta_gamma: Optional[float]
    method: str
    bracket: Optional[tuple] = None

    @property
    def finite(self) -> bool:
        return self.beta_gamma is not None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["finite"] = self.finite
        d["bracket"] = list(self.bracket) if self.bracket else None
        return d


@dataclass(frozen=True)
class CriticalConstants:
    alpha0: float
    alpha1_minus: float
    alpha1_plus: float
    alpha2_minus: float
    alpha2_plus: float

    @property
    def gamma1_minus(self) -> float:
        return gamma_of_alpha(self.alpha1_minus)

    @property
    def gamma1_plus(self) -> float:
        return gamma_of_alpha(self.alpha1_plus)

    @property
    def gamma2_minus(self) -> float:
        return gamma_of_alpha(self.alpha2_minus)

    @property
    def gamma2_plus(self) -> float:
        return gamma_of_alpha(self.alpha2_plus)

    def to_dict(self) -> dict:
        d = asdict(self)
        for name in ("gamma1_minus", "gamma1_plus", "gamma2_minus", "gamma2_plus"):
            d[name] = getattr(self, name)
        return d


def threshold_function(alpha: float, beta: float, n: Optional[int] = None) -> float:
    """``beta^2 + I(alpha, beta) - alpha`` (``-inf`` where I is unbounded)."""
    return beta * beta + I_value(alpha, beta, n) - alpha


class _Cached:
    def __init__(self, alpha: float, n: Optional[int]):
        self.alpha, self.n, self.memo = alpha, n, {}

    def __call__(self, beta: float) -> float:
        key = float(beta)
        if key not in self.memo:
            self.memo[key] = threshold_function(self.alpha, key, self.n)
        return self.memo[key]


def _first_crossing(g: _Cached, points: int):
    betas = np.linspace(0.0, BETA_MAX, points)
    vals = [g(b) for b in betas]
    if vals[0] >= 0.0:
        return 0.0, (0.0, 0.0)
    for i in range(1, points):
        if vals[i] >= 0.0:
            lo, hi = float(betas[i - 1]), float(betas[i])
            root = newton_bisect(g, lo, hi, xtol=BETA_TOL, ftol=1e-13)
            return root, (lo, hi)
    # a narrow positive bump between grid nodes, typically just below the limit weight
    i = int(np.argmax(vals))
    lo, hi = float(betas[max(i - 1, 0)]), float(betas[min(i + 1, points - 1)])
    hi = min(hi, BETA_MAX * (1.0 - 1e-12))
    opt = minimize_scalar(lambda b: -g(b), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-10})
    if -opt.fun >= 0.0:
        root = newton_bisect(g, lo, float(opt.x), xtol=BETA_TOL, ftol=1e-13)
        return root, (lo, float(opt.x))
    return None, None


def beta_threshold(alpha: float, n: Optional[int] = None, gamma: Optional[float] = None,
                   points: int = SCAN_POINTS) -> BetaGammaResult:
    """``beta_gamma`` as a function of ``alpha``.

    Grid scan of ``g = beta^2 + I - alpha`` on ``[0, (e+1)/(e-1)]``, the first
    sign change refined to 1e-9.  The grid is doubled while consecutive
    refinements disagree by more than 1e-4.
    """
    if alpha <= find_alpha0():
        return BetaGammaResult(gamma, alpha, None, "root-find")
    g = _Cached(alpha, n)
    root, bracket = _first_crossing(g, points)
    while points < 1024:
        points = 2 * points - 1
        root2, bracket2 = _first_crossing(g, points)
        same = (root is None and root2 is None) or (
            root is not None and root2 is not None and abs(root - root2) <= 1e-4)
        root, bracket = root2, bracket2
        if same:
            break
    return BetaGammaResult(gamma, alpha, root, "root-find", bracket)


def compute_beta_gamma(gamma: float, n: Optional[int] = None) -> BetaGammaResult:
    """Blowup threshold for the rod parameter ``gamma`` (``gamma != 0``)."""
    alpha = alpha_of_gamma(gamma)
    return beta_threshold(alpha, n, gamma=float(gamma))


@functools.lru_cache(maxsize=None)
def compute_critical_constants() -> CriticalConstants:
    """``alpha0``, ``alpha1+-`` (limit weight) and ``alpha2+-`` (``beta = 1``).

    ``h1(alpha) = ((e+1)/(e-1))^2 + I(alpha, limit) - alpha`` and
    ``h2(alpha) = 1 + I(alpha, 1) - alpha`` are concave, positive at 0 and
    negative far out on both sides; each has one zero per side.
    """
    a0 = find_alpha0()

    def h1(a):
        return BETA_MAX**2 + closed_form_I_limit(a, n_samples=2).value - a

    def h2(a):
        return 1.0 + closed_form_I_beta1(a, n_samples=2).value - a

    def bracket_left(h, lo_edge):
        a = -0.5
        while h(a) > 0.0:
            a = lo_edge + 0.5 * (a - lo_edge)
        return a

    def bracket_right(h):
        a = 1.0
        while h(a) > 0.0:
            a *= 2.0
        return a

    a1m = newton_bisect(h1, bracket_left(h1, a0), 0.0, xtol=1e-12, ftol=1e-10)
    a1p = newton_bisect(h1, 0.0, bracket_right(h1), xtol=1e-12, ftol=1e-10)
    edge2 = -0.25 - math.pi**2
    a2m = newton_bisect(h2, bracket_left(h2, edge2), 0.0, xtol=1e-12, ftol=1e-10)
    a2p = newton_bisect(h2, 0.0, bracket_right(h2), xtol=1e-12, ftol=1e-10)
    return CriticalConstants(a0, a1m, a1p, a2m, a2p)


def _I_beta1_gamma_form(gamma: float) -> complex:
    mu = complex_mu(alpha_of_gamma(gamma))
    # mu / sinh(mu) -> 1 at gamma = 4 (alpha = -1/4)
    ratio = 1.0 / (1.0 + mu * mu / 6.0) if abs(mu) < 1e-4 else mu / cmath.sinh(mu)
    return ratio * (math.cosh(0.5) * cmath.cosh(mu) - 1.0) / math.sinh(0.5)


def beta_gamma_upper_bound(gamma: float) -> Optional[float]:
    """Analytic upper bound for ``beta_gamma``; ``None`` inside ``(gamma1-, gamma1+)``.

    Outside ``(gamma2-, gamma2+)`` this is
    ``sqrt(3/gamma - 1/2 - mu (cosh(1/2) cosh mu - 1)/(sinh(1/2) sinh mu))``;
    in the two gaps between ``gamma1`` and ``gamma2`` it is the root in
    ``[1, (e+1)/(e-1)]`` of ``beta^2 + b beta + c`` from the piecewise-affine
    lower bound for I.
    """
    cc = compute_critical_constants()
    alpha = alpha_of_gamma(gamma)
    if cc.gamma1_minus < gamma < cc.gamma1_plus:
        return None
    if gamma <= cc.gamma2_minus or gamma >= cc.gamma2_plus:
        z = 3.0 / gamma - 0.5 - _I_beta1_gamma_form(gamma)
        if abs(z.imag) > 1e-10:
            raise ArithmeticError(f"non-real radicand {z!r}")
        return math.sqrt(max(z.real, 0.0))
    i1 = closed_form_I_beta1(alpha, n_samples=2).value
    il = (E + 1.0) ** 2 / (2.0 * E) * legendre_ratio_cosh1(alpha)
    b = (E - 1.0) / 2.0 * (il - i1)
    c = (E + 1.0) / 2.0 * i1 - (E - 1.0) / 2.0 * il - alpha
    return -b / 2.0 + 0.5 * math.sqrt(b * b - 4.0 * c)


def beta_infinity(n: Optional[int] = None):
    """``(value, bound)`` for the large-|gamma| limit, i.e. ``alpha = -1``."""
    value = beta_threshold(-1.0, n).beta_gamma
    r3 = math.sqrt(3.0) / 2.0
    bound = math.sqrt(
        math.sqrt(3.0) * (1.0 - math.cosh(0.5) * math.cos(r3)) / (2.0 * math.sinh(0.5) * math.sin(r3))
        - 0.5
    )
    return value, bound


def beta_gamma_nonperiodic(gamma: float) -> Optional[float]:
    """Threshold for data on the line; ``None`` (i.e. ``+inf``) outside ``[1, 4]``."""
    if not (1.0 <= gamma <= 4.0):
        return None
    rad = -0.5 + 3.0 / gamma - math.sqrt(12.0 - 3.0 * gamma) / (2.0 * math.sqrt(gamma))
    return math.sqrt(max(rad, 0.0))


def I_line(alpha: float, beta: float) -> float:
    """Line analogue of I: ``-1/2 + sqrt(1 + 4 alpha)/2`` for ``alpha >= -1/4``, ``|beta| <= 1``."""
    if alpha < -0.25 or abs(beta) > 1.0:
        return -math.inf
    return -0.5 + 0.5 * math.sqrt(1.0 + 4.0 * alpha)


# ---------------------------------------------------------------------------
# applicability region


def applicability_margin(alpha: float, n: Optional[int] = None, points: int = SCAN_POINTS) -> float:
    """``max_beta (beta^2 + I(alpha, beta) - alpha)`` over ``[0, (e+1)/(e-1)]``.

    ``beta_gamma`` is finite exactly when this is ``>= 0``.
    """
    if alpha <= find_alpha0():
        return -math.inf
    g = _Cached(alpha, n)
    betas = np.linspace(0.0, BETA_MAX, points)
    vals = np.array([g(b) for b in betas])
    i = int(np.argmax(vals))
    lo = float(betas[max(i - 1, 0)])
    hi = min(float(betas[min(i + 1, points - 1)]), BETA_MAX * (1.0 - 1e-12))
    opt = minimize_scalar(lambda b: -g(b), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-10})
    return float(max(vals.max(), -opt.fun))


@functools.lru_cache(maxsize=None)
def applicability_alpha_interval(n: Optional[int] = None) -> tuple:
    """Endpoints of the alpha-interval where ``beta_gamma < +inf``."""
    m = functools.partial(applicability_margin, n=n)
    left = newton_bisect(m, -5.5, -1.0, xtol=1e-6, ftol=1e-9)
    right = newton_bisect(m, 5.0, 12.0, xtol=1e-6, ftol=1e-9)
    return left, right


@dataclass
class ApplicabilityScan:
    rows: list
    alpha_interval: tuple
    gamma_left: float
    gamma_right: float

    def to_dict(self) -> dict:
        return {
            "rows": self.rows,
            "alpha_interval": list(self.alpha_interval),
            "gamma_endpoints": [self.gamma_left, self.gamma_right],
        }


def scan_applicability(gamma_min: float, gamma_max: float, step: float,
                       n: Optional[int] = None) -> ApplicabilityScan:
    """Finiteness of ``beta_gamma`` on a gamma grid plus the refined boundary points.

    The region is ``gamma <= gamma_left`` or ``gamma >= gamma_right`` with the
    endpoints mapped from the alpha-interval endpoints.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    a_lo, a_hi = applicability_alpha_interval(n)
    g_left, g_right = gamma_of_alpha(a_lo), gamma_of_alpha(a_hi)
    rows = []
    count = int(math.floor((gamma_max - gamma_min) / step + 1e-9)) + 1
    for j in range(count):
        gam = round(gamma_min + j * step, 12)
        if gam == 0.0:
            rows.append({"gamma": 0.0, "alpha": None, "finite": False, "margin": None})
            continue
        alpha = alpha_of_gamma(gam)
        margin = applicability_margin(alpha, n)
        rows.append({
            "gamma": gam,
            "alpha": alpha,
            "finite": bool(margin >= 0.0),
            "margin": margin if math.isfinite(margin) else None,
        })
    return ApplicabilityScan(rows, (a_lo, a_hi), g_left, g_right)


# ---------------------------------------------------------------------------
# published table of thresholds for rod materials; None marks "not applicable"

MATERIALS = (
    (-29.476, 0.326, 2e-3),
    (-4.891, 0.492, 1e-2),  # printed with a doubled decimal point, hence the looser check
    (-2.571, 0.684, 2e-3),
    (-1.646, 0.933, 2e-3),
    (-0.539, None, None),
    (1.010, 0.507, 2e-3),
    (1.236, 0.375, 2e-3),
    (1.700, 0.207, 2e-3),
    (2.668, 0.035, 2e-3),
    (3.417, 0.035, 2e-3),
)


def reproduce_materials(n: Optional[int] = None) -> list:
    rows = []
    for gamma, expected, tol in MATERIALS:
        res = compute_beta_gamma(gamma, n)
        if expected is None:
            ok = not res.finite
        else:
            ok = res.finite and abs(res.beta_gamma - expected) <= tol
        rows.append({
            "gamma": gamma,
            "expected": expected,
            "computed": res.beta_gamma,
            "finite": res.finite,
            "tolerance": tol,
            "pass": bool(ok),
        })
    return rows
