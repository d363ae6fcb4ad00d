"""Local-in-space wave-breaking criteria and the checks built around them.

For ``gamma > 0`` a datum triggers breaking when, at some ``x0``,

    u0'(x0) < -beta_gamma |u0(x0)|,

(with ``u0'`` replaced by ``-u0'`` for ``gamma < 0``), and then

    T* <= 2 / (|gamma| sqrt(u0'(x0)^2 - beta_gamma^2 u0(x0)^2)).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq, minimize_scalar

from .datum import InitialDatum
from .thresholds import beta_gamma_nonperiodic, compute_beta_gamma

SCAN_POINTS = 4096
BOUNDARY_TOL = 1e-9
REFINE_XTOL = 1e-10
N_REFINE = 5
DIVERGENCE_LEVEL = 1e10

TRIGGERED = "triggered"
NOT_TRIGGERED = "not-triggered"
BOUNDARY = "boundary"
NOT_APPLICABLE = "not-applicable"


@dataclass
class BlowupVerdict:
    status: str
    gamma: float
    domain: str
    beta_used: Optional[float]
    margin: Optional[float] = None
    witness_x0: Optional[float] = None
    tstar_bound: Optional[float] = None
    tstar_gamma3_display: Optional[float] = None
    note: str = ""

    @property
    def triggered(self) -> bool:
        return self.status == TRIGGERED

    def to_dict(self) -> dict:
        d = asdict(self)
        d["triggered"] = self.triggered
        return d


def _check_gamma(gamma: float) -> None:
    if gamma == 0:
        raise ValueError(
            "gamma = 0 is the BBM case: all solutions are global, no breaking criterion applies"
        )


def _local_minima(vals: np.ndarray, periodic: bool) -> np.ndarray:
    if periodic:
        left, right = np.roll(vals, 1), np.roll(vals, -1)
    else:
        left = np.concatenate(([np.inf], vals[:-1]))
        right = np.concatenate((vals[1:], [np.inf]))
    idx = np.flatnonzero((vals <= left) & (vals <= right))
    return idx[np.argsort(vals[idx])][:N_REFINE]


def _refine(fun, x: np.ndarray, idx, periodic: bool, kink=None):
    """Bounded scalar minimisation of ``fun`` between the neighbours of each index.

    ``kink`` (the datum itself) adds its sign changes in each bracket as
    candidates, since ``|u0|`` makes the margin non-smooth there.
    """
    n = x.size
    h = x[1] - x[0]
    best_x, best_v = None, math.inf
    for i in idx:
        if periodic:
            lo, hi = x[i] - h, x[i] + h
        else:
            lo, hi = x[max(i - 1, 0)], x[min(i + 1, n - 1)]
        res = minimize_scalar(fun, bounds=(lo, hi), method="bounded",
                              options={"xatol": REFINE_XTOL})
        cands = [(float(res.fun), float(res.x)), (float(fun(x[i])), float(x[i]))]
        if kink is not None:
            for a, b in ((lo, x[i]), (x[i], hi)):
                ka, kb = kink(a), kink(b)
                if ka == 0.0:
                    cands.append((float(fun(a)), float(a)))
                elif ka * kb < 0.0:
                    z = brentq(kink, a, b, xtol=1e-15)
                    cands.append((float(fun(z)), float(z)))
        v, xx = min(cands)
        if v < best_v:
            best_v, best_x = v, xx
    if periodic:
        best_x = best_x % 1.0
    return best_x, best_v


def _scan(datum: InitialDatum, gamma: float, beta: float, x: np.ndarray, periodic: bool,
          domain: str) -> BlowupVerdict:
    s = 1.0 if gamma > 0 else -1.0

    def margin_fn(xx):
        return s * datum.ux(xx) + beta * abs(datum.u(xx))

    m = s * np.asarray(datum.ux(x)) + beta * np.abs(np.asarray(datum.u(x)))
    x0, mval = _refine(margin_fn, x, _local_minima(m, periodic), periodic, kink=datum.u)
    mval = float(min(mval, m.min()))
    if abs(mval) <= BOUNDARY_TOL:
        return BlowupVerdict(BOUNDARY, gamma, domain, beta, mval, x0,
                             note="margin within 1e-9 of zero: inconclusive")
    if mval > 0.0:
        return BlowupVerdict(NOT_TRIGGERED, gamma, domain, beta, mval, None)

    # T* bound: maximise u'^2 - beta^2 u^2 over the triggering set
    def neg_h(xx):
        if margin_fn(xx) >= 0.0:
            return 0.0
        return -(datum.ux(xx) ** 2 - beta**2 * datum.u(xx) ** 2)

    hv = np.where(m < 0.0, -(np.asarray(datum.ux(x)) ** 2 - beta**2 * np.asarray(datum.u(x)) ** 2), 0.0)
    xt, hmin = _refine(neg_h, x, _local_minima(hv, periodic), periodic, kink=datum.u)
    radicand = -hmin
    tstar = 2.0 / (abs(gamma) * math.sqrt(radicand))
    verdict = BlowupVerdict(TRIGGERED, gamma, domain, beta, mval, x0, tstar)
    if gamma == 3.0:
        inf_ux = float(np.min(datum.ux(x)))
        if inf_ux < 0.0:
            verdict.tstar_gamma3_display = (2.0 / 3.0) * math.sqrt(-inf_ux)
    return verdict


def check_blowup_periodic(datum: InitialDatum, gamma: float, beta: Optional[float] = None,
                          n: int = SCAN_POINTS) -> BlowupVerdict:
    """Breaking criterion on the circle with ``beta = beta_gamma`` (or an override).

    A coarse scan on ``n`` points is refined around the lowest local minima
    of the margin ``sign(gamma) u0' + beta |u0|``.
    """
    _check_gamma(gamma)
    if datum.domain != "circle":
        raise ValueError("check_blowup_periodic expects a circle datum")
    if beta is None:
        beta = compute_beta_gamma(gamma).beta_gamma
        if beta is None:
            return BlowupVerdict(NOT_APPLICABLE, gamma, "circle", None,
                                 note="beta_gamma is infinite for this gamma")
    x = np.arange(n) / n
    return _scan(datum, gamma, beta, x, True, "circle")


def line_window(datum: InitialDatum, tol: float = 1e-10, start: float = 8.0, max_half: float = 4096.0):
    """Half-width ``L`` with ``|u0(+-L)| < tol`` (doubling from ``start``)."""
    L = start
    while L < max_half:
        if abs(datum.u(L)) < tol and abs(datum.u(-L)) < tol:
            return L
        L *= 2.0
    return L


def check_blowup_line(datum: InitialDatum, gamma: float, points_per_unit: int = 512) -> BlowupVerdict:
    """Breaking criterion for decaying data on the line, ``1 <= gamma <= 4``."""
    _check_gamma(gamma)
    if datum.domain != "line":
        raise ValueError("check_blowup_line expects a line datum")
    beta = beta_gamma_nonperiodic(gamma)
    if beta is None:
        return BlowupVerdict(NOT_APPLICABLE, gamma, "line", None,
                             note="the line criterion needs 1 <= gamma <= 4")
    L = line_window(datum)
    x = np.linspace(-L, L, int(2 * L * points_per_unit) + 1)
    return _scan(datum, gamma, beta, x, False, "line")


# ---------------------------------------------------------------------------
# comparison lemma


@dataclass
class HarnessResult:
    blowup_time: Optional[float]
    bound: float
    f0: float
    g0: float
    c: float


def comparison_bound(f0: float, g0: float, c: float) -> float:
    return 1.0 / (c * math.sqrt(f0 * g0))


def comparison_lemma_harness(f0: float, g0: float, c: float,
                             rhs: Optional[Callable] = None,
                             rtol: float = 1e-10, atol: float = 1e-12) -> HarnessResult:
    """Integrate ``f' = F(t, f, g)``, ``g' = G(t, f, g)`` until ``|f| + |g| > 1e10``.

    ``rhs(t, f, g) -> (F, G)`` should dominate ``(c f g, c f g)``; the default
    is the equality case.  The observed divergence time is compared against
    ``1/(c sqrt(f0 g0))``.
    """
    if f0 <= 0 or g0 <= 0 or c <= 0:
        raise ValueError("f0, g0 and c must be positive")
    if rhs is None:
        def rhs(t, f, g):
            return c * f * g, c * f * g

    def ode(t, y):
        return list(rhs(t, y[0], y[1]))

    def blown(t, y):
        return abs(y[0]) + abs(y[1]) - DIVERGENCE_LEVEL

    blown.terminal = True
    bound = comparison_bound(f0, g0, c)
    sol = solve_ivp(ode, (0.0, 2.0 * bound + 1.0), [f0, g0], method="RK45",
                    rtol=rtol, atol=atol, events=blown)
    t_obs = float(sol.t_events[0][0]) if sol.t_events[0].size else None
    return HarnessResult(t_obs, bound, f0, g0, c)


# ---------------------------------------------------------------------------
# unique continuation and decay


@dataclass
class FrameReport:
    index: int
    has_zero: bool
    identically_zero: bool
    violations: list = field(default_factory=list)

    @property
    def contradiction_candidate(self) -> bool:
        """A zero of a nontrivial frame is incompatible with a global solution."""
        return self.has_zero and not self.identically_zero


@dataclass
class UniqueContinuationReport:
    beta: float
    frames: list

    @property
    def any_violation(self) -> bool:
        return any(f.violations for f in self.frames)

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "frames": [
                {**asdict(f), "contradiction_candidate": f.contradiction_candidate}
                for f in self.frames
            ],
        }


def _sign_runs(u: np.ndarray):
    """Maximal cyclic runs of samples with ``u >= 0`` (sign +1) or ``u < 0`` (sign -1)."""
    n = u.size
    sgn = np.where(u >= 0.0, 1, -1)
    if np.all(sgn == sgn[0]):
        return [(sgn[0], np.arange(n), False)]
    start = int(np.flatnonzero(sgn != np.roll(sgn, 1))[0])
    order = (np.arange(n) + start) % n
    runs, cur = [], [order[0]]
    for i in order[1:]:
        if sgn[i] == sgn[cur[-1]]:
            cur.append(i)
        else:
            runs.append(cur)
            cur = [i]
    runs.append(cur)
    return [(int(sgn[r[0]]), np.array(r), True) for r in runs]


def unique_continuation_check(frames: Sequence, gamma: float, beta: Optional[float] = None,
                              rel_tol: float = 1e-6) -> UniqueContinuationReport:
    """Monotonicity of ``e^{beta x} u`` on ``u >= 0`` runs and ``e^{-beta x} u`` on ``u <= 0`` runs.

    ``frames`` are samples on ``j/n``.  Runs that wrap around the circle are
    unrolled so ``x`` increases along each run.
    """
    _check_gamma(gamma)
    if beta is None:
        beta = compute_beta_gamma(gamma).beta_gamma
        if beta is None:
            raise ValueError("beta_gamma is infinite: monotonicity test unavailable")
    reports = []
    for fi, u in enumerate(frames):
        u = np.asarray(u, dtype=float)
        n = u.size
        x = np.arange(n) / n
        scale = float(np.max(np.abs(u)))
        tol = rel_tol * scale
        ident0 = scale == 0.0
        runs = _sign_runs(u)
        has_zero = (not ident0) and (bool(np.any(u == 0.0)) or len(runs) > 1)
        viol = []
        for sgn, idx, _ in runs:
            xs = x[idx].copy()
            wrap = np.flatnonzero(np.diff(xs) < 0)
            if wrap.size:
                xs[wrap[0] + 1:] += 1.0
            w = np.exp(sgn * beta * xs) * u[idx]
            d = np.diff(w)
            bad = np.flatnonzero(d < -tol)
            if bad.size:
                viol.append({
                    "sign": "nonnegative" if sgn > 0 else "negative",
                    "x_start": float(x[idx[0]]),
                    "x_end": float(x[idx[-1]]),
                    "first_violation_x": float(x[idx[bad[0]]]),
                    "max_decrease": float(-d.min()),
                })
        reports.append(FrameReport(fi, has_zero, ident0, viol))
    return UniqueContinuationReport(beta, reports)


DECAY_LEVELS = (5.0, 10.0, 20.0)


def decay_profile(datum: InitialDatum, beta: float, levels=DECAY_LEVELS, span: float = 200.0,
                  points: int = 40001):
    """``e^{beta X} max_{|x| >= X} |u0(x)|`` for each ``X`` in ``levels``."""
    out = []
    for X in levels:
        xs = np.linspace(X, X + span, points)
        m = max(float(np.max(np.abs(datum.u(xs)))), float(np.max(np.abs(datum.u(-xs)))))
        out.append(math.exp(beta * X) * m)
    return out


def decay_blowup_test_line(datum: InitialDatum, gamma: float, rel_tol: float = 1e-6) -> bool:
    """Numerical test of ``u0 = o(e^{-beta_gamma |x|})``; conservative.

    True iff the weighted tails at ``X = 5, 10, 20`` are non-increasing and the
    last one is below ``rel_tol`` times ``sup |u0|``.
    """
    if datum.domain != "line":
        raise ValueError("decay test expects a line datum")
    beta = beta_gamma_nonperiodic(gamma)
    if beta is None:
        return False
    prof = decay_profile(datum, beta)
    L = line_window(datum)
    xs = np.linspace(-L, L, 200001)
    sup = float(np.max(np.abs(datum.u(xs))))
    if sup == 0.0:
        return False
    monotone = all(b <= a * (1.0 + 1e-12) for a, b in zip(prof, prof[1:]))
    return bool(monotone and prof[-1] <= rel_tol * sup)
