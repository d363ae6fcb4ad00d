"""Pseudo-spectral RK4 integration of the periodic rod equation

    u_t + gamma u u_x = -d/dx p * ((3 - gamma)/2 u^2 + gamma/2 u_x^2)

on ``[0, 1)``, with flow-map tracking and wave-breaking detection.

The state holds ``N`` retained modes (wavenumbers ``|k| < N/2``) as
normalised ``rfft`` coefficients.  Quadratic products are formed on a
``3N/2`` grid, which removes aliasing exactly (the 2/3 rule seen from the
other side).  The truncated system conserves ``E = int u^2 + u_x^2``
exactly in continuous time, so the energy drift measures the time error.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .datum import InitialDatum

STOP_SLOPE = "slope"
STOP_RESOLUTION = "resolution"
STOP_TMAX = "t_max"


class SimulationError(RuntimeError):
    """Non-finite values; carries the last good state."""

    def __init__(self, message, last_state=None):
        super().__init__(message)
        self.last_state = last_state


@dataclass
class SimConfig:
    gamma: float
    N: int = 512
    dt0: float = 1e-3
    cfl_safety: float = 0.1
    slope_stop: float = 1e4
    t_max: float = 10.0
    dealias: bool = True
    tail_tol: float = 1e-3
    trajectories: tuple = ()
    record_every: int = 1

    def __post_init__(self):
        if self.N < 128 or self.N & (self.N - 1):
            raise ValueError(f"N must be a power of two >= 128, got {self.N}")
        if self.dt0 <= 0:
            raise ValueError("dt0 must be positive")
        if not (0.0 < self.cfl_safety <= 1.0):
            raise ValueError("cfl_safety must lie in (0, 1]")

    @property
    def grid(self) -> int:
        return 3 * self.N // 2 if self.dealias else self.N


class Spectral:
    """Transforms between retained coefficients and physical grids."""

    def __init__(self, N: int, M: int):
        self.N, self.M = N, M
        self.nk = N // 2 + 1
        self.k = 2.0 * np.pi * np.arange(self.nk)
        self.ik = 1j * self.k
        self.ik[-1] = 0.0
        self.smooth = self.ik / (1.0 + self.k**2)
        self.mask = np.ones(self.nk)
        self.mask[-1] = 0.0

    def to_grid(self, c: np.ndarray, M: Optional[int] = None) -> np.ndarray:
        M = self.M if M is None else M
        full = np.zeros(M // 2 + 1, dtype=complex)
        full[: self.nk] = c * self.mask
        return np.fft.irfft(full * M, M)

    def from_grid(self, v: np.ndarray) -> np.ndarray:
        M = v.size
        return np.fft.rfft(v)[: self.nk] / M * self.mask

    def interp(self, c: np.ndarray, x, order: int = 0):
        """Trigonometric interpolation of ``d^order u`` at arbitrary points."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        w = np.full(self.nk, 2.0)
        w[0] = 1.0
        coef = w * self.mask * c * (1j * self.k) ** order
        return (np.exp(1j * np.multiply.outer(x, self.k)) @ coef).real


@dataclass
class SimState:
    t: float
    u_hat: np.ndarray
    q: np.ndarray = field(default_factory=lambda: np.zeros(0))
    trajectory_x0: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def full_spectrum(self) -> np.ndarray:
        """All ``N`` complex coefficients, ``k = 0..N-1`` in FFT order."""
        nk = self.u_hat.size
        N = 2 * (nk - 1)
        out = np.zeros(N, dtype=complex)
        out[:nk] = self.u_hat
        out[nk:] = np.conj(self.u_hat[1:nk - 1][::-1])
        return out

    def diagnostics(self, sp: Spectral, gamma: float) -> dict:
        u = sp.to_grid(self.u_hat)
        ux = sp.to_grid(sp.ik * self.u_hat)
        return {
            "t": self.t,
            "energy": energy(self.u_hat, sp),
            "min_slope": float(np.min(gamma * ux)),
            "max_abs_u": float(np.max(np.abs(u))),
            "max_abs_ux": float(np.max(np.abs(ux))),
            "tail": tail_fraction(self.u_hat, sp),
        }


def energy(c: np.ndarray, sp: Spectral) -> float:
    w = (1.0 + sp.k**2) * np.abs(c * sp.mask) ** 2
    return float(w[0] + 2.0 * w[1:].sum())


def tail_fraction(c: np.ndarray, sp: Spectral) -> float:
    """Share of ``sum |k c_k|^2`` carried by ``N/4 < k < N/2``."""
    w = (sp.k * np.abs(c * sp.mask)) ** 2
    tot = w.sum()
    return float(w[sp.nk // 2 + 1:].sum() / tot) if tot > 0 else 0.0


def _rhs(c: np.ndarray, sp: Spectral, gamma: float):
    u = sp.to_grid(c)
    ux = sp.to_grid(sp.ik * c)
    n1 = sp.from_grid(u * ux)
    n2 = sp.from_grid(0.5 * (3.0 - gamma) * u * u + 0.5 * gamma * ux * ux)
    return -gamma * n1 - sp.smooth * n2, u, ux


def _velocity(c, sp, gamma, q):
    return gamma * sp.interp(c, q) if q.size else q


def initial_state(datum: InitialDatum, config: SimConfig) -> SimState:
    if datum.domain != "circle":
        raise ValueError("the simulator runs on the circle only")
    M = config.grid
    x = np.arange(M) / M
    u0 = np.asarray(datum.u(x), dtype=float)
    sp = Spectral(config.N, M)
    c = sp.from_grid(u0)
    x0 = np.asarray(config.trajectories, dtype=float)
    return SimState(0.0, c, x0.copy(), x0)


def time_step(state: SimState, config: SimConfig, sp: Spectral) -> float:
    u = sp.to_grid(state.u_hat)
    ux = sp.to_grid(sp.ik * state.u_hat)
    g = abs(config.gamma)
    speed = max(1.0, g * float(np.max(np.abs(u))) * sp.M, g * float(np.max(np.abs(ux))))
    return min(config.dt0, config.cfl_safety / speed)


def step(state: SimState, config: SimConfig, sp: Optional[Spectral] = None,
         dt: Optional[float] = None) -> SimState:
    """One classical RK4 step for the coefficients and the tracked characteristics."""
    sp = sp or Spectral(config.N, config.grid)
    dt = time_step(state, config, sp) if dt is None else dt
    gam = config.gamma
    c, q = state.u_hat, state.q
    k1, _, _ = _rhs(c, sp, gam)
    v1 = _velocity(c, sp, gam, q)
    c2 = c + 0.5 * dt * k1
    k2, _, _ = _rhs(c2, sp, gam)
    v2 = _velocity(c2, sp, gam, q + 0.5 * dt * v1)
    c3 = c + 0.5 * dt * k2
    k3, _, _ = _rhs(c3, sp, gam)
    v3 = _velocity(c3, sp, gam, q + 0.5 * dt * v2)
    c4 = c + dt * k3
    k4, _, _ = _rhs(c4, sp, gam)
    v4 = _velocity(c4, sp, gam, q + dt * v3)
    c_new = c + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    q_new = q + dt / 6.0 * (v1 + 2.0 * v2 + 2.0 * v3 + v4) if q.size else q
    if not np.all(np.isfinite(c_new)) or (q.size and not np.all(np.isfinite(q_new))):
        raise SimulationError(f"non-finite state at t={state.t + dt:.6g}", state)
    return SimState(state.t + dt, c_new, q_new, state.trajectory_x0)


@dataclass
class RunOutput:
    config: SimConfig
    times: np.ndarray
    energy: np.ndarray
    min_slope: np.ndarray
    max_abs_u: np.ndarray
    trajectories: np.ndarray  # shape (n_records, n_traj), unwrapped positions
    history_t: np.ndarray
    history_c: np.ndarray
    final: SimState
    stop_reason: str

    @property
    def gamma(self) -> float:
        return self.config.gamma

    def relative_energy_drift(self, slope_limit: Optional[float] = None) -> float:
        e0 = self.energy[0]
        sel = np.ones(self.times.size, bool)
        if slope_limit is not None:
            sel = np.abs(self.min_slope) < slope_limit * max(abs(self.gamma), 1e-300)
        return float(np.max(np.abs(self.energy[sel] - e0)) / e0)


def run(datum: InitialDatum, config: SimConfig) -> RunOutput:
    """Integrate until ``min gamma u_x < -slope_stop``, loss of resolution, or ``t_max``.

    Loss of resolution means the spectral tail fraction exceeds
    ``config.tail_tol``; past that point the truncated system no longer
    follows the PDE and the slope diagnostic saturates.
    """
    sp = Spectral(config.N, config.grid)
    state = initial_state(datum, config)
    rec = {"t": [], "E": [], "m": [], "umax": [], "q": []}
    hist_t, hist_c = [], []

    def record(s, d):
        rec["t"].append(s.t)
        rec["E"].append(d["energy"])
        rec["m"].append(d["min_slope"])
        rec["umax"].append(d["max_abs_u"])
        rec["q"].append(s.q.copy())
        hist_t.append(s.t)
        hist_c.append(s.u_hat.copy())

    d = state.diagnostics(sp, config.gamma)
    record(state, d)
    reason = STOP_TMAX
    n = 0
    while state.t < config.t_max - 1e-14:
        dt = min(time_step(state, config, sp), config.t_max - state.t)
        state = step(state, config, sp, dt)
        n += 1
        d = state.diagnostics(sp, config.gamma)
        stop = None
        if d["min_slope"] < -config.slope_stop:
            stop = STOP_SLOPE
        elif d["tail"] > config.tail_tol:
            stop = STOP_RESOLUTION
        if stop or n % config.record_every == 0:
            record(state, d)
        if stop:
            reason = stop
            break
    return RunOutput(
        config,
        np.array(rec["t"]),
        np.array(rec["E"]),
        np.array(rec["m"]),
        np.array(rec["umax"]),
        np.array(rec["q"]).reshape(len(rec["t"]), -1),
        np.array(hist_t),
        np.array(hist_c),
        state,
        reason,
    )


# ---------------------------------------------------------------------------
# characteristics and the f, g pair


def integrate_flow_map(out: RunOutput, x0: float) -> tuple:
    """``q(t, x0)`` at the stored times by RK4 on ``q_t = gamma u(t, q)``.

    Midpoint coefficients are the average of the neighbouring stored
    coefficients (linear interpolation in time).
    """
    sp = Spectral(out.config.N, out.config.grid)
    g = out.gamma
    t, C = out.history_t, out.history_c
    q = np.empty(t.size)
    q[0] = x0
    for j in range(t.size - 1):
        h = t[j + 1] - t[j]
        cm = 0.5 * (C[j] + C[j + 1])
        a = g * sp.interp(C[j], q[j])[0]
        b = g * sp.interp(cm, q[j] + 0.5 * h * a)[0]
        c = g * sp.interp(cm, q[j] + 0.5 * h * b)[0]
        d = g * sp.interp(C[j + 1], q[j] + h * c)[0]
        q[j + 1] = q[j] + h / 6.0 * (a + 2.0 * b + 2.0 * c + d)
    return t.copy(), q


@dataclass
class FGSeries:
    t: np.ndarray
    q: np.ndarray
    f: np.ndarray
    g: np.ndarray


def monitor_fg(out: RunOutput, x0: float, beta: float) -> FGSeries:
    """``f = (-u_x + beta u)(t, q(t, x0))`` and ``g = -(u_x + beta u)(t, q(t, x0))``."""
    sp = Spectral(out.config.N, out.config.grid)
    t, q = integrate_flow_map(out, x0)
    u = np.array([sp.interp(c, qq)[0] for c, qq in zip(out.history_c, q)])
    ux = np.array([sp.interp(c, qq, 1)[0] for c, qq in zip(out.history_c, q)])
    return FGSeries(t, q, -ux + beta * u, -(ux + beta * u))


# ---------------------------------------------------------------------------
# blowup fit


MIN_FIT_SAMPLES = 200
MIN_GROWTH = 5.0


@dataclass
class BlowupFit:
    detected: bool
    t_star_est: Optional[float]
    rate_coeff: Optional[float]
    witness_trajectory: Optional[int]
    samples: int
    window: Optional[tuple]
    growth: float
    stop_reason: str
    note: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        d["window"] = list(self.window) if self.window else None
        return d


def detect_and_fit_blowup(out: RunOutput, gamma: Optional[float] = None) -> BlowupFit:
    """Fit ``1/min(gamma u_x)`` linearly in ``t`` over the final stretch of growth.

    With ``gamma u_x ~ -gamma C/(T* - t)`` the fit gives
    ``1/m = (t - T*)/(gamma C)``, so ``T*`` is the zero of the line and
    ``C = 1/(gamma slope)`` (expected ``2/gamma``).  The window keeps samples
    with ``|m| >= max(|m_final|/10, 2 |m_0|)``.
    """
    gamma = out.gamma if gamma is None else gamma
    m = out.min_slope
    m0, mf = abs(m[0]), abs(m[-1])
    growth = mf / m0 if m0 > 0 else math.inf
    if out.stop_reason == STOP_TMAX or gamma == 0:
        return BlowupFit(False, None, None, None, 0, None, growth, out.stop_reason,
                         "run reached t_max without breaking")
    if growth < MIN_GROWTH:
        return BlowupFit(False, None, None, None, 0, None, growth, out.stop_reason,
                         "inconclusive: not enough slope growth")
    level = max(mf / 10.0, 2.0 * m0)
    sel = (m < 0) & (np.abs(m) >= level)
    # only the last contiguous stretch
    idx = np.flatnonzero(sel)
    breaks = np.flatnonzero(np.diff(idx) > 1)
    if breaks.size:
        idx = idx[breaks[-1] + 1:]
    if idx.size < MIN_FIT_SAMPLES:
        return BlowupFit(False, None, None, None, int(idx.size), None, growth, out.stop_reason,
                         f"inconclusive: {idx.size} samples in the fit window")
    t = out.times[idx]
    slope, icpt = np.polyfit(t, 1.0 / m[idx], 1)
    t_star = -icpt / slope
    rate = 1.0 / (gamma * slope)
    witness = None
    if out.trajectories.size:
        sp = Spectral(out.config.N, out.config.grid)
        x = np.arange(sp.M) / sp.M
        ux = sp.to_grid(sp.ik * out.final.u_hat)
        x_min = x[int(np.argmin(gamma * ux))]
        qf = out.trajectories[-1] % 1.0
        dist = np.minimum(np.abs(qf - x_min), 1.0 - np.abs(qf - x_min))
        witness = int(np.argmin(dist))
    return BlowupFit(True, float(t_star), float(rate), witness, int(idx.size),
                     (float(t[0]), float(t[-1])), growth, out.stop_reason)


# ---------------------------------------------------------------------------
# output files


def write_run_output(out: RunOutput, prefix: str, fit: Optional[BlowupFit] = None) -> tuple:
    """Write ``<prefix>.csv`` (time series) and ``<prefix>.json`` (final spectrum, config, fit)."""
    csv_path, json_path = f"{prefix}.csv", f"{prefix}.json"
    ntr = out.trajectories.shape[1] if out.trajectories.ndim == 2 else 0
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "energy", "min_gamma_ux", "max_abs_u"] + [f"q{j}" for j in range(ntr)])
        for i in range(out.times.size):
            row = [out.times[i], out.energy[i], out.min_slope[i], out.max_abs_u[i]]
            row += list(out.trajectories[i]) if ntr else []
            w.writerow([repr(float(v)) for v in row])
    payload = {
        "config": {**asdict(out.config), "trajectories": list(out.config.trajectories)},
        "stop_reason": out.stop_reason,
        "t_final": out.final.t,
        "u_hat_final": [[float(c.real), float(c.imag)] for c in out.final.u_hat],
        "fit": fit.to_dict() if fit else None,
    }
    with open(json_path, "w") as fh:
        json.dump(payload, fh, indent=2)
    return csv_path, json_path


def run_summary(out: RunOutput, fit: BlowupFit) -> dict:
    return {
        "gamma": out.gamma,
        "N": out.config.N,
        "stop_reason": out.stop_reason,
        "t_final": out.final.t,
        "steps": int(out.times.size - 1) * out.config.record_every,
        "energy_initial": float(out.energy[0]),
        "energy_drift_rel": out.relative_energy_drift(),
        "min_slope_final": float(out.min_slope[-1]),
        "max_abs_u_max": float(out.max_abs_u.max()),
        "fit": fit.to_dict(),
    }
