import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rodwaves.datum import InitialDatum
from rodwaves.simulator import (
    STOP_RESOLUTION,
    STOP_SLOPE,
    STOP_TMAX,
    SimConfig,
    Spectral,
    detect_and_fit_blowup,
    energy,
    initial_state,
    integrate_flow_map,
    monitor_fg,
    run,
    run_summary,
    step,
    write_run_output,
)


@pytest.fixture(scope="module")
def breaking_run():
    return run(InitialDatum.sine(), SimConfig(2.0, N=512, trajectories=(0.5, 0.25)))


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(1.0, N=100)
    with pytest.raises(ValueError):
        SimConfig(1.0, dt0=0.0)
    assert SimConfig(1.0, N=256).grid == 384
    assert SimConfig(1.0, N=256, dealias=False).grid == 256


def test_transforms_round_trip():
    sp = Spectral(128, 192)
    x = np.arange(192) / 192
    u = np.sin(2 * np.pi * x) + 0.2 * np.cos(10 * np.pi * x)
    c = sp.from_grid(u)
    np.testing.assert_allclose(sp.to_grid(c), u, atol=1e-13)
    np.testing.assert_allclose(sp.interp(c, 0.3, 1), 2 * np.pi * math.cos(0.6 * np.pi)
                               - 0.2 * 5 * 2 * np.pi * math.sin(3 * np.pi), atol=1e-10)
    # E = int u^2 + u_x^2
    exact = 0.5 * (1 + 4 * np.pi**2) + 0.02 * (1 + 100 * np.pi**2)
    assert energy(c, sp) == pytest.approx(exact, rel=1e-12)


@settings(max_examples=10, deadline=None)
@given(st.floats(min_value=-3, max_value=3), st.floats(min_value=-4, max_value=4))
def test_constant_state_is_steady(c, gamma):
    cfg = SimConfig(gamma, N=128)
    s = initial_state(InitialDatum("circle", "constant", {"c": c}), cfg)
    for _ in range(5):
        s = step(s, cfg, dt=1e-2)
    np.testing.assert_allclose(s.u_hat[0].real, c, atol=1e-14)
    assert np.max(np.abs(s.u_hat[1:])) < 1e-14


def test_bbm_case_is_global():
    out = run(InitialDatum.sine(), SimConfig(0.0, N=128, t_max=2.0))
    assert out.stop_reason == STOP_TMAX
    assert out.final.t == pytest.approx(2.0)
    assert out.relative_energy_drift() < 1e-10
    fit = detect_and_fit_blowup(out)
    assert not fit.detected


def test_energy_conserved_before_breaking(breaking_run):
    assert breaking_run.relative_energy_drift() < 1e-8


def test_solution_stays_real(breaking_run):
    full = breaking_run.final.full_spectrum()
    assert np.max(np.abs(np.fft.ifft(full).imag)) < 1e-14
    assert breaking_run.final.u_hat[0].imag == pytest.approx(0.0, abs=1e-15)


def test_spectral_convergence_on_refinement():
    # fixed step so that only the spatial resolution differs
    d = InitialDatum.sine(a=0.5)
    x = np.linspace(0, 1, 33)
    vals = []
    for N in (128, 256):
        cfg = SimConfig(1.0, N=N)
        sp = Spectral(N, cfg.grid)
        s = initial_state(d, cfg)
        for _ in range(200):
            s = step(s, cfg, sp, dt=5e-4)
        vals.append(sp.interp(s.u_hat, x))
    assert np.max(np.abs(vals[0] - vals[1])) < 1e-8


def test_flow_map_constant_speed():
    cfg = SimConfig(1.5, N=128, t_max=0.5, trajectories=(0.1, 0.7))
    out = run(InitialDatum("circle", "constant", {"c": 0.4}), cfg)
    np.testing.assert_allclose(out.trajectories[-1], np.array([0.1, 0.7]) + 1.5 * 0.4 * 0.5, atol=1e-12)
    t, q = integrate_flow_map(out, 0.1)
    np.testing.assert_allclose(q, 0.1 + 0.6 * t, atol=1e-12)


def test_flow_map_fixed_point_by_symmetry(breaking_run):
    # sin(2 pi x) is odd about x = 1/2, so that characteristic never moves
    assert breaking_run.trajectories[0, 0] == 0.5
    np.testing.assert_allclose(breaking_run.trajectories[:, 0], 0.5, atol=1e-12)
    t, q = integrate_flow_map(breaking_run, 0.5)
    assert q[0] == 0.5
    np.testing.assert_allclose(q, 0.5, atol=1e-12)


def test_flow_map_matches_cointegrated(breaking_run):
    t, q = integrate_flow_map(breaking_run, 0.25)
    assert np.max(np.abs(q - breaking_run.trajectories[:, 1])) < 1e-6


def test_monitor_fg_initial_values(breaking_run):
    beta = 0.3
    fg = monitor_fg(breaking_run, 0.5, beta)
    assert fg.f[0] == pytest.approx(2 * np.pi, abs=1e-10)
    assert fg.g[0] == pytest.approx(2 * np.pi, abs=1e-10)
    # both grow along the breaking characteristic
    assert fg.f[-1] > 5 * fg.f[0] and fg.g[-1] > 5 * fg.g[0]


def test_fit_recovers_breaking(breaking_run):
    assert breaking_run.stop_reason in (STOP_SLOPE, STOP_RESOLUTION)
    fit = detect_and_fit_blowup(breaking_run)
    assert fit.detected
    assert fit.samples >= 200
    assert fit.witness_trajectory == 0
    # the sufficient-condition bound 2/(gamma max|u0'|) = 1/(2 pi)
    assert 0.12 < fit.t_star_est < 1 / (2 * math.pi)
    assert fit.rate_coeff == pytest.approx(2 / 2.0, rel=0.1)


def test_fit_inconclusive_at_low_resolution():
    out = run(InitialDatum.sine(), SimConfig(2.0, N=128))
    fit = detect_and_fit_blowup(out)
    assert not fit.detected
    assert "inconclusive" in fit.note


def test_write_run_output(breaking_run, tmp_path):
    fit = detect_and_fit_blowup(breaking_run)
    csv_path, json_path = write_run_output(breaking_run, str(tmp_path / "run"), fit)
    rows = open(csv_path).read().splitlines()
    assert rows[0] == "t,energy,min_gamma_ux,max_abs_u,q0,q1"
    assert len(rows) == breaking_run.times.size + 1
    payload = json.load(open(json_path))
    assert payload["stop_reason"] == breaking_run.stop_reason
    assert len(payload["u_hat_final"]) == 257
    assert payload["fit"]["detected"]
    summary = run_summary(breaking_run, fit)
    assert summary["N"] == 512 and summary["energy_drift_rel"] < 1e-8
