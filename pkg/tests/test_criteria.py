import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rodwaves.criteria import (
    BOUNDARY,
    NOT_APPLICABLE,
    NOT_TRIGGERED,
    TRIGGERED,
    check_blowup_line,
    check_blowup_periodic,
    comparison_bound,
    comparison_lemma_harness,
    decay_blowup_test_line,
    unique_continuation_check,
)
from rodwaves.datum import DatumError, InitialDatum
from rodwaves.thresholds import compute_beta_gamma


def test_sine_gamma1_bound():
    v = check_blowup_periodic(InitialDatum.sine(), 1.0)
    assert v.triggered
    assert v.witness_x0 == pytest.approx(0.5, abs=1e-8)
    assert v.margin == pytest.approx(-2 * math.pi, abs=1e-10)
    assert v.tstar_bound == pytest.approx(1 / math.pi, abs=1e-10)
    assert v.beta_used == pytest.approx(0.5133, abs=1e-4)


def test_constant_is_not_triggered():
    v = check_blowup_periodic(InitialDatum("circle", "constant", {"c": 1.5}), 2.0)
    assert v.status == NOT_TRIGGERED
    assert v.tstar_bound is None and not v.triggered


def test_gamma3_any_nonconstant_datum_triggers():
    d = InitialDatum("circle", fourier=np.array([0.7, 0.1 + 0.05j, -0.02j]))
    v = check_blowup_periodic(d, 3.0)
    assert v.triggered
    x = np.linspace(0, 1, 20001)
    assert v.margin == pytest.approx(np.min(d.ux(x)), abs=1e-6)
    assert v.tstar_gamma3_display is not None


def test_negative_gamma_uses_flipped_slope():
    v = check_blowup_periodic(InitialDatum.sine(), -2.0)
    assert v.triggered
    assert v.witness_x0 == pytest.approx(0.0, abs=1e-8) or v.witness_x0 == pytest.approx(1.0, abs=1e-8)
    assert v.tstar_bound == pytest.approx(2 / (2 * 2 * math.pi), abs=1e-10)


def test_not_applicable_when_threshold_infinite():
    v = check_blowup_periodic(InitialDatum.sine(), -0.539)
    assert v.status == NOT_APPLICABLE
    with pytest.raises(ValueError, match="BBM"):
        check_blowup_periodic(InitialDatum.sine(), 0.0)


@settings(max_examples=15, deadline=None)
@given(st.floats(min_value=0.0, max_value=1.0))
def test_translation_invariance(shift):
    beta = compute_beta_gamma(1.0).beta_gamma
    d0 = InitialDatum("circle", fourier=np.array([0.2, 0.5, 0.1j]))
    k = np.arange(3)
    d1 = InitialDatum("circle", fourier=d0.fourier * np.exp(-2j * np.pi * k * shift))
    v0 = check_blowup_periodic(d0, 1.0, beta=beta)
    v1 = check_blowup_periodic(d1, 1.0, beta=beta)
    assert v1.margin == pytest.approx(v0.margin, abs=1e-8)
    assert v1.tstar_bound == pytest.approx(v0.tstar_bound, abs=1e-8)


@settings(max_examples=10, deadline=None)
@given(st.floats(min_value=0.05, max_value=20.0))
def test_scaling(lam):
    beta = compute_beta_gamma(2.0).beta_gamma
    v1 = check_blowup_periodic(InitialDatum.sine(), 2.0, beta=beta)
    vl = check_blowup_periodic(InitialDatum.sine(a=lam), 2.0, beta=beta)
    assert vl.triggered == v1.triggered
    assert vl.tstar_bound == pytest.approx(v1.tstar_bound / lam, rel=1e-9)


def test_tmax_at_zero_witness():
    # at a zero of u0 the bound reduces to 2/(|gamma| |u0'|)
    v = check_blowup_periodic(InitialDatum.sine(a=0.3, k=2), 1.5)
    assert v.tstar_bound == pytest.approx(2 / (1.5 * 0.3 * 4 * math.pi), rel=1e-10)


def test_line_odd_gaussian_triggers():
    v = check_blowup_line(InitialDatum("line", "gaussian_odd"), 1.0)
    assert v.triggered and v.beta_used == 1.0
    x0 = v.witness_x0
    d = InitialDatum("line", "gaussian_odd")
    assert d.ux(x0) + abs(d.u(x0)) == pytest.approx(v.margin, abs=1e-12)


def test_line_peakon_is_boundary_case():
    assert check_blowup_line(InitialDatum("line", "peakon"), 1.0).status == BOUNDARY
    smooth = check_blowup_line(InitialDatum("line", "peakon_smoothed"), 1.0)
    assert not smooth.triggered


def test_line_gamma4():
    d = InitialDatum("line", "gaussian_sine")
    v = check_blowup_line(d, 4.0)
    x = np.linspace(-8, 8, 200001)
    direct = np.min(d.ux(x) + 0.5 * np.abs(d.u(x)))
    assert v.triggered == (direct < 0)
    assert v.margin == pytest.approx(direct, abs=1e-6)


def test_line_outside_range():
    assert check_blowup_line(InitialDatum("line", "gaussian"), 0.5).status == NOT_APPLICABLE
    assert check_blowup_line(InitialDatum("line", "gaussian"), 4.5).status == NOT_APPLICABLE


def test_datum_validation():
    with pytest.raises(DatumError):
        InitialDatum("circle", "gaussian")
    with pytest.raises(DatumError):
        InitialDatum("circle", samples=np.zeros(10))
    spike = np.zeros(256)
    spike[0] = 1.0
    rough = InitialDatum("circle", samples=spike)
    assert rough.decay_flag
    smooth = InitialDatum("circle", samples=np.sin(2 * np.pi * np.arange(256) / 256))
    assert not smooth.decay_flag
    assert smooth.u(0.1) == pytest.approx(np.sin(0.2 * np.pi), abs=1e-12)


def test_datum_round_trip():
    for d in (InitialDatum.sine(a=2.0), InitialDatum("circle", fourier=np.array([1.0, 0.5j]))):
        back = InitialDatum.from_dict(d.to_dict())
        x = np.linspace(0, 1, 7)
        np.testing.assert_allclose(back.u(x), d.u(x))


# ---------------------------------------------------------------------------
# comparison lemma


def test_harness_equality_case():
    for h, c in ((2.0, 1.0), (0.5, 3.0)):
        res = comparison_lemma_harness(h, h, c)
        exact = 1 / (c * h)
        assert res.bound == pytest.approx(exact)
        # the divergence level 1e10 is reached a relative 1e-10 before the pole
        assert res.blowup_time == pytest.approx(exact, rel=1e-8)


def test_harness_strictly_larger_rhs():
    res = comparison_lemma_harness(1.0, 1.0, 1.0, rhs=lambda t, f, g: (f * g + 1, f * g + 1))
    assert res.blowup_time < res.bound


def test_harness_unequal_data():
    res = comparison_lemma_harness(4.0, 1.0, 1.0)
    assert res.bound == pytest.approx(0.5)
    assert res.blowup_time <= 0.5


def test_harness_randomised_dominating():
    rng = np.random.default_rng(7)
    for _ in range(50):
        f0, g0 = rng.uniform(0.1, 5.0, 2)
        c = rng.uniform(0.2, 3.0)
        a, b, s = rng.uniform(0.0, 2.0, 3)

        def rhs(t, f, g, a=a, b=b, s=s, c=c):
            extra = a * f * f + b + s * abs(math.sin(t))
            return c * f * g + extra, c * f * g + b * g * g

        res = comparison_lemma_harness(f0, g0, c, rhs=rhs)
        assert res.blowup_time is not None
        assert res.blowup_time <= comparison_bound(f0, g0, c) + 1e-8


def test_harness_rejects_nonpositive():
    with pytest.raises(ValueError):
        comparison_lemma_harness(0.0, 1.0, 1.0)


# ---------------------------------------------------------------------------
# unique continuation and decay


def test_unique_continuation_constant_passes():
    rep = unique_continuation_check([np.full(128, 0.7)], 1.0)
    f = rep.frames[0]
    assert not f.violations and not f.contradiction_candidate


def test_unique_continuation_sine_violates():
    x = np.arange(256) / 256
    rep = unique_continuation_check([np.sin(2 * np.pi * x)], 1.0)
    f = rep.frames[0]
    assert f.contradiction_candidate
    assert any(v["sign"] == "nonnegative" for v in f.violations)
    assert rep.any_violation


def test_unique_continuation_zero_frame():
    rep = unique_continuation_check([np.zeros(64)], 2.0)
    f = rep.frames[0]
    assert f.identically_zero and not f.contradiction_candidate and not f.violations


def test_decay_test_line():
    assert decay_blowup_test_line(InitialDatum("line", "gaussian"), 1.0)
    assert not decay_blowup_test_line(InitialDatum("line", "peakon"), 1.0)
    assert decay_blowup_test_line(InitialDatum("line", "bump"), 2.0)
    assert not decay_blowup_test_line(InitialDatum("line", "gaussian"), 0.5)
