import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from rodwaves.kernel import (
    BETA_MAX,
    E,
    InadmissibleWeightError,
    WeightSpec,
    convolve_periodic,
    convolve_weight,
    eval_p,
    eval_p_prime,
    eval_weight,
    p_prime_limit,
    periodic_grid,
    weight_mass,
    weight_values,
)

interior = st.floats(min_value=1e-6, max_value=1 - 1e-6)
admissible_beta = st.floats(min_value=-BETA_MAX, max_value=BETA_MAX)


def test_p_reference_values():
    assert eval_p(0.0) == pytest.approx(math.cosh(0.5) / (2 * math.sinh(0.5)), abs=1e-14)
    assert eval_p(0.5) == pytest.approx(1 / (2 * math.sinh(0.5)), abs=1e-15)
    assert eval_p(1.5) == pytest.approx(eval_p(0.5), abs=1e-15)


def test_p_prime_values_and_jump():
    assert eval_p_prime(0.5) == 0.0
    assert eval_p_prime(1e-12) == pytest.approx(-0.5, abs=1e-11)
    assert p_prime_limit(3, "+") == -0.5
    assert p_prime_limit(3, "-") == 0.5
    assert p_prime_limit(0, "+") / eval_p(0.0) == pytest.approx(-(E - 1) / (E + 1), abs=1e-14)
    with pytest.raises(ValueError, match="lattice"):
        eval_p_prime(2.0)
    with pytest.raises(ValueError, match="lattice"):
        eval_p_prime(np.array([0.3, 1.0]))


@given(st.floats(min_value=-20, max_value=20), st.integers(min_value=-5, max_value=5))
def test_p_is_periodic(x, n):
    assert eval_p(x + n) == pytest.approx(eval_p(x), rel=1e-10)


@given(interior)
def test_exponential_form_matches_cosh_form(x):
    assert (math.exp(x) + math.exp(1 - x)) / (2 * (E - 1)) == pytest.approx(eval_p(x), rel=1e-13)
    assert (math.exp(x) - math.exp(1 - x)) / (2 * (E - 1)) == pytest.approx(
        eval_p_prime(x), abs=1e-13)


def test_limit_weight_values():
    spec = WeightSpec(BETA_MAX)
    assert spec.is_limit
    assert eval_weight(spec, 0.5) == pytest.approx(2 * E / (E - 1) ** 2 * math.sinh(0.5), abs=1e-14)
    # p'(1/2) = 0, so every weight agrees with p at the midpoint
    assert eval_weight(spec, 0.5) == pytest.approx(eval_p(0.5), abs=1e-14)
    assert spec.endpoint(0) == 0.0
    assert eval_weight(WeightSpec(0.0), 0.5) == pytest.approx(eval_p(0.5), abs=1e-15)


def test_inadmissible_weight_raises():
    with pytest.raises(InadmissibleWeightError, match="changes sign"):
        eval_weight(WeightSpec(2.5), 0.5)
    assert not WeightSpec(-2.2).admissible


@settings(max_examples=200)
@given(st.floats(min_value=-3, max_value=3))
def test_nonnegative_iff_admissible(beta):
    x = np.linspace(0, 1, 10_001)
    has_negative = bool(np.any(weight_values(beta, x) < -1e-12))
    assert has_negative == (abs(beta) > BETA_MAX + 1e-12)


@settings(max_examples=50)
@given(admissible_beta)
def test_weight_mass_is_one(beta):
    assert abs(weight_mass(beta) - 1.0) < 1e-12


@given(admissible_beta, interior)
def test_reflection_symmetry(beta, x):
    assert weight_values(beta, 1 - x) == pytest.approx(weight_values(-beta, x), rel=1e-12, abs=1e-14)


def test_convolution_of_constants():
    f = np.full(64, 3.0)
    np.testing.assert_allclose(convolve_periodic(f, "p"), 3.0, atol=1e-14)
    np.testing.assert_allclose(convolve_periodic(f, "p_prime"), 0.0, atol=1e-14)


def test_convolution_of_cosine_multiplier():
    x = periodic_grid(128)
    f = np.cos(2 * np.pi * x)
    np.testing.assert_allclose(convolve_periodic(f), f / (1 + 4 * np.pi**2), atol=1e-14)


def _direct_convolution(kernel, f, x):
    # int_0^1 kernel(x - y) f(y) dy with the kink of p at y = x split out
    pts = [x % 1.0] if 0.0 < x % 1.0 < 1.0 else None
    return quad(lambda y: kernel(x - y) * f(y), 0.0, 1.0, points=pts, epsabs=1e-13, limit=200)[0]


def test_spectral_matches_quadrature():
    n = 256
    x = periodic_grid(n)

    def f(y):
        return np.exp(np.sin(2 * np.pi * y)) + 0.3 * np.cos(6 * np.pi * y)

    beta = 0.7
    spec = convolve_weight(beta, f(x))

    def kern(z):
        r = z - math.floor(z)
        if r == 0.0:
            return float(eval_p(z))
        return float(eval_p(z) + beta * eval_p_prime(z))

    for j in (0, 17, 101, 200):
        assert spec[j] == pytest.approx(_direct_convolution(kern, f, x[j]), abs=1e-8)


def test_grid_size_checked():
    with pytest.raises(ValueError, match="power of two"):
        convolve_periodic(np.ones(100))
