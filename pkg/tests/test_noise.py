from math import exp

import numpy as np
import pytest

from deconvkde.errors import NumericOverflowError
from deconvkde.estimator import empirical_cf
from deconvkde.noise import ErrorModel, get_noise, inverse_cf_magnitude, make_gaussian_noise


def test_gaussian_constants(noise04):
    assert noise04.mu == pytest.approx(12.5)
    assert (noise04.C, noise04.lambda0, noise04.lam) == (1.0, 0.0, 2.0)
    assert noise04.cf(0.0) == 1.0
    assert make_gaussian_noise(1.0).cf(1.0) == pytest.approx(exp(-0.5), rel=1e-15)


@pytest.mark.parametrize("sd", [0.0, -1.0, float("nan")])
def test_rejects_bad_sd(sd):
    with pytest.raises(ValueError):
        make_gaussian_noise(sd)


def test_cf_bounds(noise04):
    t = np.linspace(-30, 30, 601)
    cf = noise04.cf(t)
    assert np.all(np.abs(cf) <= 1)
    assert np.all(cf > 0)


@pytest.mark.parametrize("t", [50.0, 100.0])
def test_tail_matches_condition(t):
    m = make_gaussian_noise(0.1)
    tail = m.C * t**m.lambda0 * np.exp(-(t**m.lam) / m.mu)
    assert m.cf(t) / tail == pytest.approx(1.0, abs=1e-6)


def test_inverse_cf(noise04):
    assert inverse_cf_magnitude(noise04, 0.0) == 1.0
    assert inverse_cf_magnitude(noise04, 1 / 0.24) == pytest.approx(4.0104, abs=5e-5)
    assert inverse_cf_magnitude(noise04, 3.0, power=2) == pytest.approx(exp(0.16 * 9), rel=1e-14)


def test_inverse_cf_overflow(noise04):
    with pytest.raises(NumericOverflowError) as info:
        inverse_cf_magnitude(noise04, 1e4)
    assert info.value.exponent == pytest.approx(8e6)


def test_empirical_cf_of_samples(noise04):
    rng = np.random.default_rng(7)
    n = 100_000
    z = noise04.sample(rng, n)
    for t in (0.5, 1.0, 2.0):
        assert abs(empirical_cf(z, t) - noise04.cf(t)) < 3 / np.sqrt(n)


def test_get_noise():
    assert get_noise({"type": "gaussian", "sd": 2}).sd == 2.0
    with pytest.raises(ValueError, match="unknown noise type"):
        get_noise({"type": "laplace", "sd": 1})


def test_condition_parameters_validated():
    with pytest.raises(ValueError, match="lam"):
        ErrorModel("x", np.cos, np.cos, 1.0, 0.0, 1.0, 1.0, 1.0, None)
