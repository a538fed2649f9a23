from math import pi

import numpy as np
import pytest
from scipy.integrate import quad

from deconvkde.kernels import Kernel, check_kernel, edge_ratio, get_kernel, make_fan, make_sinc, make_wand


def fourier_inversion(kernel, x):
    # w(x) = (1/pi) int_0^1 cos(tx) phi_w(t) dt, panel by panel
    return sum(
        quad(lambda t: np.cos(t * x) * kernel.ft(t), a, b, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
        for a, b in kernel.panels()
    ) / pi


def test_sinc_values(sinc):
    assert sinc.ft(0.5) == 1.0
    assert sinc.ft(1.01) == 0.0
    assert sinc.w(0.0) == pytest.approx(1 / pi, rel=1e-15)
    assert sinc.w(2.0) == pytest.approx(np.sin(2.0) / (2 * pi), rel=1e-14)
    assert (sinc.A, sinc.alpha) == (1, 0)


def test_fan_values(fan):
    assert fan.ft(0.5) == pytest.approx(0.421875, abs=1e-15)
    assert (fan.A, fan.alpha) == (8, 3)
    assert abs(edge_ratio(fan, 1e-3) - 1) < 5e-3


@pytest.mark.parametrize("x", [2.0, 5.0, 10.0])
def test_fan_closed_form_matches_inversion(fan, x):
    assert fan.w(x) == pytest.approx(fourier_inversion(fan, x), abs=1e-8)


def test_fan_taylor_branch_is_continuous(fan):
    # the series is used below 0.5, the closed form above
    left, right = fan.w(0.5 - 1e-12), fan.w(0.5 + 1e-12)
    assert left == pytest.approx(right, abs=1e-10)
    assert fan.w(0.0) == pytest.approx(16 / 35 / pi, rel=1e-13)


def test_wand_values(wand):
    assert wand.w(0.0) == pytest.approx(3 / (8 * pi), rel=1e-14)
    assert wand.ft(0.75) == pytest.approx(0.03125, abs=1e-15)
    assert wand.ft(0.25) == pytest.approx(0.71875, abs=1e-15)
    assert (wand.A, wand.alpha) == (2, 3)


@pytest.mark.parametrize("name", ["sinc", "fan", "wand"])
def test_inversion_reproduces_time_domain(name):
    kernel = get_kernel(name)
    xs = np.linspace(-20, 20, 81)
    for x in xs:
        assert kernel.w(x) == pytest.approx(fourier_inversion(kernel, x), abs=1e-6)


@pytest.mark.parametrize("name", ["sinc", "fan", "wand"])
def test_symmetry_and_support(name):
    kernel = get_kernel(name)
    x = np.linspace(0, 30, 301)
    np.testing.assert_array_equal(kernel.w(x), kernel.w(-x))
    t = np.linspace(0, 1.5, 301)
    np.testing.assert_array_equal(kernel.ft(t), kernel.ft(-t))
    assert np.all(kernel.ft(t[t > 1]) == 0)
    assert kernel.ft(0.0) == 1.0


def test_edge_ratio_converges_monotonically(fan):
    dev = np.abs(edge_ratio(fan, [1e-2, 1e-3, 1e-4, 1e-5]) - 1)
    assert np.all(np.diff(dev) < 0)


@pytest.mark.parametrize("name", ["sinc", "wand"])
def test_edge_ratio_exact(name):
    # phi_w(1 - t) = A t^alpha holds exactly near the edge; only rounding of 1 - t remains
    kernel = get_kernel(name)
    np.testing.assert_allclose(edge_ratio(kernel, [1e-2, 1e-3, 1e-4, 1e-5]), 1.0, atol=1e-10)


@pytest.mark.parametrize("name", ["sinc", "fan", "wand"])
def test_time_domain_integrates_to_one(name):
    kernel = get_kernel(name)
    if name == "sinc":
        # conditionally convergent: int_{-L}^{L} sin x/(pi x) = (2/pi) Si(L)
        from scipy.special import sici

        assert 2 / pi * sici(1e4)[0] == pytest.approx(1, abs=1e-4)
        return
    total = 2 * sum(quad(kernel.w, k, k + 1.0, epsabs=1e-14, limit=200)[0] for k in range(0, 2000))
    assert total == pytest.approx(1.0, abs=1e-6)


def test_user_kernel_accepted():
    # (1 - t^2)^2 behaves like 4 t^2 at the edge
    k = Kernel(
        "user",
        lambda t: np.where(np.abs(t) <= 1, (1 - np.minimum(t * t, 1.0)) ** 2, 0.0),
        lambda x: np.zeros_like(x),
        A=4.0,
        alpha=2.0,
    )
    assert k.ft(0.0) == 1.0


@pytest.mark.parametrize(
    "ft, A, alpha, match",
    [
        (lambda t: np.where(np.abs(t) <= 1, 0.5, 0.0), 1, 0, "fourier_transform\\(0\\)"),
        (lambda t: np.where(np.abs(t) <= 2, 1.0, 0.0), 1, 0, "vanish"),
        (lambda t: np.where(np.abs(t) <= 1, 1 - 0.1 * t, 0.0), 1, 0, "not even"),
        (lambda t: np.where(np.abs(t) <= 1, (1 - t * t) ** 3, 0.0), 1, 3, "edge ratio"),
    ],
)
def test_user_kernel_rejected(ft, A, alpha, match):
    with pytest.raises(ValueError, match=match):
        Kernel("bad", ft, lambda x: x, A=A, alpha=alpha)


def test_builtins_pass_checks():
    for make in (make_sinc, make_fan, make_wand):
        check_kernel(make())


def test_unknown_kernel():
    with pytest.raises(ValueError, match="unknown kernel"):
        get_kernel("epanechnikov")
