"""Ground-truth target densities used in the simulation study."""

from dataclasses import dataclass
from math import pi, sqrt
from typing import Callable

import numpy as np
from scipy import special, stats

__all__ = [
    "TargetDensity",
    "make_density_1",
    "make_density_2",
    "make_density_3",
    "make_chi3",
    "get_target",
    "nsr",
    "sample_convolved",
    "TARGETS",
]


@dataclass(frozen=True, eq=False)
class TargetDensity:
    """A density known in closed form, with its characteristic function.

    ``sampler(rng, size)`` must draw i.i.d. variates from ``pdf`` using only
    the generator it is handed.
    """

    name: str
    pdf: Callable
    cf: Callable
    mean: float
    variance: float
    sampler: Callable
    support: tuple = (-np.inf, np.inf)

    def sample(self, rng, size):
        return self.sampler(rng, size)


def make_density_1():
    """Standard normal."""
    return TargetDensity(
        name="normal",
        pdf=lambda x: np.exp(-0.5 * np.square(x)) / sqrt(2 * pi),
        cf=lambda t: np.exp(-0.5 * np.square(t)).astype(complex),
        mean=0.0,
        variance=1.0,
        sampler=lambda rng, size: rng.standard_normal(size),
    )


def _chisq3_pdf(x):
    x = np.asarray(x, dtype=float)
    pos = np.clip(x, 0.0, None)
    return np.where(x > 0, np.sqrt(pos) * np.exp(-pos / 2) / sqrt(2 * pi), 0.0)


def _chisq3_cf(t):
    # 1 - 2it has positive real part, so the principal log is continuous
    # along the real axis and equals 0 at t = 0.
    z = 1.0 - 2j * np.asarray(t, dtype=float)
    return np.exp(-1.5 * np.log(z))


def _chisq3_sample(rng, size):
    z = rng.standard_normal((int(size), 3))
    return np.sum(z * z, axis=1)


def make_density_2():
    """Chi-square with three degrees of freedom."""
    return TargetDensity(
        name="chisq3",
        pdf=_chisq3_pdf,
        cf=_chisq3_cf,
        mean=3.0,
        variance=6.0,
        sampler=_chisq3_sample,
        support=(0.0, np.inf),
    )


def _chi3_pdf(x):
    x = np.asarray(x, dtype=float)
    return np.where(x > 0, sqrt(2 / pi) * x * x * np.exp(-0.5 * x * x), 0.0)


def _chi3_cf(t):
    # E exp(itY) = (1 - t^2) e^{-t^2/2} + i (2/sqrt(pi)) (D(u) + u - 2 u^2 D(u)),
    # u = t/sqrt(2), D = Dawson's integral
    t = np.asarray(t, dtype=float)
    u = t / sqrt(2)
    d = special.dawsn(u)
    return (1 - t * t) * np.exp(-0.5 * t * t) + 1j * (2 / sqrt(pi)) * (d + u - 2 * u * u * d)


def _chi3_sample(rng, size):
    z = rng.standard_normal((int(size), 3))
    return np.sqrt(np.sum(z * z, axis=1))


def make_chi3():
    """Chi distribution with three degrees of freedom (Maxwell).

    This is the law of the square root of a chi-square(3) variate. The
    reference bandwidths and sample moments for the skewed test density
    are reproduced by this distribution rather than by chi-square(3).
    """
    return TargetDensity(
        name="chi3",
        pdf=_chi3_pdf,
        cf=_chi3_cf,
        mean=2 * sqrt(2 / pi),
        variance=3 - 8 / pi,
        sampler=_chi3_sample,
        support=(0.0, np.inf),
    )


_MIX_W = np.array([0.6, 0.4])
_MIX_MU = np.array([-2.0, 2.0])
_MIX_SD = np.array([1.0, 0.8])


def _mix_pdf(x):
    x = np.asarray(x, dtype=float)[..., None]
    return np.sum(_MIX_W * stats.norm.pdf(x, _MIX_MU, _MIX_SD), axis=-1)


def _mix_cf(t):
    t = np.asarray(t, dtype=float)[..., None]
    comp = np.exp(1j * _MIX_MU * t - 0.5 * np.square(_MIX_SD * t))
    return np.sum(_MIX_W * comp, axis=-1)


def _mix_sample(rng, size):
    labels = rng.random(size) < _MIX_W[1]
    z = rng.standard_normal(size)
    return np.where(labels, _MIX_MU[1] + _MIX_SD[1] * z, _MIX_MU[0] + _MIX_SD[0] * z)


def make_density_3():
    """Bimodal mixture 0.6 N(-2, 1) + 0.4 N(2, 0.8^2)."""
    mean = float(np.dot(_MIX_W, _MIX_MU))
    second = float(np.dot(_MIX_W, _MIX_SD**2 + _MIX_MU**2))
    return TargetDensity(
        name="mixture",
        pdf=_mix_pdf,
        cf=_mix_cf,
        mean=mean,
        variance=second - mean**2,
        sampler=_mix_sample,
    )


TARGETS = {
    "normal": make_density_1,
    "chisq3": make_density_2,
    "mixture": make_density_3,
    "chi3": make_chi3,
}


def get_target(name):
    try:
        return TARGETS[name]()
    except KeyError:
        raise ValueError(f"unknown target {name!r}; expected one of {sorted(TARGETS)}") from None


def nsr(target, noise):
    """Noise-to-signal ratio ``Var[Z]/Var[Y]`` in percent."""
    if not target.variance > 0:
        raise ValueError(f"target {target.name!r} has nonpositive variance")
    return 100.0 * noise.sd**2 / target.variance


def sample_convolved(target, noise, n, rng):
    """Draw ``n`` contaminated observations ``X = Y + Z``.

    ``Y`` is drawn before ``Z``, both from ``rng``, so the result depends
    only on the generator state.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"sample size must be at least 1, got {n}")
    y = target.sample(rng, n)
    z = noise.sample(rng, n)
    return y + z
