r"""
Exact mean integrated squared error and grid-search bandwidth choice.

By Parseval's identity, with :math:`\phi_{nh}(t) = \phi_w(ht)\phi_{emp}(t)/\phi_k(t)`,

.. math::

   \mathrm{MISE}(h) = \frac{1}{2\pi n}\int \frac{\phi_w(ht)^2}{|\phi_k(t)|^2}dt
     + \frac{1}{2\pi}\Big(1-\frac1n\Big)\int \phi_w(ht)^2|\phi_f(t)|^2dt
     - \frac{1}{\pi}\int \phi_w(ht)|\phi_f(t)|^2dt
     + \frac{1}{2\pi}\int |\phi_f(t)|^2dt .

Everything but the last integral lives on ``|t| <= 1/h``.
"""

import csv
from dataclasses import dataclass
from math import pi

import numpy as np
from scipy.integrate import quad

from .errors import NumericOverflowError
from .noise import inverse_cf_magnitude

__all__ = ["MiseTerms", "MiseCurve", "mise_terms", "exact_mise", "mise_grid_search", "DEFAULT_GRID"]

DEFAULT_GRID = np.round(0.01 * np.arange(1, 101), 2)


@dataclass(frozen=True)
class MiseTerms:
    """The four integrals of the Parseval expansion, already divided by ``2 pi``.

    ``variance``: ``(1/2pi) int phi_w(ht)^2 / |phi_k(t)|^2``
    ``smoothed``: ``(1/2pi) int phi_w(ht)^2 |phi_f(t)|^2``
    ``cross``: ``(1/2pi) int phi_w(ht) |phi_f(t)|^2``
    ``roughness``: ``(1/2pi) int |phi_f(t)|^2 = int f^2``
    """

    variance: float
    smoothed: float
    cross: float
    roughness: float

    def mise(self, n):
        return self.variance / n + (1 - 1 / n) * self.smoothed - 2 * self.cross + self.roughness

    def integrated_squared_bias(self):
        return self.smoothed - 2 * self.cross + self.roughness


@dataclass
class MiseCurve:
    bandwidths: np.ndarray
    mise: np.ndarray
    argmin_h: float
    n: int

    def to_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["h", "mise"])
        for h, m in zip(self.bandwidths, self.mise):
            writer.writerow([repr(float(h)), "" if not np.isfinite(m) else repr(float(m))])


def _integrate(fn, panels, scale):
    # |phi_f|^2 can be tiny next to the variance term; tolerance is relative
    return sum(quad(fn, a, b, epsabs=1e-14 * scale, epsrel=1e-12, limit=500)[0] for a, b in panels)


def _roughness(target):
    cf2 = lambda t: abs(complex(target.cf(t))) ** 2  # noqa: E731
    return quad(cf2, 0, np.inf, epsabs=1e-14, epsrel=1e-12, limit=500)[0] / pi


def mise_terms(kernel, noise, target, h, roughness=None):
    """Compute the integrals of the Parseval expansion at bandwidth ``h``.

    The variance term is ``inf`` if ``1/|phi_k(1/h)|^2`` overflows.
    """
    if not h > 0:
        raise ValueError(f"bandwidth must be positive, got {h}")
    panels = kernel.panels()
    ft = kernel.fourier_transform
    # substitute s = h t so every integral runs over [0, 1]
    try:
        inverse_cf_magnitude(noise, 1.0 / h, power=2)
        variance = _integrate(
            lambda s: float(ft(s)) ** 2 * inverse_cf_magnitude(noise, s / h, power=2), panels, 1.0
        ) / (pi * h)
    except NumericOverflowError:
        variance = np.inf
    cf2 = lambda s: abs(complex(target.cf(s / h))) ** 2  # noqa: E731
    smoothed = _integrate(lambda s: float(ft(s)) ** 2 * cf2(s), panels, h) / (pi * h)
    cross = _integrate(lambda s: float(ft(s)) * cf2(s), panels, h) / (pi * h)
    if roughness is None:
        roughness = _roughness(target)
    return MiseTerms(variance, smoothed, cross, roughness)


def exact_mise(kernel, noise, target, n, h):
    """Exact MISE of the deconvolution estimator; ``inf`` when the variance overflows."""
    if int(n) < 1:
        raise ValueError(f"sample size must be at least 1, got {n}")
    return mise_terms(kernel, noise, target, h).mise(int(n))


def mise_grid_search(kernel, noise, target, n, bandwidths=DEFAULT_GRID):
    """Minimise exact MISE over ``bandwidths`` (default ``0.01, ..., 1.00``).

    Ties go to the smallest bandwidth.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"sample size must be at least 1, got {n}")
    hs = np.asarray(bandwidths, dtype=float)
    rough = _roughness(target)
    values = np.array([mise_terms(kernel, noise, target, h, roughness=rough).mise(n) for h in hs])
    finite = np.isfinite(values)
    if not finite.any():
        raise ValueError(
            f"MISE overflows at every bandwidth in [{hs.min()}, {hs.max()}] "
            f"(noise sd {noise.sd}); try larger bandwidths"
        )
    masked = np.where(finite, values, np.inf)
    ties = np.flatnonzero(masked == masked.min())
    best = ties[np.argmin(hs[ties])]
    return MiseCurve(hs, values, float(hs[best]), n)
