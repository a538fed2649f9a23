r"""
Normalisations for the asymptotic normality of :math:`f_{nh}(x)`.

Deterministic normalisation: the limit standard deviation

.. math::

   \sigma = \frac{A\,\Gamma(\alpha+1)\,h^{\lambda(1+\alpha)+\lambda_0-1}
            e^{1/(\mu h^\lambda)}}{\sqrt{2n\pi^2}}
            \Big(\frac{\mu}{\lambda}\Big)^{1+\alpha}

comes from replacing the edge integral
:math:`I(h) = \int_0^1 \phi_w(s)\exp[s^\lambda/(\mu h^\lambda)]\,ds` by its
small-``h`` equivalent :math:`A\Gamma(\alpha+1)(\mu h^\lambda/\lambda)^{1+\alpha}
e^{1/(\mu h^\lambda)}`. Keeping :math:`I(h)` itself gives the corrected
value :math:`\tilde\sigma = I(h)/(\pi h\sqrt{2n})`.

Self-normalisation: :func:`fan_statistic` studentises with the empirical
scale of :math:`Z_{nj} = h^{-1} w_h((x - X_j)/h)`.
"""

from dataclasses import dataclass
from math import exp, gamma, log, pi, sqrt

import numpy as np
from scipy.integrate import quad

from .errors import DegenerateScaleError, NumericOverflowError
from .estimator import smoothed_kernel
from .noise import MAX_EXPONENT

__all__ = [
    "AsymptoticSpec",
    "theoretical_sd",
    "edge_integral",
    "scaled_edge_integral",
    "corrected_sd",
    "approximation_ratio",
    "fan_statistic",
    "studentize",
    "cosine_variance_stat",
]


@dataclass(frozen=True)
class AsymptoticSpec:
    A: float
    alpha: float
    lambda0: float
    lam: float
    mu: float
    h: float
    n: int
    x: float = 0.0

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError(f"bandwidth must be positive, got {self.h}")
        if not self.n >= 2:
            raise ValueError(f"sample size must be at least 2, got {self.n}")
        if not self.lam > 1:
            raise ValueError(f"lam must exceed 1, got {self.lam}")
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")

    @classmethod
    def from_models(cls, kernel, noise, h, n, x=0.0):
        return cls(kernel.A, kernel.alpha, noise.lambda0, noise.lam, noise.mu, h, int(n), x)

    @property
    def edge_exponent(self):
        """``1/(mu h^lam)``, the exponent of the dominant factor."""
        return 1.0 / (self.mu * self.h**self.lam)


def theoretical_sd(spec):
    """Standard deviation implied by the deterministic-normalisation CLT.

    Uses the rate ``h^(lam(1+alpha) + lambda0 - 1)``, the one matching the
    normalising sequence of the limit theorem.
    """
    c = spec.edge_exponent
    if c > MAX_EXPONENT:
        raise NumericOverflowError(c)
    rate = spec.lam * (1 + spec.alpha) + spec.lambda0 - 1
    log_sd = (
        log(spec.A)
        + log(gamma(spec.alpha + 1))
        + rate * log(spec.h)
        + c
        + (1 + spec.alpha) * log(spec.mu / spec.lam)
        - 0.5 * log(2 * spec.n * pi**2)
    )
    return exp(log_sd)


def scaled_edge_integral(kernel, noise, h):
    """``exp(-c) I(h) = int_0^1 phi_w(s) exp[c (s^lam - 1)] ds`` with ``c = 1/(mu h^lam)``.

    Finite for every ``h > 0``; the building block of the other edge quantities.
    """
    if not h > 0:
        raise ValueError(f"bandwidth must be positive, got {h}")
    c = 1.0 / (noise.mu * h**noise.lam)
    lam = noise.lam

    def integrand(s):
        return float(kernel.fourier_transform(s)) * exp(c * (s**lam - 1.0))

    total = 0.0
    for a, b in kernel.panels():
        # the mass piles up within ~1/(lam c) of s = 1
        pts = [p for p in (1.0 - 1.0 / (lam * c), 1.0 - 10.0 / (lam * c)) if a < p < b]
        total += quad(integrand, a, b, points=pts or None, epsabs=0.0, epsrel=1e-12, limit=500)[0]
    return total


def edge_integral(kernel, noise, h):
    """``I(h) = int_0^1 phi_w(s) exp[s^lam / (mu h^lam)] ds``."""
    c = 1.0 / (noise.mu * h**noise.lam)
    if c > MAX_EXPONENT:
        raise NumericOverflowError(c)
    return scaled_edge_integral(kernel, noise, h) * exp(c)


def corrected_sd(kernel, noise, h, n):
    """``I(h) / (pi h sqrt(2n))``: the limit SD with the exact edge integral."""
    return edge_integral(kernel, noise, h) / (pi * h * sqrt(2 * n))


def approximation_ratio(kernel, noise, h):
    """``I(h)`` over its small-bandwidth equivalent; tends to 1 as ``h -> 0``.

    Computed from the scaled integral, so it never overflows.
    """
    lam, mu = noise.lam, noise.mu
    leading = kernel.A * gamma(kernel.alpha + 1) * (mu * h**lam / lam) ** (1 + kernel.alpha)
    return scaled_edge_integral(kernel, noise, h) / leading


def studentize(z, centering, variant="plain"):
    """``sqrt(n) (mean(z) - centering) / s_n`` for scores ``z``.

    ``variant="plain"`` uses ``s_n^2 = mean(z^2)``; ``"sample-variance"``
    uses the unbiased sample variance of ``z``.
    """
    z = np.asarray(z, dtype=float)
    n = z.shape[-1]
    if n < 2:
        raise ValueError("need at least two observations")
    if variant == "plain":
        scale = np.sqrt(np.mean(z * z, axis=-1))
    elif variant == "sample-variance":
        scale = np.std(z, axis=-1, ddof=1)
        # identical scores can leave a rounding residue in np.std
        scale = np.where(np.ptp(z, axis=-1) == 0, 0.0, scale)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    if np.any(scale == 0):
        raise DegenerateScaleError(f"s_n = 0 ({variant}); all scores coincide")
    return np.sqrt(n) * (np.mean(z, axis=-1) - centering) / scale


def fan_statistic(config, data, x, centering, variant="plain"):
    """Self-normalised statistic ``sqrt(n) (f_nh(x) - centering) / s_n``.

    ``centering`` should be ``E f_nh(x)``; see
    :func:`deconvkde.estimator.expected_estimate`.

    Raises
    ------
    DegenerateScaleError
        If ``s_n`` is zero.
    """
    data = np.asarray(data, dtype=float).ravel()
    z = smoothed_kernel(config, (x - data) / config.h) / config.h
    return float(studentize(z, centering, variant))


def cosine_variance_stat(data, x, h):
    """Unbiased sample variance of ``cos((x - X_j)/h)`` (zero for one point)."""
    data = np.asarray(data, dtype=float).ravel()
    if data.size == 0:
        raise ValueError("data must be nonempty")
    c = np.cos((x - data) / h)
    if data.size == 1:
        return 0.0
    return float(np.var(c, ddof=1))
