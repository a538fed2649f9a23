"""Supersmooth measurement-error models.

An :class:`ErrorModel` carries the characteristic function of the error
density together with the constants of its tail,
``|phi_k(t)| ~ C |t|**lambda0 * exp(-|t|**lam / mu)``. Only symmetric
errors are supported: ``phi_k`` must be real and even, which is what makes
the deconvolution kernel ``w_h`` real.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import NumericOverflowError

__all__ = ["ErrorModel", "make_gaussian_noise", "inverse_cf_magnitude", "get_noise", "MAX_EXPONENT"]

# largest x with exp(x) finite in double precision
MAX_EXPONENT = float(np.log(np.finfo(float).max))


@dataclass(frozen=True, eq=False)
class ErrorModel:
    """Error density described through its characteristic function.

    ``log_abs_cf`` returns ``log |phi_k(t)|``; it is what the estimator uses,
    so that overflow of ``1/phi_k`` can be detected before it happens.
    ``sampler(rng, size)`` draws error variates.
    """

    name: str
    cf: Callable
    log_abs_cf: Callable
    C: float
    lambda0: float
    lam: float
    mu: float
    sd: float
    sampler: Optional[Callable] = None

    def __post_init__(self):
        if not self.lam > 1:
            raise ValueError(f"supersmooth errors need lam > 1, got {self.lam}")
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not self.sd > 0:
            raise ValueError(f"sd must be positive, got {self.sd}")

    def sample(self, rng, size):
        if self.sampler is None:
            raise NotImplementedError(f"no sampler attached to noise model {self.name!r}")
        return self.sampler(rng, size)

    def to_dict(self):
        return {"type": self.name, "sd": self.sd}


def make_gaussian_noise(sd):
    """N(0, sd^2) errors: ``C = 1``, ``lambda0 = 0``, ``lam = 2``, ``mu = 2/sd^2``."""
    sd = float(sd)
    if not sd > 0:
        raise ValueError(f"noise sd must be positive, got {sd}")
    var = sd * sd
    return ErrorModel(
        name="gaussian",
        cf=lambda t: np.exp(-0.5 * var * np.square(t)),
        log_abs_cf=lambda t: -0.5 * var * np.square(t),
        C=1.0,
        lambda0=0.0,
        lam=2.0,
        mu=2.0 / var,
        sd=sd,
        sampler=lambda rng, size: rng.normal(0.0, sd, size),
    )


def get_noise(spec):
    """Build a noise model from ``{"type": "gaussian", "sd": ...}``."""
    kind = spec.get("type", "gaussian")
    if kind != "gaussian":
        raise ValueError(f"unknown noise type {kind!r}; only 'gaussian' is built in")
    return make_gaussian_noise(spec["sd"])


def inverse_cf_magnitude(model, t, power=1):
    """``1/|phi_k(t)|**power``, raising instead of overflowing.

    Raises
    ------
    NumericOverflowError
        If the result would exceed the largest double; ``exponent`` holds
        the offending value of ``-power * log|phi_k(t)|``.
    """
    expo = -power * np.asarray(model.log_abs_cf(np.asarray(t, dtype=float)), dtype=float)
    worst = np.max(expo) if expo.size else 0.0
    if not worst <= MAX_EXPONENT:
        raise NumericOverflowError(worst)
    out = np.exp(expo)
    return float(out) if out.ndim == 0 else out
