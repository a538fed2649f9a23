r"""
Deconvolution kernels with compactly supported Fourier transforms.

A kernel is described by its Fourier transform :math:`\phi_w` on
:math:`[-1, 1]` and by the matching time-domain function :math:`w`.
The edge behaviour :math:`\phi_w(1 - t) \approx A t^\alpha` as
:math:`t \downarrow 0` drives the asymptotic variance of the estimator,
so every kernel carries the two constants ``A`` and ``alpha``.

Three kernels are built in:

- ``sinc``: :math:`w(x) = \sin x / (\pi x)`, :math:`\phi_w = 1_{[-1,1]}`
- ``fan``: :math:`\phi_w(t) = (1 - t^2)^3`
- ``wand``: :math:`w(x) = \frac{3}{8\pi}(\sin(x/4)/(x/4))^4`
"""

from dataclasses import dataclass, field
from math import factorial, pi
from typing import Callable, Tuple

import numpy as np

__all__ = [
    "Kernel",
    "make_sinc",
    "make_fan",
    "make_wand",
    "get_kernel",
    "check_kernel",
    "edge_ratio",
    "KERNELS",
]


@dataclass(frozen=True, eq=False)
class Kernel:
    """A deconvolution kernel.

    Parameters
    ----------
    name : str
        Identifier used on the command line and in config files.
    fourier_transform : callable
        Vectorised :math:`\\phi_w(t)`; must vanish for ``|t| > 1``.
    time_domain : callable
        Vectorised :math:`w(x)`.
    A, alpha : float
        Edge constants, :math:`\\phi_w(1 - t) \\sim A t^\\alpha`.
    breakpoints : tuple of float
        Points in ``(0, 1)`` where ``fourier_transform`` is not smooth.
        Quadrature rules split there.
    validate : bool
        Check the invariants at construction. Built-in kernels skip this.
    """

    name: str
    fourier_transform: Callable
    time_domain: Callable
    A: float
    alpha: float
    breakpoints: Tuple[float, ...] = ()
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        if self.validate:
            check_kernel(self)

    def ft(self, t):
        """``fourier_transform`` as a float array."""
        return np.asarray(self.fourier_transform(np.asarray(t, dtype=float)), dtype=float)

    def w(self, x):
        return np.asarray(self.time_domain(np.asarray(x, dtype=float)), dtype=float)

    def panels(self):
        """Sub-intervals of ``[0, 1]`` on which ``ft`` is smooth."""
        edges = [0.0, *sorted(self.breakpoints), 1.0]
        return list(zip(edges[:-1], edges[1:]))


def edge_ratio(kernel, t):
    """``phi_w(1 - t) / (A t**alpha)``; tends to one as ``t -> 0``."""
    t = np.asarray(t, dtype=float)
    return kernel.ft(1.0 - t) / (kernel.A * t**kernel.alpha)


def check_kernel(kernel, step=1e-3):
    """Raise ``ValueError`` unless ``kernel`` satisfies the kernel conditions.

    The Fourier transform is checked on a grid of spacing ``step`` over
    ``[-1.5, 1.5]``: value one at the origin, evenness, vanishing outside
    ``[-1, 1]``. The edge ratio must be within 5% of one at ``t = 1e-3``
    and no worse at ``t = 1e-4``.
    """
    problems = []
    if not kernel.alpha >= 0:
        problems.append(f"alpha must be >= 0, got {kernel.alpha}")
    if not kernel.A != 0:
        problems.append("A must be nonzero")
    t = np.arange(0.0, 1.5 + step / 2, step)
    pos = kernel.ft(t)
    neg = kernel.ft(-t)
    if not np.isfinite(pos).all():
        problems.append("fourier_transform is not finite on [-1.5, 1.5]")
    if abs(pos[0] - 1.0) > 1e-12:
        problems.append(f"fourier_transform(0) = {pos[0]!r}, expected 1")
    if np.max(np.abs(pos - neg)) > 1e-12:
        problems.append("fourier_transform is not even")
    if np.max(np.abs(pos[t > 1.0 + 1e-12])) != 0.0:
        problems.append("fourier_transform does not vanish outside [-1, 1]")
    if not problems:
        r3, r4 = np.abs(edge_ratio(kernel, [1e-3, 1e-4]) - 1.0)
        if not (r3 <= 0.05 and r4 <= r3 + 1e-12):
            problems.append(
                f"edge ratio phi_w(1-t)/(A t^alpha) not converging to 1 "
                f"(deviations {r3:.3g} at 1e-3, {r4:.3g} at 1e-4)"
            )
    if problems:
        raise ValueError(f"kernel {kernel.name!r}: " + "; ".join(problems))


# -- sinc ---------------------------------------------------------------------

def _sinc_ft(t):
    return np.where(np.abs(t) <= 1.0, 1.0, 0.0)


def _sinc_w(x):
    # np.sinc(x) = sin(pi x)/(pi x)
    return np.sinc(x / pi) / pi


def make_sinc():
    """The sinc kernel, ``A = 1``, ``alpha = 0``."""
    return Kernel("sinc", _sinc_ft, _sinc_w, A=1.0, alpha=0.0, validate=False)


# -- fan ----------------------------------------------------------------------

def _fan_ft(t):
    return np.where(np.abs(t) <= 1.0, (1.0 - t * t) ** 3, 0.0)


def _fan_moment(k):
    # int_0^1 t^(2k) (1 - t^2)^3 dt
    return 1 / (2 * k + 1) - 3 / (2 * k + 3) + 3 / (2 * k + 5) - 1 / (2 * k + 7)


# w(x) = (1/pi) sum_k (-1)^k m_k x^(2k) / (2k)!
_FAN_TAYLOR = np.array([(-1) ** k * _fan_moment(k) / factorial(2 * k) / pi for k in range(14)])
_FAN_SWITCH = 0.5


def _fan_w(x):
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < _FAN_SWITCH
    xs = x[small]
    out[small] = np.polynomial.polynomial.polyval(xs * xs, _FAN_TAYLOR)
    xl = np.abs(x[~small])  # exactly even
    c, s = np.cos(xl), np.sin(xl)
    out[~small] = (48 * c / (pi * xl**4)) * (1 - 15 / xl**2) - (144 * s / (pi * xl**5)) * (
        2 - 5 / xl**2
    )
    return out


def make_fan():
    """The kernel with ``phi_w(t) = (1 - t^2)^3``; ``A = 8``, ``alpha = 3``.

    The closed-form time-domain expression suffers catastrophic
    cancellation near zero, so ``|x| < 0.5`` uses the Taylor series built
    from the moments of ``phi_w``.
    """
    return Kernel("fan", _fan_ft, _fan_w, A=8.0, alpha=3.0, validate=False)


# -- wand ---------------------------------------------------------------------

def _wand_ft(t):
    a = np.abs(t)
    inner = 6 * a**3 - 6 * a**2 + 1
    outer = 2 * (1 - a) ** 3
    return np.where(a <= 0.5, inner, np.where(a <= 1.0, outer, 0.0))


def _wand_w(x):
    return 3 / (8 * pi) * np.sinc(np.asarray(x, dtype=float) / (4 * pi)) ** 4


def make_wand():
    """The fourth power of a sinc, ``A = 2``, ``alpha = 3``."""
    return Kernel("wand", _wand_ft, _wand_w, A=2.0, alpha=3.0, breakpoints=(0.5,), validate=False)


KERNELS = {"sinc": make_sinc, "fan": make_fan, "wand": make_wand}


def get_kernel(name):
    """Look a built-in kernel up by name."""
    try:
        return KERNELS[name]()
    except KeyError:
        raise ValueError(f"unknown kernel {name!r}; expected one of {sorted(KERNELS)}") from None
