r"""
Deconvolution kernel density estimator.

For observations :math:`X_j = Y_j + Z_j` with error characteristic
function :math:`\phi_k`, the estimator is

.. math::

   f_{nh}(x) = \frac{1}{2\pi}\int e^{-itx}
       \frac{\phi_w(ht)\,\phi_{emp}(t)}{\phi_k(t)}\,dt
     = \frac{1}{nh}\sum_j w_h\Big(\frac{x - X_j}{h}\Big),
   \qquad
   w_h(u) = \frac{1}{\pi}\int_0^1 \cos(tu)\,\frac{\phi_w(t)}{\phi_k(t/h)}\,dt .

Two evaluation paths are provided: a pointwise one that evaluates
:math:`w_h` by quadrature (:func:`estimate_at`) and a binned FFT one for
whole grids (:func:`estimate_grid_fft`).
"""

import json
import warnings
from dataclasses import dataclass, field
from math import ceil, pi
from typing import Optional

import numpy as np
from scipy.integrate import quad

from .noise import inverse_cf_magnitude

__all__ = [
    "Grid",
    "EstimatorConfig",
    "EstimateGrid",
    "empirical_cf",
    "multiplier",
    "smoothed_kernel",
    "estimate_at",
    "estimate_grid_fft",
    "default_grid",
    "linear_binning",
    "expected_estimate",
    "kde_convolution",
    "population_moments",
]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)
# radians of oscillation (plus exponential growth) one 64-point panel absorbs
_PANEL_BUDGET = 40.0
FFT_PADDING = 4


@dataclass(frozen=True)
class Grid:
    """``num_points`` equispaced points from ``lo`` to ``hi`` inclusive."""

    lo: float
    hi: float
    num_points: int = 1024

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"grid needs lo < hi, got [{self.lo}, {self.hi}]")
        m = int(self.num_points)
        if m < 256 or m & (m - 1):
            raise ValueError(f"num_points must be a power of two >= 256, got {self.num_points}")

    @property
    def step(self):
        return (self.hi - self.lo) / (self.num_points - 1)

    def points(self):
        return np.linspace(self.lo, self.hi, self.num_points)


@dataclass(frozen=True, eq=False)
class EstimatorConfig:
    kernel: object
    noise: object
    h: float
    grid: Optional[Grid] = None

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError(f"bandwidth must be positive, got {self.h}")


@dataclass
class EstimateGrid:
    """Grid estimate plus the spectral quantities that produced it."""

    points: np.ndarray
    values: np.ndarray
    frequencies: np.ndarray = field(default_factory=lambda: np.empty(0))
    multiplier: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        if len(self.points) != len(self.values):
            raise ValueError("points and values differ in length")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("estimate contains non-finite values")

    def to_csv(self, fh):
        fh.write("x,f_nh\n")
        for x, f in zip(self.points, self.values):
            fh.write(f"{float(x)!r},{float(f)!r}\n")

    def to_json(self, fh):
        json.dump({"x": self.points.tolist(), "f": self.values.tolist()}, fh)

    def integral(self):
        return float(np.trapezoid(self.values, self.points))


def _as_data(data):
    data = np.asarray(data, dtype=float).ravel()
    if data.size == 0:
        raise ValueError("data must be nonempty")
    return data


def empirical_cf(data, t):
    """``(1/n) sum_j exp(i t X_j)``, vectorised over ``t``."""
    data = _as_data(data)
    t = np.asarray(t, dtype=float)
    out = np.exp(1j * np.multiply.outer(t, data)).mean(axis=-1)
    return complex(out) if out.ndim == 0 else out


def multiplier(config, t):
    """Spectral multiplier ``phi_w(h t) / phi_k(t)``, zero for ``|t| > 1/h``."""
    t = np.asarray(t, dtype=float)
    inside = np.abs(t) <= 1.0 / config.h
    out = np.zeros(t.shape)
    out[inside] = config.kernel.ft(config.h * t[inside]) * inverse_cf_magnitude(config.noise, t[inside])
    return out


def _panel_rule(panels, budget):
    """Composite Gauss-Legendre nodes/weights; ``budget(a, b)`` sizes sub-panels."""
    nodes, weights = [], []
    for a, b in panels:
        m = max(1, ceil(budget(a, b) / _PANEL_BUDGET))
        edges = np.linspace(a, b, m + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        nodes.append((mid[:, None] + half[:, None] * _GL_NODES).ravel())
        weights.append((half[:, None] * _GL_WEIGHTS).ravel())
    return np.concatenate(nodes), np.concatenate(weights)


def _w_rule(config, umax):
    """Nodes and weights so that ``w_h(u) = cos(u * nodes) @ weights``."""
    h = config.h
    growth = float(-config.noise.log_abs_cf(1.0 / h))

    def budget(a, b):
        return (umax + 2.0 * growth) * (b - a)

    t, wt = _panel_rule(config.kernel.panels(), budget)
    m = config.kernel.ft(t) * inverse_cf_magnitude(config.noise, t / h)
    return t, wt * m / pi


def smoothed_kernel(config, u, method="gauss"):
    """Deconvolution kernel ``w_h(u)``.

    Parameters
    ----------
    config : EstimatorConfig
    u : float or array_like
    method : {"gauss", "adaptive"}
        ``"gauss"`` uses composite Gauss-Legendre panels sized to the
        oscillation of ``cos(tu)`` and the growth of ``1/phi_k``;
        ``"adaptive"`` calls QUADPACK per point (slow, reference quality).

    Raises
    ------
    NumericOverflowError
        When ``1/phi_k(1/h)`` is not representable.
    """
    u = np.asarray(u, dtype=float)
    if method == "adaptive":
        out = np.vectorize(lambda v: _w_adaptive(config, v), otypes=[float])(u)
        return float(out) if out.ndim == 0 else out
    if method != "gauss":
        raise ValueError(f"unknown method {method!r}")
    # w_h is even; equal arguments must give bit-equal values whatever BLAS does per row
    flat, inverse = np.unique(np.abs(u.ravel()), return_inverse=True)
    umax = float(flat[-1]) if flat.size else 0.0
    t, wm = _w_rule(config, umax)
    vals = np.empty(flat.shape)
    # chunk to bound the cos matrix at ~8M entries
    step = max(1, 8_000_000 // t.size)
    for i in range(0, flat.size, step):
        vals[i : i + step] = np.cos(np.multiply.outer(flat[i : i + step], t)) @ wm
    out = vals[inverse].reshape(u.shape)
    return float(out) if out.ndim == 0 else out


def _w_adaptive(config, u):
    h = config.h
    inverse_cf_magnitude(config.noise, 1.0 / h)  # fail fast on overflow

    def integrand(t):
        return np.cos(t * u) * config.kernel.ft(t) * inverse_cf_magnitude(config.noise, t / h)

    total = 0.0
    for a, b in config.kernel.panels():
        total += quad(integrand, a, b, epsabs=1e-10, epsrel=1e-12, limit=1000)[0]
    return total / pi


def estimate_at(config, data, x):
    """``f_nh(x)`` by direct summation over the sample.

    The result is not clipped: negative values are legitimate.
    """
    data = _as_data(data)
    x = np.asarray(x, dtype=float)
    u = np.subtract.outer(x, data) / config.h
    out = smoothed_kernel(config, u).mean(axis=-1) / config.h
    return float(out) if out.ndim == 0 else out


def default_grid(data, config, num_points=1024):
    """Data range padded by ``4h + 4 sd`` on both sides."""
    data = _as_data(data)
    pad = 4 * config.h + 4 * config.noise.sd
    return Grid(float(data.min() - pad), float(data.max() + pad), num_points)


def linear_binning(data, grid):
    """Linear-binning weights of ``data`` on ``grid``; points outside are dropped."""
    data = _as_data(data)
    m = grid.num_points
    pos = (data - grid.lo) / grid.step
    keep = (pos >= 0) & (pos <= m - 1)
    if not keep.all():
        warnings.warn(f"{np.count_nonzero(~keep)} observations fall outside the grid", stacklevel=2)
    pos = pos[keep]
    left = np.minimum(np.floor(pos).astype(int), m - 2)
    frac = pos - left
    counts = np.bincount(left, 1.0 - frac, minlength=m) + np.bincount(left + 1, frac, minlength=m)
    return counts


def estimate_grid_fft(config, data):
    """``f_nh`` on ``config.grid`` (or :func:`default_grid`) via the FFT.

    The data are linearly binned, zero-padded to four times the grid
    length so that circular wrap-around is negligible, transformed,
    multiplied by ``phi_w(h t)/phi_k(t)`` (zero beyond ``|t| = 1/h``) and
    transformed back.

    Raises
    ------
    ValueError
        If the frequency grid has fewer than two points in ``[0, 1/h]``, or
        if ``1/h`` exceeds the Nyquist frequency of the grid.
    NumericOverflowError
        As for :func:`smoothed_kernel`.
    """
    data = _as_data(data)
    grid = config.grid or default_grid(data, config)
    dx = grid.step
    size = FFT_PADDING * grid.num_points
    freqs = 2 * pi * np.fft.rfftfreq(size, d=dx)
    cutoff = 1.0 / config.h
    if np.count_nonzero(freqs <= cutoff) < 2:
        raise ValueError(
            f"frequency spacing {freqs[1]:.4g} exceeds the cutoff 1/h = {cutoff:.4g}; widen the grid"
        )
    if cutoff > freqs[-1]:
        raise ValueError(
            f"cutoff 1/h = {cutoff:.4g} is above the Nyquist frequency {freqs[-1]:.4g}; refine the grid"
        )
    mult = multiplier(config, freqs)
    weights = np.zeros(size)
    weights[: grid.num_points] = linear_binning(data, grid) / data.size
    values = np.fft.irfft(np.fft.rfft(weights) * mult, n=size)[: grid.num_points] / dx
    return EstimateGrid(grid.points(), values, freqs, mult)


# -- expectations ---------------------------------------------------------------


def expected_estimate(kernel, target, h, x):
    """``E f_nh(x)``, i.e. the ordinary kernel smooth of ``f`` at bandwidth ``h``.

    Evaluated spectrally: ``(1/pi) int_0^{1/h} phi_w(h t) Re[e^{-itx} phi_f(t)] dt``.
    It does not depend on the error distribution.
    """
    x = np.asarray(x, dtype=float)

    def one(xx):
        def integrand(s):
            t = s / h
            return kernel.ft(s) * (np.exp(-1j * t * xx) * target.cf(t)).real

        total = sum(
            quad(integrand, a, b, epsabs=1e-12, epsrel=1e-12, limit=1000)[0] for a, b in kernel.panels()
        )
        return total / (pi * h)

    out = np.vectorize(one, otypes=[float])(x)
    return float(out) if out.ndim == 0 else out


def kde_convolution(kernel, target, h, x, tail=12.0):
    """``int (1/h) w((x - y)/h) f(y) dy`` by spatial quadrature.

    Independent of :func:`expected_estimate`; the integral is truncated at
    ``tail`` target standard deviations around the mean.
    """
    sd = np.sqrt(target.variance)
    lo = max(target.support[0], target.mean - tail * sd)
    hi = min(target.support[1], target.mean + tail * sd)
    x = np.asarray(x, dtype=float)

    def one(xx):
        def integrand(y):
            return kernel.w((xx - y) / h) * target.pdf(y) / h

        cuts = sorted({lo, hi, *[p for p in (xx,) if lo < p < hi]})
        total = 0.0
        for a, b in zip(cuts[:-1], cuts[1:]):
            total += quad(integrand, a, b, epsabs=1e-12, epsrel=1e-10, limit=2000)[0]
        return total

    out = np.vectorize(one, otypes=[float])(x)
    return float(out) if out.ndim == 0 else out


def population_moments(config, target, x):
    """Exact ``E[Z]`` and ``E[Z^2]`` for ``Z = (1/h) w_h((x - X)/h)``.

    ``X`` is distributed as the target convolved with the error. Both
    moments are written as Fourier integrals over ``[-1/h, 1/h]`` (one-
    and two-dimensional) and evaluated with a product Gauss-Legendre
    rule. ``Var f_nh(x) = (E[Z^2] - E[Z]^2) / n``.
    """
    h = config.h
    noise = config.noise
    growth = float(-noise.log_abs_cf(1.0 / h))
    span = abs(float(x)) / h + 2.0 * growth + 10.0 / h

    panels = [(-b, -a) for a, b in reversed(config.kernel.panels())] + config.kernel.panels()
    s, ws = _panel_rule(panels, lambda a, b: span * (b - a))
    t = s / h
    m = config.kernel.ft(s) * inverse_cf_magnitude(noise, t)
    wts = ws / h * m
    phase = np.exp(-1j * t * x)
    phi_k = noise.cf(t)
    first = (phase * target.cf(t) * phi_k) @ wts / (2 * pi)
    tt = t[:, None] + t[None, :]
    phi_g = target.cf(tt) * noise.cf(tt)
    second = np.einsum("i,ij,j->", wts * phase, phi_g, wts * phase) / (2 * pi) ** 2
    return float(first.real), float(second.real)
