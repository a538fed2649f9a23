"""Monte Carlo study: replicate, estimate, summarise.

Every replication draws its own generator from
``SeedSequence(master_seed).spawn(replications)``, so a report depends only
on the configuration and the master seed, never on the number of worker
threads or the order in which replications finish.
"""

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Union

import numpy as np

from .asymptotics import AsymptoticSpec, corrected_sd, studentize, theoretical_sd
from .bandwidth import mise_grid_search
from .estimator import EstimatorConfig, estimate_grid_fft, expected_estimate, smoothed_kernel
from .targets import nsr, sample_convolved

__all__ = [
    "StudyConfig",
    "PointReport",
    "StudyReport",
    "StudyError",
    "Histogram",
    "Table",
    "run_study",
    "histogram_export",
    "table_render",
]


class StudyError(RuntimeError):
    """A replication failed; ``replication`` is its index."""

    def __init__(self, replication, cause):
        self.replication = replication
        super().__init__(f"replication {replication} failed: {cause!r}")


@dataclass
class StudyConfig:
    target: object
    noise: object
    kernel: object
    n: int
    replications: int = 500
    bandwidth: Union[float, str] = "mise-optimal"
    eval_points: tuple = (0.0,)
    master_seed: int = 0
    label: str = ""
    method: str = "quadrature"

    def __post_init__(self):
        if int(self.n) < 2:
            raise ValueError(f"sample size must be at least 2, got {self.n}")
        if int(self.replications) < 1:
            raise ValueError(f"replications must be at least 1, got {self.replications}")
        if len(self.eval_points) == 0:
            raise ValueError("eval_points must be nonempty")
        if self.method not in ("quadrature", "fft"):
            raise ValueError(f"unknown method {self.method!r}")
        if isinstance(self.bandwidth, str):
            if self.bandwidth != "mise-optimal":
                raise ValueError(f"bandwidth must be a number or 'mise-optimal', got {self.bandwidth!r}")
        elif not float(self.bandwidth) > 0:
            raise ValueError(f"bandwidth must be positive, got {self.bandwidth}")


@dataclass
class PointReport:
    """Everything recorded at one evaluation point, one entry per replication."""

    x: float
    centering: float
    estimates: np.ndarray
    fan_plain: np.ndarray
    fan_sample: np.ndarray
    cosine_variance: np.ndarray

    @property
    def mean(self):
        return float(np.mean(self.estimates))

    @property
    def sd(self):
        return _sd(self.estimates)

    @property
    def se_mean(self):
        return self.sd / np.sqrt(self.estimates.size)

    @property
    def se_sd(self):
        return _se_sd(self.estimates)

    def to_dict(self):
        return {
            "x": self.x,
            "centering": self.centering,
            "mean": self.mean,
            "sd": self.sd,
            "estimates": self.estimates.tolist(),
            "fan_plain": self.fan_plain.tolist(),
            "fan_sample": self.fan_sample.tolist(),
            "cosine_variance": self.cosine_variance.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            d["x"],
            d["centering"],
            *(np.asarray(d[k], dtype=float) for k in ("estimates", "fan_plain", "fan_sample", "cosine_variance")),
        )


def _sd(values):
    values = np.asarray(values, dtype=float)
    return float(np.std(values, ddof=1)) if values.size > 1 else 0.0


def _se_sd(values):
    """Standard error of the sample SD, from the sample kurtosis.

    Var(s) ~ (m4 - s^4) / (4 n s^2); reduces to s^2/(2n) for normal data.
    """
    values = np.asarray(values, dtype=float)
    n = values.size
    if n < 2:
        return float("inf")
    s2 = np.var(values, ddof=1)
    if s2 == 0:
        return 0.0
    m4 = np.mean((values - values.mean()) ** 4)
    return float(np.sqrt(max(m4 - s2 * s2, 0.0) / (4 * n * s2)))


@dataclass
class StudyReport:
    label: str
    target: str
    kernel: str
    noise_sd: float
    n: int
    replications: int
    master_seed: int
    h: float
    sigma: Optional[float]
    sigma_tilde: Optional[float]
    nsr: float
    points: List[PointReport] = field(default_factory=list)

    def to_dict(self):
        d = {k: getattr(self, k) for k in self.__dataclass_fields__ if k != "points"}
        d["points"] = [p.to_dict() for p in self.points]
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        points = [PointReport.from_dict(p) for p in d.pop("points")]
        return cls(**d, points=points)

    def to_json(self, fh):
        json.dump(self.to_dict(), fh)


def _replicate(config, est_config, xs, centering, seed):
    rng = np.random.default_rng(seed)
    data = sample_convolved(config.target, config.noise, config.n, rng)
    h = est_config.h
    z = smoothed_kernel(est_config, np.subtract.outer(xs, data) / h) / h
    if config.method == "fft":
        grid = estimate_grid_fft(est_config, data)
        f = np.interp(xs, grid.points, grid.values)
    else:
        f = z.mean(axis=1)
    plain = studentize(z, centering, "plain")
    sample = studentize(z, centering, "sample-variance")
    cosvar = np.var(np.cos(np.subtract.outer(xs, data) / h), axis=1, ddof=1)
    return f, plain, sample, cosvar


def run_study(config, workers=1):
    """Run the Monte Carlo study described by ``config``.

    ``workers > 1`` spreads replications over a thread pool; the result is
    bit-identical to the sequential run.

    Raises
    ------
    NumericOverflowError
        If ``1/phi_k`` overflows at the chosen bandwidth.
    StudyError
        If an individual replication fails.
    """
    if isinstance(config.bandwidth, str):
        h = mise_grid_search(config.kernel, config.noise, config.target, config.n).argmin_h
    else:
        h = float(config.bandwidth)
    est_config = EstimatorConfig(config.kernel, config.noise, h)
    xs = np.asarray(config.eval_points, dtype=float)
    # surfaces overflow before any sampling
    smoothed_kernel(est_config, 0.0)
    centering = np.asarray(expected_estimate(config.kernel, config.target, h, xs), dtype=float).reshape(xs.shape)

    seeds = np.random.SeedSequence(config.master_seed).spawn(config.replications)

    def one(i):
        try:
            return _replicate(config, est_config, xs, centering, seeds[i])
        except Exception as exc:
            raise StudyError(i, exc) from exc

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(config.replications)))
    else:
        results = [one(i) for i in range(config.replications)]

    f, plain, sample, cosvar = (np.stack(r, axis=1) for r in zip(*results))
    spec = AsymptoticSpec.from_models(config.kernel, config.noise, h, config.n)
    points = [
        PointReport(float(x), float(c), f[j], plain[j], sample[j], cosvar[j])
        for j, (x, c) in enumerate(zip(xs, centering))
    ]
    return StudyReport(
        label=config.label,
        target=config.target.name,
        kernel=config.kernel.name,
        noise_sd=config.noise.sd,
        n=int(config.n),
        replications=int(config.replications),
        master_seed=int(config.master_seed),
        h=h,
        sigma=theoretical_sd(spec),
        sigma_tilde=corrected_sd(config.kernel, config.noise, h, config.n),
        nsr=nsr(config.target, config.noise),
        points=points,
    )


# -- exports -----------------------------------------------------------------------


@dataclass
class Histogram:
    edges: np.ndarray
    counts: np.ndarray

    def to_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["left", "right", "count"])
        for a, b, c in zip(self.edges[:-1], self.edges[1:], self.counts):
            writer.writerow([repr(float(a)), repr(float(b)), int(c)])


_SAMPLES = {
    "estimates": "estimates",
    "fan": "fan_sample",
    "fan_plain": "fan_plain",
    "fan_sample": "fan_sample",
    "cosine": "cosine_variance",
}


def histogram_export(report, point_index, bins=20, which="estimates"):
    """Histogram of the stored per-replication values at one evaluation point."""
    if int(bins) < 2:
        raise ValueError(f"need at least 2 bins, got {bins}")
    if not 0 <= point_index < len(report.points):
        raise IndexError(f"point index {point_index} out of range for {len(report.points)} points")
    values = getattr(report.points[point_index], _SAMPLES[which])
    counts, edges = np.histogram(values, bins=int(bins))
    return Histogram(edges, counts)


@dataclass
class Table:
    header: List[str]
    rows: List[list]

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header)
        for row in self.rows:
            writer.writerow([_cell(v) for v in row])
        return buf.getvalue()

    def to_text(self):
        cells = [self.header] + [[_fmt(v) for v in row] for row in self.rows]
        widths = [max(len(r[i]) for r in cells) for i in range(len(self.header))]
        lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
        lines.insert(1, "  ".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"


def _cell(v):
    if isinstance(v, str):
        return v
    if v is None or not np.isfinite(v):
        return ""
    return repr(float(v))


def _fmt(v):
    if isinstance(v, str):
        return v
    if v is None or not np.isfinite(v):
        return ""
    return f"{v:.4g}" if abs(v) < 1000 else f"{v:.1f}"


def table_render(reports, kind="estimates", label_column="f"):
    """Lay reports out in the reference table layout.

    ``kind="estimates"``: label, h, mean and SD of ``f_nh`` per point, then
    the theoretical and corrected SDs. ``kind="fan"`` (or ``"fan_plain"``):
    mean and SD of the studentised statistic per point, no theory columns.
    """
    reports = list(reports)
    if not reports:
        raise ValueError("no reports to render")
    k = len(reports[0].points)
    mus = [f"mu{j + 1}" for j in range(k)]
    sds = [f"sd{j + 1}" for j in range(k)]
    header = [label_column, "h", *mus, *sds]
    if kind == "estimates":
        header += ["sigma", "sigma_tilde"]
    elif kind not in ("fan", "fan_plain"):
        raise ValueError(f"unknown table kind {kind!r}")
    attr = {"estimates": "estimates", "fan": "fan_sample", "fan_plain": "fan_plain"}[kind]
    rows = []
    for rep in reports:
        if len(rep.points) != k:
            raise ValueError("reports have different numbers of evaluation points")
        samples = [getattr(p, attr) for p in rep.points]
        row = [rep.label, rep.h]
        row += [float(np.mean(s)) for s in samples]
        row += [_sd(s) for s in samples]
        if kind == "estimates":
            row += [rep.sigma, rep.sigma_tilde]
        rows.append(row)
    return Table(header, rows)
