"""Command-line interface: ``deconvkde {estimate,mise,asym,ratio,study}``.

Exit codes: 0 success, 2 usage or configuration error, 3 numeric failure.
"""

import argparse
import csv
import dataclasses
import io
import json
import re
import sys
from pathlib import Path

import numpy as np

from .asymptotics import AsymptoticSpec, approximation_ratio, corrected_sd, theoretical_sd
from .bandwidth import mise_grid_search
from .config import BUNDLED, bundled_config, load_study_file
from .errors import ConfigError, DegenerateScaleError, NumericOverflowError
from .estimator import EstimatorConfig, Grid, default_grid, estimate_grid_fft
from .kernels import KERNELS, get_kernel
from .noise import make_gaussian_noise
from .simulation import StudyError, histogram_export, run_study, table_render
from .targets import TARGETS, get_target

EXIT_USAGE = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


def _positive(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _common(p, bandwidth=False):
    p.add_argument("--kernel", choices=sorted(KERNELS), default="fan")
    p.add_argument("--noise-sd", type=_positive, required=True, help="sd of the Gaussian errors")
    if bandwidth:
        p.add_argument("--bandwidth", type=_positive)
    p.add_argument("--out", help="output file (default: standard output)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _h_range(p):
    p.add_argument("--h-min", type=_positive, default=0.02)
    p.add_argument("--h-max", type=_positive, default=1.0)
    p.add_argument("--h-step", type=_positive, default=0.02)


def build_parser():
    parser = argparse.ArgumentParser(prog="deconvkde", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate the density of the error-free variable on a grid")
    p.add_argument("data", help="one observation per line, or a CSV file (see --column)")
    p.add_argument("--column", type=int, default=0, help="CSV column holding the data")
    _common(p, bandwidth=True)
    p.add_argument("--target", choices=sorted(TARGETS), help="choose h by exact MISE for this density")
    p.add_argument("--grid-points", type=int, default=1024)
    p.add_argument("--lo", type=float)
    p.add_argument("--hi", type=float)

    p = sub.add_parser("mise", help="exact MISE curve and its minimiser")
    _common(p)
    p.add_argument("--target", choices=sorted(TARGETS), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--h-min", type=_positive, default=0.01)
    p.add_argument("--h-max", type=_positive, default=1.0)
    p.add_argument("--h-step", type=_positive, default=0.01)

    p = sub.add_parser("asym", help="theoretical and corrected standard deviations")
    _common(p, bandwidth=True)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("ratio", help="edge integral over its asymptotic equivalent, across h")
    _common(p)
    _h_range(p)

    p = sub.add_parser("study", help="run a Monte Carlo study from a scenario file")
    p.add_argument("config", help=f"TOML/JSON scenario file, or one of: {', '.join(BUNDLED)}")
    p.add_argument("--out", default="study-output", help="output directory")
    p.add_argument("--seed", type=int, help="override every master_seed")
    p.add_argument("--replications", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--bins", type=int, help="histogram bins (default from the config, else 20)")
    return parser


def _hs(lo, hi, step):
    if not lo < hi:
        raise UsageError(f"empty bandwidth range: --h-min {lo} must be below --h-max {hi}")
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return np.round(lo + step * np.arange(count), 10)


def _emit(args, write_csv, payload):
    if args.format == "json":
        text = json.dumps(payload) + "\n"
    else:
        buf = io.StringIO()
        write_csv(buf)
        text = buf.getvalue()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def read_data(path, column=0):
    try:
        lines = Path(path).read_text().splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    values = []
    for i, line in enumerate(lines):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = next(csv.reader([line]))
        try:
            values.append(float(fields[column]))
        except IndexError:
            raise UsageError(f"{path}:{i + 1}: no column {column}") from None
        except ValueError:
            if values:
                raise UsageError(f"{path}:{i + 1}: not a number: {fields[column]!r}") from None
            # a header row
    if not values:
        raise UsageError(f"{path}: no observations")
    return np.array(values)


def cmd_estimate(args):
    data = read_data(args.data, args.column)
    kernel = get_kernel(args.kernel)
    noise = make_gaussian_noise(args.noise_sd)
    if args.bandwidth is not None:
        h = args.bandwidth
    elif args.target is not None:
        h = mise_grid_search(kernel, noise, get_target(args.target), data.size).argmin_h
    else:
        raise UsageError("estimate needs --bandwidth, or --target to select one by exact MISE")
    config = EstimatorConfig(kernel, noise, h)
    try:
        auto = default_grid(data, config, args.grid_points)
        grid = Grid(auto.lo if args.lo is None else args.lo, auto.hi if args.hi is None else args.hi, args.grid_points)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    est = estimate_grid_fft(dataclasses.replace(config, grid=grid), data)
    _emit(args, est.to_csv, {"x": est.points.tolist(), "f": est.values.tolist(), "h": h})


def cmd_mise(args):
    hs = _hs(args.h_min, args.h_max, args.h_step)
    curve = mise_grid_search(
        get_kernel(args.kernel), make_gaussian_noise(args.noise_sd), get_target(args.target), args.n, hs
    )
    payload = {
        "h": curve.bandwidths.tolist(),
        "mise": [float(m) if np.isfinite(m) else None for m in curve.mise],
        "argmin_h": curve.argmin_h,
        "n": curve.n,
    }
    _emit(args, curve.to_csv, payload)
    print(f"argmin h = {curve.argmin_h:.2f}", file=sys.stderr)


def cmd_asym(args):
    if args.bandwidth is None:
        raise UsageError("asym needs --bandwidth")
    kernel = get_kernel(args.kernel)
    noise = make_gaussian_noise(args.noise_sd)
    spec = AsymptoticSpec.from_models(kernel, noise, args.bandwidth, args.n)
    row = {
        "h": args.bandwidth,
        "n": args.n,
        "sigma": theoretical_sd(spec),
        "sigma_tilde": corrected_sd(kernel, noise, args.bandwidth, args.n),
        "ratio": approximation_ratio(kernel, noise, args.bandwidth),
    }

    def write(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(row))
        writer.writerow([repr(v) for v in row.values()])

    _emit(args, write, row)


def cmd_ratio(args):
    hs = _hs(args.h_min, args.h_max, args.h_step)
    kernel = get_kernel(args.kernel)
    noise = make_gaussian_noise(args.noise_sd)
    ratios = []
    for h in hs:
        try:
            r = approximation_ratio(kernel, noise, float(h))
        except (NumericOverflowError, OverflowError, ZeroDivisionError):
            r = None
        ratios.append(r if r is None or np.isfinite(r) else None)

    def write(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["h", "ratio"])
        for h, r in zip(hs, ratios):
            writer.writerow([repr(float(h)), "" if r is None else repr(float(r))])

    _emit(args, write, {"h": hs.tolist(), "ratio": ratios})


def _slug(text):
    return re.sub(r"[^A-Za-z0-9]+", "_", text).strip("_") or "scenario"


def cmd_study(args):
    path = args.config
    if not Path(path).exists() and Path(path).stem in BUNDLED:
        path = bundled_config(Path(path).stem)
    try:
        study = load_study_file(path, seed=args.seed)
    except OSError as exc:
        raise UsageError(f"cannot read {args.config}: {exc}") from None
    if args.replications is not None:
        if args.replications < 1:
            raise UsageError("--replications must be at least 1")
        study.studies = [dataclasses.replace(s, replications=args.replications) for s in study.studies]
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")
    bins = args.bins or study.histogram_bins
    if bins < 2:
        raise UsageError("--bins must be at least 2")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    reports = [run_study(cfg, workers=args.workers) for cfg in study.studies]

    with open(out / "report.json", "w") as fh:
        json.dump({"title": study.title, "reports": [r.to_dict() for r in reports]}, fh)
    for kind in ("estimates", "fan", "fan_plain"):
        table = table_render(reports, kind=kind, label_column=study.label_column)
        (out / f"table_{kind}.csv").write_text(table.to_csv())
        if kind != "fan_plain":
            heading = study.title or "study"
            print(f"{heading}: {'f_nh(x)' if kind == 'estimates' else 'studentised statistic'}")
            print(table.to_text())
    for i, rep in enumerate(reports):
        for j in range(len(rep.points)):
            for which in ("estimates", "fan"):
                hist = histogram_export(rep, j, bins=bins, which=which)
                name = f"hist_{i}_{_slug(rep.label)}_x{j}_{which}.csv"
                with open(out / name, "w") as fh:
                    hist.to_csv(fh)


COMMANDS = {
    "estimate": cmd_estimate,
    "mise": cmd_mise,
    "asym": cmd_asym,
    "ratio": cmd_ratio,
    "study": cmd_study,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"deconvkde {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericOverflowError, DegenerateScaleError, StudyError) as exc:
        print(f"deconvkde {args.command}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"deconvkde {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
