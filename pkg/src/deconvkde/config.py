"""Scenario files for the simulation study (TOML, or JSON with the same layout).

Top-level keys give defaults that each ``[[scenarios]]`` entry may override::

    title = "Table 1"
    label_column = "f"
    kernel = "fan"
    replications = 500
    master_seed = 2008
    eval_points = [0.0, 0.92]
    noise = { type = "gaussian", sd = 0.4 }

    [[scenarios]]
    label = "#1"
    target = "normal"
    n = 50
    bandwidth = 0.24
"""

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import List

import jsonschema

from .errors import ConfigError
from .kernels import KERNELS, get_kernel
from .noise import get_noise
from .simulation import StudyConfig
from .targets import TARGETS, get_target

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

__all__ = ["StudyFile", "load_study_file", "parse_study", "bundled_config", "BUNDLED"]

_NOISE = {
    "type": "object",
    "properties": {"type": {"enum": ["gaussian"]}, "sd": {"type": "number", "exclusiveMinimum": 0}},
    "required": ["sd"],
    "additionalProperties": False,
}

_SHARED = {
    "kernel": {"enum": sorted(KERNELS)},
    "replications": {"type": "integer", "minimum": 1},
    "master_seed": {"type": "integer", "minimum": 0},
    "eval_points": {"type": "array", "items": {"type": "number"}, "minItems": 1},
    "noise": _NOISE,
    "method": {"enum": ["quadrature", "fft"]},
    "bandwidth": {
        "oneOf": [{"type": "number", "exclusiveMinimum": 0}, {"const": "mise-optimal"}],
    },
    "n": {"type": "integer", "minimum": 2},
    "target": {"enum": sorted(TARGETS)},
}

SCHEMA = {
    "type": "object",
    "properties": {
        "title": {"type": "string"},
        "label_column": {"type": "string"},
        "histogram_bins": {"type": "integer", "minimum": 2},
        **_SHARED,
        "scenarios": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "label": {"type": "string"},
                    **_SHARED,
                },
                "additionalProperties": False,
            },
        },
    },
    "required": ["scenarios"],
    "additionalProperties": False,
}

_DEFAULTS = {
    "kernel": "fan",
    "replications": 500,
    "master_seed": 0,
    "method": "quadrature",
    "bandwidth": "mise-optimal",
}


@dataclass
class StudyFile:
    title: str
    label_column: str
    histogram_bins: int
    studies: List[StudyConfig] = field(default_factory=list)


def _path(error):
    parts = []
    for p in error.absolute_path:
        parts.append(f"[{p}]" if isinstance(p, int) else f".{p}")
    return "".join(parts).lstrip(".") or "<root>"


def parse_study(raw, seed=None):
    """Validate a decoded config mapping and build the study configurations.

    ``seed`` overrides every ``master_seed``.

    Raises
    ------
    ConfigError
        Listing every schema violation with its path.
    """
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        raise ConfigError(f"{_path(e)}: {e.message}" for e in errors)
    studies = []
    problems = []
    for i, sc in enumerate(raw["scenarios"]):
        merged = {**_DEFAULTS, **{k: v for k, v in raw.items() if k in _SHARED}, **sc}
        missing = [k for k in ("target", "n", "noise", "eval_points") if k not in merged]
        if missing:
            problems.extend(f"scenarios[{i}].{k}: required (here or at top level)" for k in missing)
            continue
        studies.append(
            StudyConfig(
                target=get_target(merged["target"]),
                noise=get_noise(merged["noise"]),
                kernel=get_kernel(merged["kernel"]),
                n=merged["n"],
                replications=merged["replications"],
                bandwidth=merged["bandwidth"],
                eval_points=tuple(float(x) for x in merged["eval_points"]),
                master_seed=merged["master_seed"] if seed is None else int(seed),
                label=merged.get("label", merged["target"]),
                method=merged["method"],
            )
        )
    if problems:
        raise ConfigError(problems)
    return StudyFile(
        title=raw.get("title", ""),
        label_column=raw.get("label_column", "f"),
        histogram_bins=raw.get("histogram_bins", 20),
        studies=studies,
    )


def load_study_file(path, seed=None):
    """Read a ``.toml`` or ``.json`` scenario file."""
    path = Path(path)
    text = path.read_bytes()
    try:
        if path.suffix.lower() == ".json":
            raw = json.loads(text)
        else:
            raw = tomllib.loads(text.decode("utf-8"))
    except (json.JSONDecodeError, tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError([f"<file>: cannot parse {path.name}: {exc}"]) from exc
    return parse_study(raw, seed=seed)


BUNDLED = ("table1", "table2", "table5")


def bundled_config(name):
    """Path of a scenario file shipped with the package (``table1`` ...)."""
    stem = name[:-5] if name.endswith(".toml") else name
    if stem not in BUNDLED:
        raise ValueError(f"no bundled config {name!r}; available: {', '.join(BUNDLED)}")
    return resources.files("deconvkde") / "configs" / f"{stem}.toml"
