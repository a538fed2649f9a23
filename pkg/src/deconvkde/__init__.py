"""Deconvolution kernel density estimation under supersmooth (e.g. Gaussian) errors."""

from .asymptotics import (
    AsymptoticSpec,
    approximation_ratio,
    corrected_sd,
    cosine_variance_stat,
    edge_integral,
    fan_statistic,
    theoretical_sd,
)
from .bandwidth import exact_mise, mise_grid_search, mise_terms
from .errors import ConfigError, DegenerateScaleError, NumericOverflowError
from .estimator import (
    EstimateGrid,
    EstimatorConfig,
    Grid,
    empirical_cf,
    estimate_at,
    estimate_grid_fft,
    expected_estimate,
    smoothed_kernel,
)
from .kernels import Kernel, get_kernel, make_fan, make_sinc, make_wand
from .noise import ErrorModel, make_gaussian_noise
from .simulation import StudyConfig, StudyReport, histogram_export, run_study, table_render
from .targets import TargetDensity, get_target, make_chi3, make_density_1, make_density_2, make_density_3, nsr

__version__ = "0.1.0"

__all__ = [
    "AsymptoticSpec",
    "ConfigError",
    "DegenerateScaleError",
    "ErrorModel",
    "EstimateGrid",
    "EstimatorConfig",
    "Grid",
    "Kernel",
    "NumericOverflowError",
    "StudyConfig",
    "StudyReport",
    "TargetDensity",
    "approximation_ratio",
    "corrected_sd",
    "cosine_variance_stat",
    "edge_integral",
    "empirical_cf",
    "estimate_at",
    "estimate_grid_fft",
    "exact_mise",
    "expected_estimate",
    "fan_statistic",
    "get_kernel",
    "get_target",
    "histogram_export",
    "make_chi3",
    "make_density_1",
    "make_density_2",
    "make_density_3",
    "make_fan",
    "make_gaussian_noise",
    "make_sinc",
    "make_wand",
    "mise_grid_search",
    "mise_terms",
    "nsr",
    "run_study",
    "smoothed_kernel",
    "table_render",
    "theoretical_sd",
]
