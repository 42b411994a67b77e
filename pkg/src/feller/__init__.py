"""Exact Monte Carlo simulation and closed-form analysis of the driftless
square-root diffusion ``dx = sigma * sqrt(x) dW`` with an absorbing origin.

The :mod:`~feller.analytic` layer evaluates the transition law and
everything derived from it; :mod:`~feller.sampling` draws paths exactly
from that law (plus an Euler-Maruyama oracle for cross-validation);
:mod:`~feller.experiments` runs the table- and figure-style Monte Carlo
comparisons; :mod:`~feller.cli` exposes all of it as a command line.
"""

from .analytic import (
    DensityValue,
    ProcessParams,
    TruncatedMeanHittingTime,
    absorption_probability,
    brownian_fpt_density,
    characteristic_function,
    ci_half_width,
    continuous_mass,
    continuous_tail_bound,
    hitting_time_density,
    mean_position,
    ncx2_zero_density,
    ncx2_zero_density_series,
    survival_probability,
    transition_density,
    truncated_mean_hitting_time,
    typical_hitting_time,
    variance_position,
)
from .bessel import bessel_i1_scaled
from .experiments import (
    DensityValidationReport,
    Histogram,
    HittingTimeResult,
    MeanPositionReport,
    SurvivalReport,
    run_density_validation,
    run_hitting_time_experiment,
    run_mean_position_experiment,
    run_survival_experiment,
)
from .rng import RandomStream
from .sampling import (
    Path,
    PathEnsemble,
    SimConfig,
    euler_maruyama_finals,
    euler_maruyama_path,
    feller_step,
    generate_ensemble,
    generate_path,
    sample_chi_squared_even,
    sample_poisson,
)

__version__ = "0.1.0"

__all__ = [
    "DensityValue",
    "ProcessParams",
    "TruncatedMeanHittingTime",
    "absorption_probability",
    "brownian_fpt_density",
    "characteristic_function",
    "ci_half_width",
    "continuous_mass",
    "continuous_tail_bound",
    "hitting_time_density",
    "mean_position",
    "ncx2_zero_density",
    "ncx2_zero_density_series",
    "survival_probability",
    "transition_density",
    "truncated_mean_hitting_time",
    "typical_hitting_time",
    "variance_position",
    "bessel_i1_scaled",
    "DensityValidationReport",
    "Histogram",
    "HittingTimeResult",
    "MeanPositionReport",
    "SurvivalReport",
    "run_density_validation",
    "run_hitting_time_experiment",
    "run_mean_position_experiment",
    "run_survival_experiment",
    "RandomStream",
    "Path",
    "PathEnsemble",
    "SimConfig",
    "euler_maruyama_finals",
    "euler_maruyama_path",
    "feller_step",
    "generate_ensemble",
    "generate_path",
    "sample_chi_squared_even",
    "sample_poisson",
    "__version__",
]
