"""Weibull maximum-likelihood estimation and sampling-distribution toolkit."""

from .weibull import WeibullParams, cdf, mean_var, moment, pdf, quantile, sample, skewness, skewness_root
from .mle import (
    BracketFailureError,
    DegenerateSampleError,
    MleEstimate,
    NoConvergenceError,
    Sample,
    find_bracket,
    geometric_mean,
    log_likelihood,
    profile_score,
    profile_score_derivative,
    solve_mle,
)
from .moments import FittedWeibull, ShapeRangeError, cv_to_shape, fit_cell, fit_weibull_moments
from .simulate import (
    CellSummary,
    GridSpec,
    RunDispersion,
    empirical_quantile,
    histogram,
    repeat_runs,
    run_cell,
    run_grid,
)

__version__ = "0.1.0"

__all__ = [
    "WeibullParams", "pdf", "cdf", "quantile", "moment", "mean_var", "skewness",
    "skewness_root", "sample",
    "Sample", "MleEstimate", "geometric_mean", "log_likelihood", "profile_score",
    "profile_score_derivative", "find_bracket", "solve_mle",
    "DegenerateSampleError", "BracketFailureError", "NoConvergenceError",
    "FittedWeibull", "ShapeRangeError", "cv_to_shape", "fit_weibull_moments", "fit_cell",
    "GridSpec", "CellSummary", "RunDispersion", "run_cell", "run_grid",
    "empirical_quantile", "histogram", "repeat_runs",
    "__version__",
]
