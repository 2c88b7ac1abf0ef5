"""Moment matching: the Weibull pair whose first two moments hit a target.

The coefficient of variation of a Weibull law depends on the shape alone,
so matching (mean, variance) reduces to a one-dimensional monotone root
find in log shape followed by a closed-form scale.
"""

from dataclasses import dataclass

import math

from .special_math import gamma_fn, log_gamma

SHAPE_MIN = 1e-2
SHAPE_MAX = 1e4


class ShapeRangeError(ValueError):
    """Requested coefficient of variation falls outside the supported shape range."""


@dataclass(frozen=True)
class FittedWeibull:
    """Moment-matched parameter pair with the residual of the two moment equations."""

    shape: float
    scale: float
    target_mean: float
    target_var: float
    residual: float


def _log_cv2(t: float) -> float:
    # ln(1 + CV^2) at shape exp(t); strictly decreasing in t.
    a = math.exp(t)
    return log_gamma(1.0 + 2.0 / a) - 2.0 * log_gamma(1.0 + 1.0 / a)


def cv_to_shape(cv: float) -> float:
    """Invert the shape -> CV map by bisection in log shape.

    Raises ShapeRangeError when the CV is not achievable inside
    [SHAPE_MIN, SHAPE_MAX].
    """
    if not (math.isfinite(cv) and cv > 0.0):
        raise ValueError("cv must be a positive real")
    target = math.log1p(cv * cv)
    lo = math.log(SHAPE_MIN)
    hi = math.log(SHAPE_MAX)
    if _log_cv2(lo) < target or _log_cv2(hi) > target:
        raise ShapeRangeError(f"cv={cv} needs a shape outside [{SHAPE_MIN}, {SHAPE_MAX}]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if _log_cv2(mid) > target:
            lo = mid
        else:
            hi = mid
    a = math.exp(0.5 * (lo + hi))
    achieved = math.expm1(_log_cv2(math.log(a)))
    if abs(achieved - cv * cv) > 1e-12 * max(1.0, cv * cv):
        raise ShapeRangeError(f"cv^2 residual {abs(achieved - cv * cv)} exceeds tolerance")
    return a


def fit_weibull_moments(mean: float, var: float) -> FittedWeibull:
    """Weibull pair whose mean and variance equal the targets."""
    if not (math.isfinite(mean) and mean > 0.0):
        raise ValueError("mean must be a positive real")
    if not (math.isfinite(var) and var > 0.0):
        raise ValueError("var must be a positive real")
    shape = cv_to_shape(math.sqrt(var) / mean)
    g1 = gamma_fn(1.0 + 1.0 / shape)
    g2 = gamma_fn(1.0 + 2.0 / shape)
    scale = mean / g1
    mean_resid = abs(scale * g1 - mean) / mean
    var_resid = abs(scale * scale * (g2 - g1 * g1) - var) / var
    return FittedWeibull(
        shape=shape,
        scale=scale,
        target_mean=mean,
        target_var=var,
        residual=max(mean_resid, var_resid),
    )


def fit_cell(summary) -> tuple[FittedWeibull, FittedWeibull]:
    """Moment-match the shape-estimate and scale-ratio sample sets of one cell."""
    return (
        fit_weibull_moments(summary.mean_delta_hat, summary.var_delta_hat),
        fit_weibull_moments(summary.mean_beta_ratio, summary.var_beta_ratio),
    )
