"""The two-parameter Weibull law W(shape, scale).

Density, distribution and quantile functions, raw moments, the skewness
curve with its sign-change root, and deterministic inverse-transform
sampling from a caller-supplied generator.
"""

from dataclasses import dataclass

import math
import numpy as np

from .special_math import gamma_fn


@dataclass(frozen=True)
class WeibullParams:
    """Shape/scale parameter pair; both must be strictly positive."""

    shape: float
    scale: float

    def __post_init__(self):
        if not (math.isfinite(self.shape) and self.shape > 0.0):
            raise ValueError(f"shape must be a positive real, got {self.shape!r}")
        if not (math.isfinite(self.scale) and self.scale > 0.0):
            raise ValueError(f"scale must be a positive real, got {self.scale!r}")


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return np.atleast_1d(arr), arr.ndim == 0


def pdf(params: WeibullParams, x):
    """Density of W(shape, scale); zero for x <= 0.

    Accepts a scalar or array argument and returns a matching result.
    """
    d, b = params.shape, params.scale
    xv, scalar = _as_array(x)
    out = np.zeros_like(xv)
    pos = xv > 0.0
    t = xv[pos] / b
    out[pos] = (d / b) * t ** (d - 1.0) * np.exp(-(t**d))
    return float(out[0]) if scalar else out


def cdf(params: WeibullParams, x):
    """Distribution function 1 - exp(-(x/scale)^shape); zero for x <= 0."""
    d, b = params.shape, params.scale
    xv, scalar = _as_array(x)
    out = np.zeros_like(xv)
    pos = xv > 0.0
    out[pos] = -np.expm1(-((xv[pos] / b) ** d))
    return float(out[0]) if scalar else out


def quantile(params: WeibullParams, p):
    """Quantile scale * (-ln(1-p))^(1/shape) for p in (0, 1).

    -ln(1-p) is evaluated through log1p so small tail probabilities keep
    full precision.
    """
    d, b = params.shape, params.scale
    pv, scalar = _as_array(p)
    if np.any(pv <= 0.0) or np.any(pv >= 1.0):
        raise ValueError("quantile requires 0 < p < 1")
    out = b * (-np.log1p(-pv)) ** (1.0 / d)
    return float(out[0]) if scalar else out


def moment(params: WeibullParams, r: float) -> float:
    """Raw moment E[X^r] = scale^r * Gamma(1 + r/shape).

    Exists only for r > -shape; other r raise ValueError.
    """
    d, b = params.shape, params.scale
    if not r > -d:
        raise ValueError(f"moment of order {r} does not exist for shape {d}")
    return b**r * gamma_fn(1.0 + r / d)


def mean_var(params: WeibullParams) -> tuple[float, float]:
    """Mean and variance of W(shape, scale)."""
    d, b = params.shape, params.scale
    g1 = gamma_fn(1.0 + 1.0 / d)
    g2 = gamma_fn(1.0 + 2.0 / d)
    return b * g1, b * b * (g2 - g1 * g1)


def skewness(shape: float) -> float:
    """Standardized third moment of the Weibull law; scale never enters.

    Positive for small shapes, crosses zero near 3.60 and is negative
    beyond.
    """
    if not shape > 0.0:
        raise ValueError("shape must be positive")
    g1 = gamma_fn(1.0 + 1.0 / shape)
    g2 = gamma_fn(1.0 + 2.0 / shape)
    g3 = gamma_fn(1.0 + 3.0 / shape)
    return (2.0 * g1**3 - 3.0 * g1 * g2 + g3) / (g2 - g1 * g1) ** 1.5


def skewness_root(tol: float = 1e-10) -> float:
    """Shape value where the skewness changes sign, bisected inside [3, 4]."""
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    lo, hi = 3.0, 4.0
    if not (skewness(lo) > 0.0 > skewness(hi)):
        raise RuntimeError("skewness does not change sign on [3, 4]")
    mid = 0.5 * (lo + hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        s = skewness(mid)
        if abs(s) <= tol:
            return mid
        if s > 0.0:
            lo = mid
        else:
            hi = mid
    return mid


def sample(params: WeibullParams, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n variates by inverse transform, scale * (-ln U)^(1/shape).

    Consumes exactly n uniforms from ``rng``; identical generator state
    yields identical output.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    u = rng.random(n)
    return params.scale * (-np.log(u)) ** (1.0 / params.shape)
