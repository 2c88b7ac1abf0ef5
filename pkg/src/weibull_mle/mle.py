"""Maximum-likelihood estimation for the two-parameter Weibull law.

The shape estimate is the unique root of the profile score

    h(d) = 1/d + mean(ln x) - sum(x^d ln x) / sum(x^d),

which is strictly decreasing, explodes to +inf at d -> 0 and is negative
for large d whenever the sample has two distinct values.  The scale
estimate follows in closed form from the converged shape.  Power sums are
always taken relative to the sample maximum so that large shapes cannot
overflow.
"""

from dataclasses import dataclass

import math
import numpy as np

from .weibull import WeibullParams

MAX_DOUBLINGS = 200
DEFAULT_TOL = 1e-10
MAX_ITERATIONS = 500


class DegenerateSampleError(ValueError):
    """Sample has fewer than two distinct positive values; no finite MLE exists."""


class BracketFailureError(RuntimeError):
    """Geometric expansion could not bracket a sign change (pathological data)."""


class NoConvergenceError(RuntimeError):
    """Root refinement did not reach the tolerance within the iteration cap."""


@dataclass(frozen=True)
class Sample:
    """Validated vector of positive observations."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 1:
            raise ValueError("sample must be a non-empty 1-d collection")
        if not np.all(np.isfinite(v)) or np.any(v <= 0.0):
            raise ValueError("sample values must be finite and strictly positive")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def has_distinct_values(self) -> bool:
        """True when at least two values differ, the condition for a root to exist."""
        return bool(self.values.max() > self.values.min())


@dataclass(frozen=True)
class MleEstimate:
    """Solved estimate with solver diagnostics."""

    delta_hat: float
    beta_hat: float
    h_residual: float
    iterations: int
    bracket: tuple[float, float]


def _as_values(sample) -> np.ndarray:
    if isinstance(sample, Sample):
        return sample.values
    return Sample(np.asarray(sample, dtype=float)).values


def geometric_mean(sample) -> float:
    """exp of the mean log observation, computed entirely in log space."""
    x = _as_values(sample)
    return math.exp(float(np.mean(np.log(x))))


def log_likelihood(params: WeibullParams, sample) -> float:
    """Log-likelihood of the sample under W(shape, scale)."""
    x = _as_values(sample)
    n = x.size
    d, b = params.shape, params.scale
    lx = np.log(x)
    ln_gm = float(np.mean(lx))
    power_sum = float(np.sum(np.exp(d * (lx - math.log(b)))))
    return n * math.log(d) - n * d * math.log(b) + n * (d - 1.0) * ln_gm - power_sum


def profile_score(delta: float, sample) -> float:
    """The score h(delta) whose root is the shape MLE."""
    if not delta > 0.0:
        raise ValueError("delta must be positive")
    x = _as_values(sample)
    lx = np.log(x)
    m = lx.max()
    w = np.exp(delta * (lx - m))
    t = float(np.sum(w * lx) / np.sum(w))
    return 1.0 / delta + float(lx.mean()) - t


def profile_score_derivative(delta: float, sample) -> float:
    """Closed-form derivative of the profile score; never positive.

    Equals -1/delta^2 minus the variance of ln x under the x^delta weights,
    which the Cauchy-Schwarz inequality keeps non-negative.
    """
    if not delta > 0.0:
        raise ValueError("delta must be positive")
    x = _as_values(sample)
    lx = np.log(x)
    m = lx.max()
    w = np.exp(delta * (lx - m))
    s0 = float(np.sum(w))
    t = float(np.sum(w * lx)) / s0
    q = float(np.sum(w * lx * lx)) / s0
    return -1.0 / (delta * delta) - (q - t * t)


def _require_distinct(sample) -> np.ndarray:
    x = _as_values(sample)
    if x.size < 2 or not x.max() > x.min():
        raise DegenerateSampleError(
            "all observations equal (or n < 2); the profile score 1/d never vanishes"
        )
    return x


def find_bracket(sample) -> tuple[float, float]:
    """Bracket the profile-score root by doubling/halving away from delta = 1.

    Returns (lo, hi) with h(lo) > 0 > h(hi).  The score is monotone, so at
    most ``MAX_DOUBLINGS`` steps are ever needed for non-pathological data.
    """
    x = _require_distinct(sample)
    h1 = profile_score(1.0, x)
    if h1 > 0.0:
        lo, t = 1.0, 1.0
        for _ in range(MAX_DOUBLINGS):
            t *= 2.0
            ht = profile_score(t, x)
            if ht < 0.0:
                return lo, t
            if ht > 0.0:
                lo = t
        raise BracketFailureError(f"no sign change up to delta = {t}")
    if h1 < 0.0:
        hi, t = 1.0, 1.0
        for _ in range(MAX_DOUBLINGS):
            t *= 0.5
            ht = profile_score(t, x)
            if ht > 0.0:
                return t, hi
            if ht < 0.0:
                hi = t
        raise BracketFailureError(f"no sign change down to delta = {t}")
    # h(1) landed on 0.0 exactly; monotonicity makes (0.5, 2) a valid bracket.
    return 0.5, 2.0


def solve_mle(sample, tol: float = DEFAULT_TOL, max_iter: int = MAX_ITERATIONS) -> MleEstimate:
    """Solve h(delta) = 0 by safeguarded Newton, then recover the scale.

    Newton steps use the closed-form derivative and fall back to bisection
    whenever a step would leave the current sign-change bracket, so the
    bracket property is an invariant of the loop.  The scale estimate
    (sum(x^delta)/n)^(1/delta) is evaluated in log space from the converged
    shape only.
    """
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    x = _require_distinct(sample)
    lo, hi = find_bracket(x)
    d = math.sqrt(lo * hi)
    for it in range(1, max_iter + 1):
        h = profile_score(d, x)
        if abs(h) <= tol:
            lx = np.log(x)
            m = lx.max()
            s0 = float(np.sum(np.exp(d * (lx - m))))
            beta = math.exp(m + math.log(s0 / x.size) / d)
            return MleEstimate(
                delta_hat=d,
                beta_hat=beta,
                h_residual=h,
                iterations=it,
                bracket=(lo, hi),
            )
        if h > 0.0:
            lo = d
        else:
            hi = d
        hp = profile_score_derivative(d, x)
        step = d - h / hp
        d = step if lo < step < hi else 0.5 * (lo + hi)
    raise NoConvergenceError(f"|h| > {tol} after {max_iter} iterations")
