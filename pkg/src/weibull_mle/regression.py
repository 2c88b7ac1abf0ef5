"""Regression surrogates for the moment-matched parameter surfaces.

Four fixed model forms map (n, shape) to the fitted parameters:

    A:  a = a0 + a1 * ln(n + a2)
    B:  b = b0 * delta / (1 + b1 * ln(ln n))
    C:  c = c0 * delta * ln(n + c1)
    D:  d = d0 + d1/n + d2/delta + d3/(n*delta)

A and C carry one genuinely nonlinear coefficient; it is profiled on a
grid (the embedded linear subproblem is solved exactly at every grid
point) and the winner is polished with Levenberg-Marquardt, which makes
the fits deterministic without any starting heuristic.  B starts from its
exact linearization in delta/b, D is ordinary least squares.  Residual
normality is judged with an Anderson-Darling test.
"""

from dataclasses import dataclass

import math

import numpy as np
from scipy.optimize import least_squares

GRID_STEP = 0.5
GRID_UPPER = 200.0
GRADIENT_TOL = 1e-10


class InsufficientDataError(ValueError):
    """Fewer rows than the model has coefficients (plus one)."""


class DegenerateDataError(ValueError):
    """Input whose variation is too small to fit or test."""


@dataclass(frozen=True)
class SurfaceData:
    """Rows of (n, delta, response) for one response kind (a, b, c or d)."""

    n: np.ndarray
    delta: np.ndarray
    response: np.ndarray
    kind: str = ""

    def __post_init__(self):
        n = np.asarray(self.n, dtype=float)
        d = np.asarray(self.delta, dtype=float)
        y = np.asarray(self.response, dtype=float)
        if not (n.shape == d.shape == y.shape) or n.ndim != 1:
            raise ValueError("n, delta and response must be equal-length 1-d arrays")
        if np.any(n < 2) or np.any(d <= 0.0):
            raise ValueError("rows need n >= 2 and delta > 0")
        pairs = set(zip(n.tolist(), d.tolist()))
        if len(pairs) != n.size:
            raise ValueError("duplicate (n, delta) rows")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "delta", d)
        object.__setattr__(self, "response", y)

    @classmethod
    def from_csv(cls, path, kind: str = "") -> "SurfaceData":
        rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        if rows.shape[1] != 3:
            raise ValueError(f"{path}: expected columns n,delta,value")
        return cls(n=rows[:, 0], delta=rows[:, 1], response=rows[:, 2], kind=kind)

    @property
    def rows(self) -> int:
        return self.n.size


@dataclass(frozen=True)
class RegressionFit:
    model: str
    coefficients: tuple[float, ...]
    r_squared: float
    residuals: np.ndarray
    iterations: int
    converged: bool

    @property
    def sse(self) -> float:
        return float(np.sum(self.residuals**2))


def r_squared(observed, predictions) -> float:
    """1 - SSE/SST; undefined (raises) when the observations do not vary."""
    y = np.asarray(observed, dtype=float)
    yh = np.asarray(predictions, dtype=float)
    if y.shape != yh.shape:
        raise ValueError("observed and predictions must have equal length")
    sst = float(np.sum((y - y.mean()) ** 2))
    if sst == 0.0:
        raise DegenerateDataError("zero total variation")
    return 1.0 - float(np.sum((y - yh) ** 2)) / sst


def _polish(residual_fn, jacobian_fn, start, rows) -> tuple[np.ndarray, np.ndarray, int, bool]:
    """Levenberg-Marquardt refinement until the SSE gradient is negligible."""
    x = np.asarray(start, dtype=float)
    nfev = 0
    for _ in range(3):
        sol = least_squares(
            residual_fn, x, jac=jacobian_fn, method="lm",
            xtol=1e-15, ftol=1e-15, gtol=1e-14, max_nfev=400 * rows,
        )
        x = sol.x
        nfev += sol.nfev
        grad = 2.0 * sol.jac.T @ sol.fun
        if np.linalg.norm(grad, np.inf) <= GRADIENT_TOL:
            return x, sol.fun, nfev, True
    return x, sol.fun, nfev, bool(np.linalg.norm(grad, np.inf) <= GRADIENT_TOL)


def _shift_grid(n_min: float) -> np.ndarray:
    # Profile grid for the log-shift coefficient; keeps n + shift >= 1 on all rows.
    return np.arange(-n_min + 1.0, GRID_UPPER + 0.5 * GRID_STEP, GRID_STEP)


def fit_model_a(data: SurfaceData) -> RegressionFit:
    """a = a0 + a1 ln(n + a2): profile a2, exact linear LS per grid point, LM polish."""
    if data.rows < 4:
        raise InsufficientDataError("model A needs at least 4 rows")
    n, y = data.n, data.response
    best = None
    for a2 in _shift_grid(n.min()):
        basis = np.log(n + a2)
        design = np.column_stack([np.ones_like(basis), basis])
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        sse = float(np.sum((design @ coef - y) ** 2))
        if best is None or sse < best[0]:
            best = (sse, coef[0], coef[1], a2)
    _, a0, a1, a2 = best

    def resid(th):
        return th[0] + th[1] * np.log(np.maximum(n + th[2], 1e-300)) - y

    def jac(th):
        shifted = np.maximum(n + th[2], 1e-300)
        return np.column_stack([np.ones_like(n), np.log(shifted), th[1] / shifted])

    coef, res, nfev, ok = _polish(resid, jac, (a0, a1, a2), data.rows)
    ok = ok and bool(np.all(n + coef[2] > 0.0))
    return RegressionFit("A", tuple(coef), r_squared(y, y + res), res, nfev, ok)


def fit_model_b(data: SurfaceData) -> RegressionFit:
    """b = b0 delta / (1 + b1 ln(ln n)), started from the exact linearization."""
    if data.rows < 3:
        raise InsufficientDataError("model B needs at least 3 rows")
    if np.any(data.n <= math.e):
        raise ValueError("model B needs n > e so ln(ln n) is defined")
    n, d, y = data.n, data.delta, data.response
    loglog = np.log(np.log(n))
    # delta/b = 1/b0 + (b1/b0) ln(ln n) is linear in the reciprocal coefficients.
    design = np.column_stack([np.ones_like(loglog), loglog])
    (alpha, gamma), *_ = np.linalg.lstsq(design, d / y, rcond=None)
    start = (1.0 / alpha, gamma / alpha)

    def resid(th):
        return th[0] * d / (1.0 + th[1] * loglog) - y

    def jac(th):
        denom = 1.0 + th[1] * loglog
        return np.column_stack([d / denom, -th[0] * d * loglog / denom**2])

    coef, res, nfev, ok = _polish(resid, jac, start, data.rows)
    return RegressionFit("B", tuple(coef), r_squared(y, y + res), res, nfev, ok)


def fit_model_c(data: SurfaceData) -> RegressionFit:
    """c = c0 delta ln(n + c1): profile c1, closed-form c0, LM polish."""
    if data.rows < 3:
        raise InsufficientDataError("model C needs at least 3 rows")
    n, d, y = data.n, data.delta, data.response
    best = None
    for c1 in _shift_grid(n.min()):
        basis = d * np.log(n + c1)
        c0 = float(np.dot(y, basis) / np.dot(basis, basis))
        sse = float(np.sum((c0 * basis - y) ** 2))
        if best is None or sse < best[0]:
            best = (sse, c0, c1)
    _, c0, c1 = best

    def resid(th):
        return th[0] * d * np.log(np.maximum(n + th[1], 1e-300)) - y

    def jac(th):
        shifted = np.maximum(n + th[1], 1e-300)
        return np.column_stack([d * np.log(shifted), th[0] * d / shifted])

    coef, res, nfev, ok = _polish(resid, jac, (c0, c1), data.rows)
    ok = ok and bool(np.all(n + coef[1] > 0.0))
    return RegressionFit("C", tuple(coef), r_squared(y, y + res), res, nfev, ok)


def fit_model_d(data: SurfaceData) -> RegressionFit:
    """d = d0 + d1/n + d2/delta + d3/(n delta): exact ordinary least squares."""
    if data.rows < 5:
        raise InsufficientDataError("model D needs at least 5 rows")
    n, d, y = data.n, data.delta, data.response
    design = np.column_stack([np.ones_like(n), 1.0 / n, 1.0 / d, 1.0 / (n * d)])
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < 4:
        raise DegenerateDataError("rank-deficient design matrix")
    res = design @ coef - y
    return RegressionFit("D", tuple(coef), r_squared(y, y + res), res, 1, True)


def anderson_darling_normality(residuals) -> tuple[float, float]:
    """Anderson-Darling test of normality with estimated mean and SD.

    Returns the small-sample-adjusted statistic A*^2 = A^2 (1 + 0.75/m +
    2.25/m^2) and its p-value from the standard piecewise-exponential
    approximation for the estimated-parameters case.
    """
    x = np.sort(np.asarray(residuals, dtype=float))
    m = x.size
    if m < 8:
        raise InsufficientDataError("need at least 8 residuals")
    mu = float(x.mean())
    sd = float(x.std(ddof=1))
    if sd == 0.0 or not math.isfinite(sd):
        raise DegenerateDataError("constant residuals")
    w = (x - mu) / sd
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    log_cdf = np.array([math.log(0.5 * math.erfc(-z * inv_sqrt2)) for z in w])
    log_sf = np.array([math.log(0.5 * math.erfc(z * inv_sqrt2)) for z in w])
    i = np.arange(1, m + 1)
    a_sq = -m - float(np.mean((2 * i - 1) * (log_cdf + log_sf[::-1])))
    a_star = a_sq * (1.0 + 0.75 / m + 2.25 / (m * m))
    if a_star < 0.2:
        p = 1.0 - math.exp(-13.436 + 101.14 * a_star - 223.73 * a_star**2)
    elif a_star < 0.34:
        p = 1.0 - math.exp(-8.318 + 42.796 * a_star - 59.938 * a_star**2)
    elif a_star < 0.6:
        p = math.exp(0.9177 - 4.279 * a_star - 1.38 * a_star**2)
    elif a_star < 153.467:
        p = math.exp(1.2937 - 5.709 * a_star + 0.0186 * a_star**2)
    else:
        p = 0.0
    return a_star, p


@dataclass(frozen=True)
class SurrogateCoefficients:
    """The four fitted coefficient vectors, one per model."""

    delta_hat_shape: tuple[float, float, float]
    delta_hat_scale: tuple[float, float]
    beta_ratio_shape: tuple[float, float]
    beta_ratio_scale: tuple[float, float, float, float]

    @classmethod
    def from_fits(cls, fit_a: RegressionFit, fit_b: RegressionFit,
                  fit_c: RegressionFit, fit_d: RegressionFit) -> "SurrogateCoefficients":
        return cls(fit_a.coefficients, fit_b.coefficients, fit_c.coefficients, fit_d.coefficients)


def predict_abcd(n: int, delta: float, coeffs: SurrogateCoefficients) -> tuple[float, float, float, float]:
    """Evaluate all four surrogates at (n, delta)."""
    a0, a1, a2 = coeffs.delta_hat_shape
    b0, b1 = coeffs.delta_hat_scale
    c0, c1 = coeffs.beta_ratio_shape
    d0, d1, d2, d3 = coeffs.beta_ratio_scale
    if n < 3:
        raise ValueError("surrogates need n >= 3")
    if n + a2 <= 0.0 or n + c1 <= 0.0:
        raise ValueError("log shift makes the surrogate undefined at this n")
    a = a0 + a1 * math.log(n + a2)
    b = b0 * delta / (1.0 + b1 * math.log(math.log(n)))
    c = c0 * delta * math.log(n + c1)
    d = d0 + d1 / n + d2 / delta + d3 / (n * delta)
    return a, b, c, d
