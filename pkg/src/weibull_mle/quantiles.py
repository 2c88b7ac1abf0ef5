"""Three-way quantile comparison for the reconstructed sampling distributions.

For each grid cell and probability p, three estimates of the same
percentile are put side by side: the moment-matched Weibull quantile, the
raw empirical order statistic, and the quantile of the regression
surrogate.
"""

from dataclasses import dataclass

from .moments import FittedWeibull
from .regression import SurrogateCoefficients, predict_abcd
from .simulate import empirical_quantile
from .weibull import WeibullParams, quantile

DEFAULT_P_LIST = (0.1, 0.25, 0.5, 0.75, 0.9)

TARGET_DELTA_HAT = "delta_hat"
TARGET_BETA_RATIO = "beta_ratio"


@dataclass(frozen=True)
class QuantileTriple:
    target: str
    n: int
    delta: float
    p: float
    q_fitted: float
    q_empirical: float
    q_surrogate: float


def fitted_quantile(fit: FittedWeibull, p: float) -> float:
    """Quantile of the moment-matched law."""
    return quantile(WeibullParams(shape=fit.shape, scale=fit.scale), p)


def sample_quantile(samples, p: float) -> float:
    """Empirical percentile, the ceil(M p)-th order statistic."""
    return empirical_quantile(samples, p)


def surrogate_quantile(
    n: int, delta: float, p: float, coeffs: SurrogateCoefficients, target: str
) -> float:
    """Quantile of the surrogate-predicted Weibull law for one target."""
    a, b, c, d = predict_abcd(n, delta, coeffs)
    if target == TARGET_DELTA_HAT:
        return quantile(WeibullParams(shape=a, scale=b), p)
    if target == TARGET_BETA_RATIO:
        return quantile(WeibullParams(shape=c, scale=d), p)
    raise ValueError(f"unknown target {target!r}")


def build_comparison(
    cells_with_fits,
    coeffs: SurrogateCoefficients,
    p_list=DEFAULT_P_LIST,
) -> list[QuantileTriple]:
    """Quantile triples for both targets over every cell and probability.

    ``cells_with_fits`` yields (cell, shape_fit, ratio_fit) entries as
    produced by the simulation engine plus moment matching.
    """
    rows = []
    for cell, shape_fit, ratio_fit in cells_with_fits:
        for target, fit, samples in (
            (TARGET_DELTA_HAT, shape_fit, cell.delta_hat_samples),
            (TARGET_BETA_RATIO, ratio_fit, cell.beta_ratio_samples),
        ):
            for p in p_list:
                rows.append(
                    QuantileTriple(
                        target=target,
                        n=cell.n,
                        delta=cell.delta,
                        p=float(p),
                        q_fitted=fitted_quantile(fit, p),
                        q_empirical=sample_quantile(samples, p),
                        q_surrogate=surrogate_quantile(cell.n, cell.delta, p, coeffs, target),
                    )
                )
    return rows
