"""First-order (O(1/n)) bias and variance of the Weibull MLEs.

Closed-form constants for the shape estimate and the scale-ratio pivot,
their simulation-side counterparts computed from moment-matched
parameters, and the comparison surfaces |simulated - asymptotic| / n.
"""

from dataclasses import dataclass

import math

from .special_math import A1, ZETA2, ZETA3, gamma_fn
from .regression import SurrogateCoefficients, predict_abcd


def first_order_bias_shape(delta: float) -> float:
    """Leading bias coefficient of the shape MLE: delta (3 zeta2 - zeta3) / zeta2^2."""
    return delta * (3.0 * ZETA2 - ZETA3) / (ZETA2 * ZETA2)


def first_order_bias_ratio(delta: float) -> float:
    """Leading bias coefficient of the scale ratio, in its unreduced form."""
    num = (A1 * A1 + ZETA2) * ZETA2 - delta * (
        2.0 * ZETA2 * ZETA2 - (4.0 * A1 + 1.0) * ZETA2 + 2.0 * A1 * ZETA3
    )
    return num / (2.0 * delta * delta * ZETA2 * ZETA2)


def scale_bias_coefficients() -> tuple[float, float]:
    """(k1, k2) in the reduced form k1/delta^2 - k2/delta of the ratio bias."""
    k1 = (A1 * A1 + ZETA2) / (2.0 * ZETA2)
    k2 = (2.0 * ZETA2 * ZETA2 - (4.0 * A1 + 1.0) * ZETA2 + 2.0 * A1 * ZETA3) / (
        2.0 * ZETA2 * ZETA2
    )
    return k1, k2


def first_order_bias_ratio_reduced(delta: float) -> float:
    """Reduced two-coefficient form of the scale-ratio bias; agrees with the full form."""
    k1, k2 = scale_bias_coefficients()
    return k1 / (delta * delta) - k2 / delta


def scale_bias_sign_change() -> float:
    """Shape value where the scale-ratio bias flips from positive to negative."""
    k1, k2 = scale_bias_coefficients()
    return k1 / k2


def first_order_var_shape(delta: float) -> float:
    """Inverse-information variance coefficient of the shape MLE: delta^2 / zeta2."""
    return delta * delta / ZETA2


def first_order_var_ratio(delta: float) -> float:
    """Inverse-information variance coefficient of the scale ratio."""
    return (A1 * A1 + ZETA2) / (delta * delta * ZETA2)


@dataclass(frozen=True)
class FirstOrderQuantities:
    """The four asymptotic coefficients at one shape value."""

    delta: float
    bias_shape: float
    bias_ratio: float
    var_shape: float
    var_ratio: float


def first_order_quantities(delta: float) -> FirstOrderQuantities:
    if not delta > 0.0:
        raise ValueError("delta must be positive")
    full = first_order_bias_ratio(delta)
    reduced = first_order_bias_ratio_reduced(delta)
    # The reduced form is an algebraic simplification; treat disagreement as a bug.
    if abs(full - reduced) > 1e-9 * max(1.0, abs(full)):
        raise AssertionError(f"bias-ratio forms disagree at delta={delta}")
    return FirstOrderQuantities(
        delta=delta,
        bias_shape=first_order_bias_shape(delta),
        bias_ratio=full,
        var_shape=first_order_var_shape(delta),
        var_ratio=first_order_var_ratio(delta),
    )


@dataclass(frozen=True)
class SimulatedFirstOrder:
    """n-scaled bias/variance implied by fitted sampling-distribution parameters."""

    bias_shape: float
    var_shape: float
    bias_ratio: float
    var_ratio: float


def fitted_first_order(n: int, delta: float, shape_fit, ratio_fit) -> SimulatedFirstOrder:
    """Scale the fitted-law mean/variance gaps up by n.

    ``shape_fit`` approximates the shape-MLE distribution, ``ratio_fit``
    the scale-ratio distribution; each provides (shape, scale).
    """
    a, b = shape_fit.shape, shape_fit.scale
    c, d = ratio_fit.shape, ratio_fit.scale
    ga1 = gamma_fn(1.0 + 1.0 / a)
    ga2 = gamma_fn(1.0 + 2.0 / a)
    gc1 = gamma_fn(1.0 + 1.0 / c)
    gc2 = gamma_fn(1.0 + 2.0 / c)
    return SimulatedFirstOrder(
        bias_shape=n * (b * ga1 - delta),
        var_shape=n * b * b * (ga2 - ga1 * ga1),
        bias_ratio=n * (d * gc1 - 1.0),
        var_ratio=n * d * d * (gc2 - gc1 * gc1),
    )


@dataclass(frozen=True)
class ComparisonRow:
    """Absolute per-observation gaps between simulated and asymptotic quantities."""

    n: int
    delta: float
    diff_bias_shape: float
    diff_var_shape: float
    diff_bias_ratio: float
    diff_var_ratio: float


def comparison_row(n: int, delta: float, shape_fit, ratio_fit) -> ComparisonRow:
    sim = fitted_first_order(n, delta, shape_fit, ratio_fit)
    ref = first_order_quantities(delta)
    return ComparisonRow(
        n=int(n),
        delta=float(delta),
        diff_bias_shape=abs(sim.bias_shape - ref.bias_shape) / n,
        diff_var_shape=abs(sim.var_shape - ref.var_shape) / n,
        diff_bias_ratio=abs(sim.bias_ratio - ref.bias_ratio) / n,
        diff_var_ratio=abs(sim.var_ratio - ref.var_ratio) / n,
    )


@dataclass(frozen=True)
class _PlainFit:
    shape: float
    scale: float


def comparison_table(cells_with_fits, coeffs: SurrogateCoefficients | None = None) -> list[ComparisonRow]:
    """One row per (cell, fits) entry.

    By default the moment-matched parameters drive the simulated side;
    passing regression coefficients switches to the surrogate predictions
    instead (a strictly smoother, slightly less faithful variant).
    """
    rows = []
    for cell, shape_fit, ratio_fit in cells_with_fits:
        if coeffs is not None:
            a, b, c, d = predict_abcd(cell.n, cell.delta, coeffs)
            shape_fit = _PlainFit(a, b)
            ratio_fit = _PlainFit(c, d)
        rows.append(comparison_row(cell.n, cell.delta, shape_fit, ratio_fit))
    return rows
