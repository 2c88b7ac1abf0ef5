"""Bundled reference surfaces of the moment-matched parameters.

The package ships the (n, shape) -> a, b, c, d tables obtained from a
large simulation run (1e5 replications per cell, n = 10..100 by 10, shape
0.5, 1, 1.5, 2 then 3..10 by 1).  They let the regression and comparison
commands run instantly instead of requiring hours of simulation.
"""

from importlib import resources

from .regression import SurfaceData

_FILES = {
    "delta_hat_shape": "delta_hat_shape.csv",
    "delta_hat_scale": "delta_hat_scale.csv",
    "beta_ratio_shape": "beta_ratio_shape.csv",
    "beta_ratio_scale": "beta_ratio_scale.csv",
}

SURFACE_KINDS = tuple(_FILES)


def load_reference_surface(kind: str) -> SurfaceData:
    """One of the four bundled surfaces, keyed by what it parameterizes."""
    if kind not in _FILES:
        raise KeyError(f"unknown surface kind {kind!r}; expected one of {SURFACE_KINDS}")
    path = resources.files("weibull_mle.data").joinpath(_FILES[kind])
    with resources.as_file(path) as p:
        return SurfaceData.from_csv(p, kind=kind)
