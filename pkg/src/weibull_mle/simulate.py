"""Monte Carlo reconstruction of the sampling distributions of the MLEs.

For a grid of (n, shape) cells the engine repeatedly draws n-samples from
W(shape, 1), solves for the MLE pair, and keeps the raw replication
vectors of the shape estimate and of the scale estimate (which, with unit
scale, is already the scale-ratio pivot).

Reproducibility contract: replication ``m`` of a cell draws its uniforms
from a dedicated substream keyed by ``(seed, m, attempt)``, so results do
not depend on execution order, chunking or worker count, and failed
replications are redrawn from reserved substreams without disturbing any
other replication.
"""

from dataclasses import dataclass, field

import math
import numpy as np

from . import kernels
from .moments import FittedWeibull, fit_cell
from .weibull import WeibullParams, sample

#: Tags keeping derived seed families disjoint.
_CELL_TAG = 1
_RUN_TAG = 2

_MAX_REDRAWS = 8


def child_seed(seed: int, *key: int) -> int:
    """Derive a 64-bit child seed from a master seed and an integer key path."""
    ss = np.random.SeedSequence((seed,) + key)
    return int(ss.generate_state(1, np.uint64)[0])


def replication_rng(seed: int, rep: int, attempt: int = 0) -> np.random.Generator:
    """Generator for one replication; attempt > 0 selects reserved redraw streams."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, rep, attempt))))


@dataclass(frozen=True)
class GridSpec:
    """Simulation grid: sample sizes, shape values, replication count, master seed."""

    n_values: tuple[int, ...]
    delta_values: tuple[float, ...]
    replications: int
    master_seed: int

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "delta_values", tuple(float(d) for d in self.delta_values))
        if not self.n_values or min(self.n_values) < 2:
            raise ValueError("every n must be at least 2")
        if not self.delta_values or min(self.delta_values) <= 0.0:
            raise ValueError("every shape value must be positive")
        if self.replications < 100:
            raise ValueError("replications must be at least 100")
        if self.master_seed < 0:
            raise ValueError("master_seed must be a non-negative 64-bit integer")

    @property
    def cells(self) -> list[tuple[int, float]]:
        return [(n, d) for n in self.n_values for d in self.delta_values]


@dataclass(frozen=True)
class CellSummary:
    """Raw MLE replications for one (n, shape) cell plus their first two moments."""

    n: int
    delta: float
    delta_hat_samples: np.ndarray
    beta_ratio_samples: np.ndarray
    mean_delta_hat: float
    var_delta_hat: float
    mean_beta_ratio: float
    var_beta_ratio: float
    failure_count: int

    @classmethod
    def from_samples(cls, n, delta, delta_hat, beta_ratio, failure_count):
        return cls(
            n=int(n),
            delta=float(delta),
            delta_hat_samples=delta_hat,
            beta_ratio_samples=beta_ratio,
            mean_delta_hat=float(np.mean(delta_hat)),
            var_delta_hat=float(np.var(delta_hat, ddof=1)),
            mean_beta_ratio=float(np.mean(beta_ratio)),
            var_beta_ratio=float(np.var(beta_ratio, ddof=1)),
            failure_count=int(failure_count),
        )

    @property
    def replications(self) -> int:
        return self.delta_hat_samples.size


@dataclass(frozen=True)
class DispersionStats:
    mean: float
    sd: float

    @property
    def cv(self) -> float:
        return self.sd / self.mean


@dataclass(frozen=True)
class RunDispersion:
    """Across-run mean/SD/CV of the four moment-matched parameters."""

    n: int
    delta: float
    runs: int
    delta_hat_shape: DispersionStats
    delta_hat_scale: DispersionStats
    beta_ratio_shape: DispersionStats
    beta_ratio_scale: DispersionStats


def _draw_log_samples(n, delta, replications, seed):
    params = WeibullParams(shape=delta, scale=1.0)
    lx = np.empty((replications, n))
    for m in range(replications):
        lx[m] = np.log(sample(params, n, replication_rng(seed, m)))
    return lx


def run_cell(
    n: int,
    delta: float,
    replications: int,
    seed: int,
    tol: float = 1e-10,
    backend: str | None = None,
) -> CellSummary:
    """Simulate one grid cell at unit scale.

    Degenerate or non-converged replications (vanishingly rare, but possible
    in floating point) are counted and redrawn from their reserved
    substreams; everything else is deterministic in (n, delta,
    replications, seed).
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if replications < 100:
        raise ValueError("replications must be at least 100")
    if not delta > 0.0:
        raise ValueError("delta must be positive")
    lx = _draw_log_samples(n, delta, replications, seed)
    res = kernels.solve_batch(lx, tol=tol, backend=backend)
    delta_hat = res.delta_hat.copy()
    beta_ratio = res.beta_hat.copy()
    failures = 0
    params = WeibullParams(shape=delta, scale=1.0)
    for m in np.flatnonzero(res.status != kernels.STATUS_OK):
        for attempt in range(1, _MAX_REDRAWS + 1):
            failures += 1
            row = np.log(sample(params, n, replication_rng(seed, m, attempt)))
            retry = kernels.solve_batch(row[None, :], tol=tol, backend=backend)
            if retry.status[0] == kernels.STATUS_OK:
                delta_hat[m] = retry.delta_hat[0]
                beta_ratio[m] = retry.beta_hat[0]
                break
        else:
            raise RuntimeError(
                f"replication {m} of cell (n={n}, delta={delta}) failed {_MAX_REDRAWS} redraws"
            )
    return CellSummary.from_samples(n, delta, delta_hat, beta_ratio, failures)


def run_grid(
    spec: GridSpec,
    tol: float = 1e-10,
    backend: str | None = None,
) -> list[CellSummary]:
    """Run every cell of the grid; cell seeds derive from the master seed."""
    out = []
    for idx, (n, d) in enumerate(spec.cells):
        cell_seed = child_seed(spec.master_seed, _CELL_TAG, idx)
        out.append(run_cell(n, d, spec.replications, cell_seed, tol=tol, backend=backend))
    return out


def empirical_quantile(samples, p: float) -> float:
    """The ceil(M*p)-th order statistic (exact (M*p)-th when M*p is integral)."""
    x = np.asarray(samples, dtype=float)
    m = x.size
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    mp = m * p
    if mp < 1.0 - 1e-9:
        raise ValueError("M*p must be at least 1")
    # Guard against 0.1 * 1e5 style float fuzz pushing the ceiling up a rank.
    k = int(math.ceil(mp - 1e-9))
    k = min(max(k, 1), m)
    return float(np.partition(x, k - 1)[k - 1])


def histogram(samples, bin_count: int) -> list[tuple[float, float]]:
    """Relative-frequency histogram as (bin center, frequency) pairs."""
    if bin_count < 2:
        raise ValueError("bin_count must be at least 2")
    x = np.asarray(samples, dtype=float)
    counts, edges = np.histogram(x, bins=bin_count)
    centers = 0.5 * (edges[:-1] + edges[1:])
    freqs = counts / x.size
    return list(zip(centers.tolist(), freqs.tolist()))


def dispersion_from_fits(n, delta, fits: list[tuple[FittedWeibull, FittedWeibull]]) -> RunDispersion:
    """Mean/SD/CV of the fitted parameters across repeated runs."""
    if len(fits) < 2:
        raise ValueError("need at least two runs")

    def stats(values):
        v = np.asarray(values)
        return DispersionStats(mean=float(v.mean()), sd=float(v.std(ddof=1)))

    return RunDispersion(
        n=int(n),
        delta=float(delta),
        runs=len(fits),
        delta_hat_shape=stats([f[0].shape for f in fits]),
        delta_hat_scale=stats([f[0].scale for f in fits]),
        beta_ratio_shape=stats([f[1].shape for f in fits]),
        beta_ratio_scale=stats([f[1].scale for f in fits]),
    )


def repeat_runs(
    n: int,
    delta: float,
    replications: int,
    runs: int,
    seed: int,
    tol: float = 1e-10,
    backend: str | None = None,
) -> RunDispersion:
    """Independent repetitions of (run_cell + moment matching) for one cell."""
    if runs < 2:
        raise ValueError("runs must be at least 2")
    fits = []
    for r in range(runs):
        run_seed = child_seed(seed, _RUN_TAG, r)
        cell = run_cell(n, delta, replications, run_seed, tol=tol, backend=backend)
        fits.append(fit_cell(cell))
    return dispersion_from_fits(n, delta, fits)
