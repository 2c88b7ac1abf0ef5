"""Batch shape/scale solver: the hot inner loop of the simulation engine.

Two interchangeable backends solve M independent samples given as an
(M, n) matrix of log observations:

* ``numba``  - the scalar routine below compiled per row with a parallel
  row loop.  Rows never interact, so results are bit-identical for any
  thread count.
* ``numpy``  - a vectorized active-set implementation of the same
  algorithm, used when numba is unavailable or explicitly requested.

The backend is chosen once per call: an explicit ``backend=`` argument
wins, then the ``WEIBULL_MLE_BACKEND`` environment variable (``numba`` or
``numpy``), then numba when importable.  ``benchmarks/bench_backends.py``
compares the two.
"""

from dataclasses import dataclass

import math
import os

import numpy as np

BACKEND_ENV = "WEIBULL_MLE_BACKEND"

STATUS_OK = 0
STATUS_DEGENERATE = 1
STATUS_NO_BRACKET = 2
STATUS_NO_CONVERGENCE = 3

MAX_DOUBLINGS = 200

try:  # pragma: no cover - exercised indirectly through backend selection
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False


@dataclass(frozen=True)
class BatchResult:
    """Per-row solver output; rows with nonzero status hold NaN estimates."""

    delta_hat: np.ndarray
    beta_hat: np.ndarray
    h_residual: np.ndarray
    iterations: np.ndarray
    status: np.ndarray


def _solve_row(lx, tol, max_iter):
    """Solve one sample from its log observations.

    Same algorithm as ``mle.solve_mle``: geometric bracket expansion from
    delta = 1, then safeguarded Newton with bisection fallback inside the
    sign-change bracket.  Self-contained so numba can compile it as-is.
    """
    n = lx.shape[0]
    lx_max = lx[0]
    lx_min = lx[0]
    acc = 0.0
    for i in range(n):
        v = lx[i]
        if v > lx_max:
            lx_max = v
        if v < lx_min:
            lx_min = v
        acc += v
    lx_mean = acc / n
    if n < 2 or lx_max == lx_min:
        return np.nan, np.nan, np.nan, 0, STATUS_DEGENERATE

    def score(d):
        s0 = 0.0
        s1 = 0.0
        s2 = 0.0
        for i in range(n):
            v = lx[i]
            w = math.exp(d * (v - lx_max))
            s0 += w
            s1 += w * v
            s2 += w * v * v
        t = s1 / s0
        return 1.0 / d + lx_mean - t, -1.0 / (d * d) - (s2 / s0 - t * t)

    h1, _ = score(1.0)
    if h1 > 0.0:
        lo = 1.0
        hi = 0.0
        t = 1.0
        ok = False
        for _ in range(MAX_DOUBLINGS):
            t *= 2.0
            ht, _ = score(t)
            if ht < 0.0:
                hi = t
                ok = True
                break
            if ht > 0.0:
                lo = t
        if not ok:
            return np.nan, np.nan, np.nan, 0, STATUS_NO_BRACKET
    elif h1 < 0.0:
        hi = 1.0
        lo = 0.0
        t = 1.0
        ok = False
        for _ in range(MAX_DOUBLINGS):
            t *= 0.5
            ht, _ = score(t)
            if ht > 0.0:
                lo = t
                ok = True
                break
            if ht < 0.0:
                hi = t
        if not ok:
            return np.nan, np.nan, np.nan, 0, STATUS_NO_BRACKET
    else:
        # h(1) == 0.0 exactly; monotonicity makes (0.5, 2) a valid bracket.
        lo = 0.5
        hi = 2.0

    d = math.sqrt(lo * hi)
    for it in range(1, max_iter + 1):
        h, hp = score(d)
        if abs(h) <= tol:
            s0 = 0.0
            for i in range(n):
                s0 += math.exp(d * (lx[i] - lx_max))
            beta = math.exp(lx_max + math.log(s0 / n) / d)
            return d, beta, h, it, STATUS_OK
        if h > 0.0:
            lo = d
        else:
            hi = d
        step = d - h / hp
        if lo < step < hi:
            d = step
        else:
            d = 0.5 * (lo + hi)
    return np.nan, np.nan, np.nan, max_iter, STATUS_NO_CONVERGENCE


if HAVE_NUMBA:
    _solve_row_jit = numba.njit(cache=True)(_solve_row)

    @numba.njit(cache=True, parallel=True)
    def _solve_rows_numba(lx, tol, max_iter):  # pragma: no cover - compiled
        m_rows = lx.shape[0]
        delta = np.empty(m_rows)
        beta = np.empty(m_rows)
        resid = np.empty(m_rows)
        iters = np.empty(m_rows, dtype=np.int64)
        status = np.empty(m_rows, dtype=np.int8)
        for m in numba.prange(m_rows):
            d, b, r, it, st = _solve_row_jit(lx[m], tol, max_iter)
            delta[m] = d
            beta[m] = b
            resid[m] = r
            iters[m] = it
            status[m] = st
        return delta, beta, resid, iters, status


def _solve_rows_python(lx, tol, max_iter):
    m_rows = lx.shape[0]
    delta = np.empty(m_rows)
    beta = np.empty(m_rows)
    resid = np.empty(m_rows)
    iters = np.empty(m_rows, dtype=np.int64)
    status = np.empty(m_rows, dtype=np.int8)
    for m in range(m_rows):
        delta[m], beta[m], resid[m], iters[m], status[m] = _solve_row(lx[m], tol, max_iter)
    return delta, beta, resid, iters, status


def _solve_rows_numpy(lx, tol, max_iter):
    """Vectorized twin of ``_solve_row`` over all rows at once.

    Per-row control flow is reproduced with index masks; each row follows
    exactly the same bracket/Newton decisions as the scalar routine.
    """
    m_rows, n = lx.shape
    delta = np.full(m_rows, np.nan)
    beta = np.full(m_rows, np.nan)
    resid = np.full(m_rows, np.nan)
    iters = np.zeros(m_rows, dtype=np.int64)
    status = np.full(m_rows, STATUS_OK, dtype=np.int8)

    lx_max = lx.max(axis=1)
    lx_mean = lx.mean(axis=1)
    degenerate = lx_max == lx.min(axis=1) if n >= 2 else np.ones(m_rows, dtype=bool)
    status[degenerate] = STATUS_DEGENERATE
    rel = lx - lx_max[:, None]
    lx_sq = lx * lx

    def score(rows, d):
        w = np.exp(d[:, None] * rel[rows])
        s0 = w.sum(axis=1)
        t = np.einsum("ij,ij->i", w, lx[rows]) / s0
        q = np.einsum("ij,ij->i", w, lx_sq[rows]) / s0
        h = 1.0 / d + lx_mean[rows] - t
        hp = -1.0 / (d * d) - (q - t * t)
        return h, hp

    live = np.flatnonzero(~degenerate)
    if live.size == 0:
        return delta, beta, resid, iters, status
    h1, _ = score(live, np.ones(live.size))
    lo = np.empty(m_rows)
    hi = np.empty(m_rows)

    # Rows where h(1) == 0.0 exactly get the fixed bracket (0.5, 2).
    exact = live[h1 == 0.0]
    lo[exact] = 0.5
    hi[exact] = 2.0

    for rows, factor in ((live[h1 > 0.0], 2.0), (live[h1 < 0.0], 0.5)):
        if factor == 2.0:
            lo[rows] = 1.0
        else:
            hi[rows] = 1.0
        t = np.ones(rows.size)
        open_rows = rows
        for _ in range(MAX_DOUBLINGS):
            if open_rows.size == 0:
                break
            t = t * factor
            ht, _ = score(open_rows, t)
            crossed = ht < 0.0 if factor == 2.0 else ht > 0.0
            advanced = ht > 0.0 if factor == 2.0 else ht < 0.0
            if factor == 2.0:
                hi[open_rows[crossed]] = t[crossed]
                lo[open_rows[advanced]] = t[advanced]
            else:
                lo[open_rows[crossed]] = t[crossed]
                hi[open_rows[advanced]] = t[advanced]
            open_rows = open_rows[~crossed]
            t = t[~crossed]
        status[open_rows] = STATUS_NO_BRACKET

    active = np.flatnonzero(status == STATUS_OK)
    d = np.sqrt(lo[active] * hi[active])
    for it in range(1, max_iter + 1):
        if active.size == 0:
            break
        h, hp = score(active, d)
        done = np.abs(h) <= tol
        conv = active[done]
        delta[conv] = d[done]
        resid[conv] = h[done]
        iters[conv] = it
        keep = ~done
        active = active[keep]
        d = d[keep]
        h = h[keep]
        hp = hp[keep]
        pos = h > 0.0
        lo[active[pos]] = d[pos]
        hi[active[~pos]] = d[~pos]
        step = d - h / hp
        inside = (step > lo[active]) & (step < hi[active])
        d = np.where(inside, step, 0.5 * (lo[active] + hi[active]))
    if active.size:
        status[active] = STATUS_NO_CONVERGENCE
        iters[active] = max_iter

    ok = np.flatnonzero(status == STATUS_OK)
    if ok.size:
        w = np.exp(delta[ok, None] * rel[ok])
        beta[ok] = np.exp(lx_max[ok] + np.log(w.sum(axis=1) / n) / delta[ok])
    return delta, beta, resid, iters, status


def default_backend() -> str:
    """Backend implied by the environment: numba when available unless overridden."""
    env = os.environ.get(BACKEND_ENV, "").strip().lower()
    if env in ("numba", "numpy"):
        if env == "numba" and not HAVE_NUMBA:
            raise RuntimeError("WEIBULL_MLE_BACKEND=numba but numba is not importable")
        return env
    if env not in ("", "auto"):
        raise RuntimeError(f"unrecognized {BACKEND_ENV}={env!r}")
    return "numba" if HAVE_NUMBA else "numpy"


def solve_batch(lx, tol: float = 1e-10, max_iter: int = 500, backend: str | None = None) -> BatchResult:
    """Solve every row of an (M, n) matrix of log observations.

    Returns NaN estimates with a diagnostic status for rows that are
    degenerate, fail to bracket, or fail to converge; all other rows carry
    |h| <= tol.
    """
    lx = np.ascontiguousarray(lx, dtype=float)
    if lx.ndim != 2:
        raise ValueError("expected a 2-d (M, n) array of log observations")
    chosen = backend or default_backend()
    if chosen == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not importable")
        out = _solve_rows_numba(lx, tol, max_iter)
    elif chosen == "numpy":
        out = _solve_rows_numpy(lx, tol, max_iter)
    else:
        raise ValueError(f"unknown backend {chosen!r}")
    return BatchResult(*out)


def set_worker_threads(workers: int) -> None:
    """Cap the numba thread pool; results are identical for any worker count."""
    if workers < 1:
        raise ValueError("workers must be at least 1")
    if HAVE_NUMBA:
        numba.set_num_threads(min(workers, numba.config.NUMBA_NUM_THREADS))
