"""Command-line front end wiring the estimation/simulation pipeline together.

Subcommands: mle, simulate, repeat, regress, quantiles, asym, curves,
report.  Configuration comes from flags, optionally seeded from a plain
``key=value`` file given with --config (flags win).  All outputs are
header-row CSV, UTF-8, LF line endings, 17-significant-digit floats, and
every command is deterministic in (seed, grid, backend).

Exit codes: 0 success, 2 configuration error, 3 data error, 4 convergence
error.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__, kernels, mle
from .asymptotics import comparison_table
from .csvio import config_hash, fmt, write_csv
from .moments import ShapeRangeError, fit_cell
from .quantiles import build_comparison
from .regression import (
    DegenerateDataError,
    InsufficientDataError,
    SurfaceData,
    SurrogateCoefficients,
    anderson_darling_normality,
    fit_model_a,
    fit_model_b,
    fit_model_c,
    fit_model_d,
)
from .reference import SURFACE_KINDS, load_reference_surface
from .simulate import GridSpec, repeat_runs, run_grid
from .weibull import WeibullParams, mean_var, pdf, quantile, skewness, skewness_root

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_CONVERGENCE = 4

_DATA_ERRORS = (
    mle.DegenerateSampleError,
    InsufficientDataError,
    DegenerateDataError,
    ShapeRangeError,
    ValueError,
    OSError,
)
_CONVERGENCE_ERRORS = (mle.BracketFailureError, mle.NoConvergenceError)


class ConfigError(Exception):
    pass


def _int_list(text):
    return tuple(int(v) for v in text.split(","))


def _float_list(text):
    return tuple(float(v) for v in text.split(","))


def _build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key=value file supplying flag defaults")
    common.add_argument("--seed", type=int, default=42, help="master seed (default 42)")
    common.add_argument("--workers", type=int, default=None, help="solver thread cap")
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    common.add_argument("--m", type=int, default=10000, help="replications per cell")
    common.add_argument("--n-list", type=_int_list, default=(10, 50, 100))
    common.add_argument("--delta-list", type=_float_list, default=(0.5, 1.0, 5.0, 10.0))
    common.add_argument("--p-list", type=_float_list, default=(0.1, 0.25, 0.5, 0.75, 0.9))
    common.add_argument("--tol", type=float, default=1e-10, help="|h| tolerance for the solver")
    common.add_argument("--backend", choices=("numba", "numpy"), default=None)

    parser = argparse.ArgumentParser(prog="weibull-mle", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {}

    p = commands["mle"] = sub.add_parser("mle", parents=[common],
                                         help="fit one sample from a text file")
    p.add_argument("path", type=Path, help="file with one positive observation per line")

    p = commands["simulate"] = sub.add_parser("simulate", parents=[common],
                                              help="simulate the grid, write fitted parameters")
    p.add_argument("--raw", action="store_true", help="also write raw per-cell replication CSVs")

    p = commands["repeat"] = sub.add_parser("repeat", parents=[common],
                                            help="repeated-run dispersion of one cell")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--runs", type=int, default=100)

    p = commands["regress"] = sub.add_parser("regress", parents=[common],
                                             help="fit the four surrogate models")
    p.add_argument("--surface-dir", type=Path, default=None,
                   help="directory of n,delta,value CSVs (default: bundled surfaces)")

    commands["quantiles"] = sub.add_parser("quantiles", parents=[common],
                                           help="three-way quantile comparison")

    p = commands["asym"] = sub.add_parser("asym", parents=[common],
                                          help="first-order bias/variance comparison")
    p.add_argument("--regression-hats", action="store_true",
                   help="use surrogate predictions instead of moment-matched parameters")

    commands["curves"] = sub.add_parser("curves", parents=[common],
                                        help="density, moment and skewness curve CSVs")
    commands["report"] = sub.add_parser("report", parents=[common],
                                        help="everything above into one directory")
    return parser, commands


def _apply_config_file(commands, argv):
    """Seed parser defaults from --config so explicit flags still win."""
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config", type=Path, default=None)
    known, _ = probe.parse_known_args(argv)
    if known.config is None:
        return
    if not known.config.is_file():
        raise ConfigError(f"config file not found: {known.config}")
    overrides = {}
    for line_no, raw in enumerate(known.config.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{known.config}:{line_no}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        overrides[key.replace("-", "_")] = value
    casts = {
        "seed": int, "workers": int, "m": int, "tol": float,
        "n_list": _int_list, "delta_list": _float_list, "p_list": _float_list,
        "out": Path, "backend": str, "n": int, "delta": float, "runs": int,
        "surface_dir": Path,
    }
    parsed = {}
    for key, value in overrides.items():
        if key not in casts:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            parsed[key] = casts[key](value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {value!r}") from exc
    for sub_parser in commands.values():
        known_dests = {action.dest for action in sub_parser._actions}
        sub_parser.set_defaults(**{k: v for k, v in parsed.items() if k in known_dests})


def _grid_spec(args) -> GridSpec:
    try:
        return GridSpec(
            n_values=args.n_list,
            delta_values=args.delta_list,
            replications=args.m,
            master_seed=args.seed,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _config_items(args, keys):
    items = {"version": __version__}
    for key in keys:
        value = getattr(args, key)
        if isinstance(value, tuple):
            value = ",".join(fmt(v) for v in value)
        items[key] = value
    return items


def _read_sample_file(path: Path) -> np.ndarray:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
    values = []
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise ValueError(f"{path}: line {line_no}: not a number: {line!r}") from None
    if not values:
        raise ValueError(f"{path}: no observations found")
    return np.asarray(values)


def _simulate_cells(args):
    spec = _grid_spec(args)
    cells = run_grid(spec, tol=args.tol, backend=args.backend)
    fits = [fit_cell(cell) for cell in cells]
    return spec, cells, fits


def _load_surfaces(surface_dir):
    surfaces = {}
    for kind in SURFACE_KINDS:
        if surface_dir is None:
            surfaces[kind] = load_reference_surface(kind)
        else:
            surfaces[kind] = SurfaceData.from_csv(Path(surface_dir) / f"{kind}.csv", kind=kind)
    return surfaces


def _fit_surrogates(surfaces):
    fit_a = fit_model_a(surfaces["delta_hat_shape"])
    fit_b = fit_model_b(surfaces["delta_hat_scale"])
    fit_c = fit_model_c(surfaces["beta_ratio_shape"])
    fit_d = fit_model_d(surfaces["beta_ratio_scale"])
    return {"A": fit_a, "B": fit_b, "C": fit_c, "D": fit_d}


def _note(written, path, rows):
    written[str(path)] = rows
    print(f"wrote {path} ({rows} rows)")


def cmd_mle(args) -> int:
    values = _read_sample_file(args.path)
    estimate = mle.solve_mle(values, tol=args.tol)
    print(f"delta_hat   = {fmt(estimate.delta_hat)}")
    print(f"beta_hat    = {fmt(estimate.beta_hat)}")
    print(f"h_residual  = {fmt(estimate.h_residual)}")
    print(f"iterations  = {estimate.iterations}")
    print(f"bracket     = [{fmt(estimate.bracket[0])}, {fmt(estimate.bracket[1])}]")
    return EXIT_OK


def cmd_simulate(args, written=None) -> int:
    written = written if written is not None else {}
    spec, cells, fits = _simulate_cells(args)
    rows = write_csv(
        args.out / "fitted_params.csv",
        ["n", "delta", "a", "b", "c", "d"],
        [
            (c.n, c.delta, fs.shape, fs.scale, fr.shape, fr.scale)
            for c, (fs, fr) in zip(cells, fits)
        ],
    )
    _note(written, args.out / "fitted_params.csv", rows)
    rows = write_csv(
        args.out / "summary.csv",
        ["n", "delta", "mean_dh", "var_dh", "mean_br", "var_br", "failures"],
        [
            (c.n, c.delta, c.mean_delta_hat, c.var_delta_hat,
             c.mean_beta_ratio, c.var_beta_ratio, c.failure_count)
            for c in cells
        ],
    )
    _note(written, args.out / "summary.csv", rows)
    if getattr(args, "raw", False):
        for cell in cells:
            path = args.out / f"samples_n{cell.n}_d{cell.delta:g}.csv"
            rows = write_csv(
                path,
                ["n", "delta", "m", "delta_hat", "beta_ratio"],
                (
                    (cell.n, cell.delta, m, dh, br)
                    for m, (dh, br) in enumerate(
                        zip(cell.delta_hat_samples, cell.beta_ratio_samples)
                    )
                ),
            )
            _note(written, path, rows)
    return EXIT_OK


def cmd_repeat(args, written=None) -> int:
    written = written if written is not None else {}
    disp = repeat_runs(args.n, args.delta, args.m, args.runs, args.seed,
                       tol=args.tol, backend=args.backend)
    rows = write_csv(
        args.out / "dispersion.csv",
        ["parameter", "mean", "sd", "cv"],
        [
            (name, s.mean, s.sd, s.cv)
            for name, s in (
                ("a", disp.delta_hat_shape),
                ("b", disp.delta_hat_scale),
                ("c", disp.beta_ratio_shape),
                ("d", disp.beta_ratio_scale),
            )
        ],
    )
    _note(written, args.out / "dispersion.csv", rows)
    return EXIT_OK


def cmd_regress(args, written=None) -> int:
    written = written if written is not None else {}
    fits = _fit_surrogates(_load_surfaces(args.surface_dir))
    coeff_rows = []
    stat_rows = []
    for model, fit in fits.items():
        for idx, est in enumerate(fit.coefficients):
            coeff_rows.append((model, idx, est))
        ad_stat, ad_p = anderson_darling_normality(fit.residuals)
        stat_rows.append((model, fit.r_squared, ad_stat, ad_p))
        coefs = ", ".join(f"{est:.3f}" for est in fit.coefficients)
        print(f"model {model}: coefficients [{coefs}]  R2={fit.r_squared:.3f}  "
              f"AD={ad_stat:.3f}  p={ad_p:.3g}")
    rows = write_csv(args.out / "fit_coeffs.csv", ["model", "coef_index", "estimate"], coeff_rows)
    _note(written, args.out / "fit_coeffs.csv", rows)
    rows = write_csv(args.out / "fit_stats.csv", ["model", "r2", "ad_stat", "ad_p"], stat_rows)
    _note(written, args.out / "fit_stats.csv", rows)
    return EXIT_OK


def cmd_quantiles(args, written=None) -> int:
    written = written if written is not None else {}
    _, cells, fits = _simulate_cells(args)
    surrogates = _fit_surrogates(_load_surfaces(getattr(args, "surface_dir", None)))
    coeffs = SurrogateCoefficients.from_fits(
        surrogates["A"], surrogates["B"], surrogates["C"], surrogates["D"]
    )
    triples = build_comparison(
        [(c, fs, fr) for c, (fs, fr) in zip(cells, fits)], coeffs, p_list=args.p_list
    )
    rows = write_csv(
        args.out / "quantiles.csv",
        ["target", "n", "delta", "p", "q_hat", "q_tilde", "q_double_hat"],
        [(t.target, t.n, t.delta, t.p, t.q_fitted, t.q_empirical, t.q_surrogate) for t in triples],
    )
    _note(written, args.out / "quantiles.csv", rows)
    return EXIT_OK


def cmd_asym(args, written=None) -> int:
    written = written if written is not None else {}
    _, cells, fits = _simulate_cells(args)
    coeffs = None
    if getattr(args, "regression_hats", False):
        surrogates = _fit_surrogates(_load_surfaces(getattr(args, "surface_dir", None)))
        coeffs = SurrogateCoefficients.from_fits(
            surrogates["A"], surrogates["B"], surrogates["C"], surrogates["D"]
        )
    table = comparison_table(
        [(c, fs, fr) for c, (fs, fr) in zip(cells, fits)], coeffs=coeffs
    )
    rows = write_csv(
        args.out / "first_order.csv",
        ["n", "delta", "diff_b1", "diff_v1", "diff_b2", "diff_v2"],
        [
            (r.n, r.delta, r.diff_bias_shape, r.diff_var_shape,
             r.diff_bias_ratio, r.diff_var_ratio)
            for r in table
        ],
    )
    _note(written, args.out / "first_order.csv", rows)
    return EXIT_OK


def cmd_curves(args, written=None) -> int:
    written = written if written is not None else {}
    pdf_rows = []
    for d in args.delta_list:
        params = WeibullParams(shape=d, scale=1.0)
        hi = quantile(params, 0.999)
        xs = np.linspace(0.0, hi, 401)
        ys = pdf(params, xs)
        pdf_rows.extend((d, x, y) for x, y in zip(xs, ys))
    rows = write_csv(args.out / "pdf_curves.csv", ["delta", "x", "pdf"], pdf_rows)
    _note(written, args.out / "pdf_curves.csv", rows)

    dgrid = np.arange(0.5, 10.0 + 1e-9, 0.005)
    moment_rows = []
    skew_rows = []
    for d in dgrid:
        m, v = mean_var(WeibullParams(shape=float(d), scale=1.0))
        moment_rows.append((float(d), m, v))
        skew_rows.append((float(d), skewness(float(d))))
    rows = write_csv(args.out / "moment_curves.csv", ["delta", "mean", "variance"], moment_rows)
    _note(written, args.out / "moment_curves.csv", rows)
    rows = write_csv(args.out / "skewness_curve.csv", ["delta", "skewness"], skew_rows)
    _note(written, args.out / "skewness_curve.csv", rows)
    print(f"skewness sign change at delta = {fmt(skewness_root(1e-10))}")
    return EXIT_OK


def cmd_report(args) -> int:
    written = {}
    args.raw = False
    args.surface_dir = None
    args.regression_hats = False
    cmd_curves(args, written)
    cmd_simulate(args, written)
    cmd_regress(args, written)
    cmd_quantiles(args, written)
    cmd_asym(args, written)
    items = _config_items(args, ("seed", "m", "n_list", "delta_list", "p_list", "tol"))
    digest = config_hash(items)
    manifest_rows = [(Path(p).name, rows, digest) for p, rows in sorted(written.items())]
    rows = write_csv(args.out / "manifest.csv", ["file", "rows", "config_hash"], manifest_rows)
    print(f"wrote {args.out / 'manifest.csv'} ({rows} rows, config {digest[:12]})")
    return EXIT_OK


_COMMANDS = {
    "mle": cmd_mle,
    "simulate": cmd_simulate,
    "repeat": cmd_repeat,
    "regress": cmd_regress,
    "quantiles": cmd_quantiles,
    "asym": cmd_asym,
    "curves": cmd_curves,
    "report": cmd_report,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser, commands = _build_parser()
    try:
        _apply_config_file(commands, argv)
        args = parser.parse_args(argv)
        if args.workers is not None:
            kernels.set_worker_threads(args.workers)
        if args.m < 100 and args.command not in ("mle", "regress", "curves"):
            raise ConfigError("--m must be at least 100")
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _CONVERGENCE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
