"""Command-line entry point: every capability behind one reproducible binary.

Each subcommand writes one canonical CSV (plus an optional JSON mirror) with
a '#'-prefixed metadata header carrying every parameter, the seed and the
artifact version.  Identical command lines produce byte-identical files;
wall-clock stamps appear only under --stamp.  Exit codes: 0 success, 2 flag
or validation errors, 3 numerical failures (inversion, quadrature, series,
fit non-convergence).

Column contracts (frozen; consumed by the plotting component):
  constants         JSON object of DerivedConstants fields
  eval j|mean-sojourn|return-rate      p,alpha,t,value
  eval sojourn-cdf|complement-cdf      p,alpha,t,theta,value
  eval stable-density|stable-cdf       gamma,t,route,value
  invert first-return                  t,value,est_error,method,order
  simulate          seed,horizon,sojourn,complement_sojourn,first_return,
                    returned,visits_to_zero,max_level
  experiment moments      experiment,p,alpha,beta,t,value,stderr,n
                          (+ fits file: experiment,p,alpha,beta,t_lo,t_hi,
                             slope,slope_stderr,predicted_slope)
  experiment survival     experiment,p,alpha,t,value,stderr,n
  experiment sojourn-cdf  experiment,p,alpha,t,theta,value,stderr,n
  experiment return-tail  experiment,p,alpha,t,value,stderr,n (+ fits file)
  experiment limit-law    experiment,p,alpha,t,b_fit,ks_distance,n
  experiment transience   experiment,p,alpha,t,value,stderr,predicted,n
  experiment volterra     experiment,p,alpha,t,value,stderr,n
  spectral          t,t_a,sigma,stderr,n
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime
import json
import os
import sys
import tempfile
from typing import Optional

import numpy as np

from . import __version__, analytic, laplace, simulate, spectral, stable
from . import experiments as ex
from .errors import NumericalError
from .model import ModelParams, build_generator, derive_constants

OUTDIR_ENV = "PADIC_SOJOURN_OUTDIR"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def _fmt(value) -> str:
    """Canonical cell text: shortest round-trip for floats, '' for missing."""
    if value is None:
        return ""
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        value = value.item()
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _out_path(args, default_name: str) -> str:
    if args.out:
        return args.out
    outdir = os.environ.get(OUTDIR_ENV, ".")
    return os.path.join(outdir, default_name)


def _atomic_write(path: str, text: str) -> None:
    """Write via a sibling temp file and rename, so readers never see a torn file."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _meta(args, extra: Optional[dict] = None) -> dict:
    """Self-describing header map: every flag value plus the artifact version."""
    meta = {"artifact": f"padic-sojourn {__version__}"}
    skip = {"out", "func", "stamp", "format"}
    for key, value in sorted(vars(args).items()):
        if key in skip or value is None:
            continue
        if isinstance(value, np.ndarray):
            value = ",".join(repr(float(v)) for v in value)
        meta[key.replace("_", "-")] = value
    if extra:
        meta.update(extra)
    if args.stamp:
        meta["generated"] = (
            datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
        )
    return meta


def _cell(value):
    """JSON-safe cell: native scalars, None for missing."""
    if value is None:
        return None
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    return value


def _write_table(path: str, meta: dict, columns: list, rows: list, fmt: str) -> None:
    if fmt == "json":
        payload = {
            "meta": {k: _fmt(v) for k, v in meta.items()},
            "columns": columns,
            "rows": [[_cell(c) for c in row] for row in rows],
        }
        _atomic_write(path, json.dumps(payload, indent=1) + "\n")
        return
    lines = [f"# {k}: {_fmt(v)}" for k, v in meta.items()]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(c) for c in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def _ext(args) -> str:
    return "json" if args.format == "json" else "csv"


# ---------- flag parsing helpers ----------


def _parse_list(text: str) -> np.ndarray:
    try:
        values = np.array([float(v) for v in text.split(",") if v.strip() != ""])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad numeric list {text!r}") from exc
    if values.size == 0:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _parse_geom(text: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("geometric grid needs lo,hi,count")
    lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    if not (0 < lo < hi) or count < 2:
        raise argparse.ArgumentTypeError("geometric grid needs 0 < lo < hi, count >= 2")
    return np.geomspace(lo, hi, count)


def _grid(args, name: str, required: bool = True) -> Optional[np.ndarray]:
    single = getattr(args, name, None)
    listed = getattr(args, f"{name}_grid", None)
    geom = getattr(args, f"{name}_geom", None)
    given = [g for g in (single, listed, geom) if g is not None]
    if len(given) > 1:
        raise SystemExit2(f"give only one of --{name}/--{name}-grid/--{name}-geom")
    if not given:
        if required:
            raise SystemExit2(f"one of --{name}/--{name}-grid/--{name}-geom is required")
        return None
    value = given[0]
    return np.atleast_1d(np.asarray(value, dtype=float))


class SystemExit2(Exception):
    """Flag-level validation error surfaced with exit code 2."""


def _seed(text: str) -> int:
    value = int(text)
    if not (0 <= value < 2**64):
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def _model(args) -> ModelParams:
    return ModelParams(p=args.p, alpha=args.alpha)


def _method(args) -> laplace.InversionMethod:
    return laplace.InversionMethod(kind=args.method, order=args.order)


# ---------- subcommands ----------


def cmd_constants(args) -> int:
    params = _model(args)
    consts = derive_constants(params)
    payload = {"p": params.p, "alpha": params.alpha}
    payload.update(dataclasses.asdict(consts))
    payload["artifact"] = f"padic-sojourn {__version__}"
    if args.stamp:
        payload["generated"] = (
            datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
        )
    text = json.dumps(payload, indent=1) + "\n"
    sys.stdout.write(text)
    if args.out:
        _atomic_write(args.out, text)
    return EXIT_OK


_EVAL_TIME_FUNCS = {
    "j": analytic.survival_j,
    "mean-sojourn": analytic.mean_sojourn,
    "return-rate": analytic.v_rate,
}


def cmd_eval(args) -> int:
    target = args.target
    fmt = _ext(args)
    if target in _EVAL_TIME_FUNCS:
        params = _model(args)
        t_grid = _grid(args, "t")
        fn = _EVAL_TIME_FUNCS[target]
        rows = [[args.p, args.alpha, t, fn(float(t), params)] for t in t_grid]
        path = _out_path(args, f"eval_{target}.{fmt}")
        _write_table(path, _meta(args), ["p", "alpha", "t", "value"], rows, fmt)
    elif target in ("sojourn-cdf", "complement-cdf"):
        params = _model(args)
        if args.t is None:
            raise SystemExit2(f"eval {target} needs a fixed --t")
        t = float(args.t)
        theta = _grid(args, "theta")
        if np.any(theta < 0) or np.any(theta > t):
            raise SystemExit2("theta values must lie in [0, t]")
        fn = analytic.sojourn_cdf if target == "sojourn-cdf" else analytic.complement_sojourn_cdf
        rows = [[args.p, args.alpha, t, th, fn(float(th), t, params)] for th in theta]
        path = _out_path(args, f"eval_{target}.{fmt}")
        _write_table(path, _meta(args), ["p", "alpha", "t", "theta", "value"], rows, fmt)
    else:
        if args.gamma is None:
            raise SystemExit2(f"eval {target} needs --gamma")
        t_grid = _grid(args, "t")
        rows = []
        if target == "stable-cdf":
            for t in t_grid:
                rows.append([args.gamma, t, "series", stable.stable_cdf(float(t), args.gamma)])
        else:
            routes = ("series", "quadrature") if args.route == "both" else (args.route,)
            for route in routes:
                for t in t_grid:
                    if route == "series":
                        value = stable.stable_density_series(float(t), args.gamma)
                    else:
                        value = stable.stable_density_quadrature(float(t), args.gamma)
                    rows.append([args.gamma, t, route, value])
        path = _out_path(args, f"eval_{target.replace('-', '_')}.{fmt}")
        _write_table(path, _meta(args), ["gamma", "t", "route", "value"], rows, fmt)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_invert(args) -> int:
    params = _model(args)
    method = _method(args)
    t_grid = _grid(args, "t")
    ctrl = analytic.DEFAULT_CTRL
    rows = []
    for t in t_grid:
        report = laplace.invert(
            lambda s: laplace.f_hat_any(s, params, ctrl), float(t), method
        )
        value = report.value
        if value < 0.0 and value >= -2.0 * max(report.est_error, 1e-15):
            value = 0.0
        rows.append([t, value, report.est_error, report.method.kind, report.method.order])
    fmt = _ext(args)
    path = _out_path(args, f"invert_first_return.{fmt}")
    _write_table(
        path, _meta(args), ["t", "value", "est_error", "method", "order"], rows, fmt
    )
    print(f"wrote {path}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    params = _model(args)
    gen = build_generator(params, args.max_level)
    res = simulate.run_ensemble(
        gen,
        horizon=args.horizon,
        n_paths=args.n_paths,
        seed=args.seed,
        threads=args.threads,
        stop_at_first_return=args.stop_at_first_return,
    )
    rows = []
    for i in range(args.n_paths):
        first = res.first_return[i] if res.first_return[i] >= 0.0 else None
        rows.append(
            [
                args.seed,
                args.horizon,
                res.sojourn[i],
                res.complement_sojourn[i],
                first,
                int(res.returned[i]),
                int(res.visits_to_zero[i]),
                int(res.max_level[i]),
            ]
        )
    fmt = _ext(args)
    path = _out_path(args, f"simulate_p{args.p}_a{args.alpha}_s{args.seed}.{fmt}")
    _write_table(
        path,
        _meta(args),
        [
            "seed",
            "horizon",
            "sojourn",
            "complement_sojourn",
            "first_return",
            "returned",
            "visits_to_zero",
            "max_level",
        ],
        rows,
        fmt,
    )
    print(f"wrote {path}")
    return EXIT_OK


def _fits_path(path: str) -> str:
    stem, _, suffix = path.rpartition(".")
    return f"{stem}_fits.{suffix}" if stem else f"{path}_fits"


def _experiment_moments(args, fmt: str, path: str) -> None:
    params = _model(args)
    t_grid = _grid(args, "t")
    betas = np.atleast_1d(np.asarray(args.beta, dtype=float))
    report = ex.moment_scaling_report(
        params, betas, t_grid, args.n_paths, args.seed,
        max_level=args.max_level, threads=args.threads,
    )
    rows = []
    fit_rows = []
    for ms in report:
        for t, est in zip(ms.t_grid, ms.estimates):
            rows.append(
                ["moments", args.p, args.alpha, ms.beta, t, est.value, est.stderr, est.n]
            )
        fit_rows.append(
            [
                "moments",
                args.p,
                args.alpha,
                ms.beta,
                ms.fit.t_range[0],
                ms.fit.t_range[1],
                ms.fit.slope,
                ms.fit.slope_stderr,
                ms.predicted_slope,
            ]
        )
    _write_table(
        path,
        _meta(args),
        ["experiment", "p", "alpha", "beta", "t", "value", "stderr", "n"],
        rows,
        fmt,
    )
    _write_table(
        _fits_path(path),
        _meta(args),
        [
            "experiment",
            "p",
            "alpha",
            "beta",
            "t_lo",
            "t_hi",
            "slope",
            "slope_stderr",
            "predicted_slope",
        ],
        fit_rows,
        fmt,
    )


def _experiment_survival(args, fmt: str, path: str) -> None:
    params = _model(args)
    t_grid = _grid(args, "t")
    gen = build_generator(params, args.max_level)
    table = ex.ode_survival_oracle(gen, t_grid, tol=args.tol)
    rows = []
    for t in t_grid:
        rows.append(
            ["survival_series", args.p, args.alpha, t, analytic.survival_j(float(t), params), None, None]
        )
    for t, p0 in table:
        rows.append(["survival_ode", args.p, args.alpha, t, p0, None, None])
    _write_table(
        path,
        _meta(args),
        ["experiment", "p", "alpha", "t", "value", "stderr", "n"],
        rows,
        fmt,
    )


def _experiment_sojourn_cdf(args, fmt: str, path: str) -> None:
    params = _model(args)
    if args.t is None:
        raise SystemExit2("sojourn-cdf needs a fixed --t")
    t = float(args.t)
    gen = build_generator(params, args.max_level)
    res = simulate.run_ensemble(
        gen, horizon=t, n_paths=args.n_paths, seed=args.seed, threads=args.threads
    )
    samples = np.sort(res.sojourn)
    # quantile-spaced support keeps the file small at any ensemble size
    take = np.unique(np.linspace(0, samples.size - 1, min(256, samples.size)).astype(int))
    theta = np.unique(samples[take])
    ecdf = np.searchsorted(samples, theta, side="right") / samples.size
    model = analytic.sojourn_cdf_grid(theta, t, params)
    rows = []
    for th, val in zip(theta, ecdf):
        rows.append(
            ["sojourn_cdf_empirical", args.p, args.alpha, t, th, val, None, args.n_paths]
        )
    for th, val in zip(theta, model):
        rows.append(["sojourn_cdf_model", args.p, args.alpha, t, th, val, None, None])
    _write_table(
        path,
        _meta(args),
        ["experiment", "p", "alpha", "t", "theta", "value", "stderr", "n"],
        rows,
        fmt,
    )


def _experiment_return_tail(args, fmt: str, path: str) -> None:
    params = _model(args)
    t_range = None
    if args.t_grid is not None or args.t_geom is not None:
        grid = _grid(args, "t")
        t_range = (float(grid.min()), float(grid.max()))
    result = ex.first_return_tail(
        params,
        horizon=args.horizon,
        n_paths=args.n_paths,
        seed=args.seed,
        t_range=t_range,
        max_level=args.max_level,
        threads=args.threads,
    )
    n_eff = round(args.n_paths * (1.0 - result["censored_fraction"]))
    if params.alpha > 1.0:
        n_eff = args.n_paths
    rows = []
    for t, surv in zip(result["grid"], result["survival"]):
        err = float(np.sqrt(max(surv * (1.0 - surv), 0.0) / n_eff))
        rows.append(["return_tail", args.p, args.alpha, t, surv, err, n_eff])
    fit = result["fit"]
    fit_rows = [
        [
            "return_tail",
            args.p,
            args.alpha,
            None,
            fit.t_range[0],
            fit.t_range[1],
            fit.slope,
            fit.slope_stderr,
            result["predicted_slope"],
        ]
    ]
    _write_table(
        path,
        _meta(args, {"censored-fraction": result["censored_fraction"]}),
        ["experiment", "p", "alpha", "t", "value", "stderr", "n"],
        rows,
        fmt,
    )
    _write_table(
        _fits_path(path),
        _meta(args),
        [
            "experiment",
            "p",
            "alpha",
            "beta",
            "t_lo",
            "t_hi",
            "slope",
            "slope_stderr",
            "predicted_slope",
        ],
        fit_rows,
        fmt,
    )


def _experiment_limit_law(args, fmt: str, path: str) -> None:
    params = _model(args)
    if args.t is None:
        raise SystemExit2("limit-law needs a fixed --t")
    result = ex.limit_law_check(
        params, float(args.t), args.n_paths, args.seed,
        max_level=args.max_level, threads=args.threads,
    )
    rows = [
        [
            "limit_law",
            args.p,
            args.alpha,
            result["t"],
            result["B_fit"],
            result["ks_distance"],
            result["n"],
        ]
    ]
    _write_table(
        path,
        _meta(args, {"gamma": result["gamma"]}),
        ["experiment", "p", "alpha", "t", "b_fit", "ks_distance", "n"],
        rows,
        fmt,
    )


def _experiment_transience(args, fmt: str, path: str) -> None:
    params = _model(args)
    result = ex.transience_check(
        params, args.horizon, args.n_paths, args.seed,
        max_level=args.max_level, threads=args.threads,
    )
    rows = [
        [
            "transience",
            args.p,
            args.alpha,
            args.horizon,
            result["never_return_fraction"],
            result["stderr"],
            result["expected"],
            args.n_paths,
        ]
    ]
    _write_table(
        path,
        _meta(args, {"censoring-bias-bound": result["censoring_bias_bound"]}),
        ["experiment", "p", "alpha", "t", "value", "stderr", "predicted", "n"],
        rows,
        fmt,
    )


def _experiment_volterra(args, fmt: str, path: str) -> None:
    params = _model(args)
    t_grid = _grid(args, "t")
    residuals = [
        ex.volterra_residual(params, [float(t)]) for t in t_grid
    ]
    rows = [
        ["volterra", args.p, args.alpha, t, r, None, None]
        for t, r in zip(t_grid, residuals)
    ]
    _write_table(
        path,
        _meta(args),
        ["experiment", "p", "alpha", "t", "value", "stderr", "n"],
        rows,
        fmt,
    )


_EXPERIMENTS = {
    "moments": _experiment_moments,
    "survival": _experiment_survival,
    "sojourn-cdf": _experiment_sojourn_cdf,
    "return-tail": _experiment_return_tail,
    "limit-law": _experiment_limit_law,
    "transience": _experiment_transience,
    "volterra": _experiment_volterra,
}


def cmd_experiment(args) -> int:
    fmt = _ext(args)
    path = _out_path(args, f"experiment_{args.name.replace('-', '_')}.{fmt}")
    _EXPERIMENTS[args.name](args, fmt, path)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_spectral(args) -> int:
    params = _model(args)
    sp = spectral.SpectralParams(h=args.h, d=args.d, model=params)
    ta_grid = _grid(args, "ta", required=False)
    if ta_grid is not None:
        if args.t is None:
            raise SystemExit2("ageing run needs a fixed --t window length")
        table = spectral.ageing_width(
            sp, float(args.t), ta_grid, args.n_paths, args.seed,
            max_level=args.max_level, threads=args.threads,
        )
    else:
        t_grid = _grid(args, "t")
        table = spectral.hole_width(
            sp, t_grid, args.n_paths, args.seed,
            max_level=args.max_level, threads=args.threads,
        )
    rows = [
        [table.t[i], table.t_a[i], table.sigma[i], table.stderr[i], int(table.n[i])]
        for i in range(len(table))
    ]
    fmt = _ext(args)
    path = _out_path(args, f"spectral_h{args.h}_a{args.alpha}.{fmt}")
    _write_table(path, _meta(args), ["t", "t_a", "sigma", "stderr", "n"], rows, fmt)
    print(f"wrote {path}")
    return EXIT_OK


# ---------- parser ----------


def _add_common(sub, model=True, seedful=False, seed_required=True):
    sub.add_argument("--out", type=str, default="", help="output path (default: env "
                     f"{OUTDIR_ENV} or cwd, derived name)")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--stamp", action="store_true",
                     help="include a wall-clock line in the header (off keeps "
                     "outputs byte-identical)")
    if model:
        sub.add_argument("--p", type=int, required=True, help="prime scale factor")
        sub.add_argument("--alpha", type=float, required=True, help="kernel exponent")
    if seedful:
        sub.add_argument("--n-paths", type=int, required=seed_required)
        sub.add_argument("--seed", type=_seed, required=seed_required)
        sub.add_argument("--max-level", type=int, default=ex.DEFAULT_MAX_LEVEL)
        sub.add_argument("--threads", type=int, default=1)


def _add_time_grid(sub, name="t"):
    sub.add_argument(f"--{name}", type=float, default=None)
    sub.add_argument(f"--{name}-grid", type=_parse_list, default=None,
                     help="comma-separated values")
    sub.add_argument(f"--{name}-geom", type=_parse_geom, default=None,
                     help="lo,hi,count geometric grid")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="padic-sojourn",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = ap.add_subparsers(dest="subcommand", required=True)

    sub = subs.add_parser("constants", help="derived constants as JSON")
    sub.add_argument("--p", type=int, required=True)
    sub.add_argument("--alpha", type=float, required=True)
    sub.add_argument("--out", type=str, default="")
    sub.add_argument("--stamp", action="store_true")
    sub.set_defaults(func=cmd_constants)

    sub = subs.add_parser("eval", help="closed-form evaluators on a grid")
    sub.add_argument(
        "target",
        choices=(
            "j", "mean-sojourn", "return-rate",
            "sojourn-cdf", "complement-cdf",
            "stable-density", "stable-cdf",
        ),
    )
    _add_common(sub, model=False)
    sub.add_argument("--p", type=int, default=None)
    sub.add_argument("--alpha", type=float, default=None)
    sub.add_argument("--gamma", type=float, default=None, help="stable index in (0,1)")
    sub.add_argument("--route", choices=("series", "quadrature", "both"), default="both")
    _add_time_grid(sub)
    _add_time_grid(sub, "theta")
    sub.set_defaults(func=cmd_eval)

    sub = subs.add_parser("invert", help="numerical Laplace inversion")
    sub.add_argument("transform", choices=("first-return",))
    _add_common(sub)
    _add_time_grid(sub)
    sub.add_argument("--method", choices=("gaver-stehfest", "talbot"), default="talbot")
    sub.add_argument("--order", type=int, default=24)
    sub.set_defaults(func=cmd_invert)

    sub = subs.add_parser("simulate", help="per-path ensemble table")
    _add_common(sub, seedful=True)
    sub.add_argument("--horizon", type=float, required=True)
    sub.add_argument("--stop-at-first-return", action="store_true")
    sub.set_defaults(func=cmd_simulate)

    sub = subs.add_parser("experiment", help="estimators confronting predictions")
    sub.add_argument("name", choices=sorted(_EXPERIMENTS))
    _add_common(sub, seedful=True, seed_required=False)
    _add_time_grid(sub)
    sub.add_argument("--beta", type=_parse_list, default=None,
                     help="moment orders (moments experiment)")
    sub.add_argument("--horizon", type=float, default=None)
    sub.add_argument("--tol", type=float, default=1e-9, help="ODE oracle tolerance")
    sub.set_defaults(func=cmd_experiment)

    sub = subs.add_parser("spectral", help="subordinated hole widths")
    _add_common(sub, seedful=True)
    sub.add_argument("--h", type=float, required=True, dest="h")
    sub.add_argument("--d", type=float, default=1.0, dest="d")
    _add_time_grid(sub)
    _add_time_grid(sub, "ta")
    sub.set_defaults(func=cmd_spectral)

    return ap


def _validate(args) -> None:
    if getattr(args, "n_paths", None) is not None and args.n_paths < 1:
        raise SystemExit2("--n-paths must be >= 1")
    if getattr(args, "threads", None) is not None and args.threads < 1:
        raise SystemExit2("--threads must be >= 1")
    if args.subcommand == "experiment":
        if args.name in ("return-tail", "transience") and args.horizon is None:
            raise SystemExit2(f"experiment {args.name} needs --horizon")
        if args.name == "moments" and args.beta is None:
            raise SystemExit2("experiment moments needs --beta")
        if args.name not in ("survival", "volterra"):
            if args.n_paths is None or args.seed is None:
                raise SystemExit2(f"experiment {args.name} needs --n-paths and --seed")
    if args.subcommand == "eval":
        stable_targets = ("stable-density", "stable-cdf")
        if args.target not in stable_targets:
            if args.p is None or args.alpha is None:
                raise SystemExit2(f"eval {args.target} needs --p and --alpha")


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        _validate(args)
        return args.func(args)
    except SystemExit2 as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
