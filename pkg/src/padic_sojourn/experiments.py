"""Statistical experiments tying the simulator to the analytic layer.

Each experiment estimates a quantity from simulated paths and confronts it
with an independently computed prediction: fractional moments and their
scaling exponents, the renewal (Volterra) identity linking the return-rate
function to the first-return density, an ODE integration of the full
generator as an oracle for the survival series, the rescaled-occupation
limit law, and first-return tail exponents.

All ensembles are deterministic in (seed, path index), so every number here
is reproducible from the command line that produced it.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import PchipInterpolator
from scipy.special import kolmogi

from . import analytic, laplace, simulate
from .errors import FitError, NumericalError
from .model import ModelParams, NormChainGenerator, build_generator, derive_constants
from .stable import stable_cdf

__all__ = [
    "Estimate",
    "PowerLawFit",
    "MomentScaling",
    "estimate_from_samples",
    "merge_estimates",
    "fit_power_law",
    "estimate_moment",
    "moment_scaling_report",
    "predicted_moment_exponent",
    "volterra_residual",
    "ode_survival_oracle",
    "limit_law_check",
    "first_return_tail",
    "predicted_return_survival_slope",
    "transience_check",
    "sojourn_ks",
    "ks_critical_value",
    "DEFAULT_MAX_LEVEL",
]

# Generator cutoff used when the caller does not pick one.  The clipped
# upward mass beyond level 60 is below 1e-9 of the total exit rate for every
# parameter set exercised here.
DEFAULT_MAX_LEVEL = 60


@dataclass(frozen=True)
class Estimate:
    """Sample mean with its standard error; mergeable across sub-ensembles."""

    value: float
    stderr: float
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not self.stderr >= 0:
            raise ValueError("stderr must be nonnegative")


def estimate_from_samples(samples: np.ndarray) -> Estimate:
    """Mean and stderr with compensated (fsum) accumulation, two passes.

    fsum makes the value independent of how the ensemble was partitioned
    across threads; stderr = sample standard deviation / sqrt(n).
    """
    x = np.asarray(samples, dtype=float).ravel()
    n = x.size
    if n < 1:
        raise ValueError("need at least one sample")
    mean = math.fsum(x) / n
    if n == 1:
        return Estimate(value=mean, stderr=0.0, n=1)
    m2 = math.fsum((x - mean) ** 2)
    sd = math.sqrt(m2 / (n - 1))
    return Estimate(value=mean, stderr=sd / math.sqrt(n), n=n)


def merge_estimates(a: Estimate, b: Estimate) -> Estimate:
    """Pooled mean/variance merge; commutative, associative up to rounding."""
    n = a.n + b.n
    delta = b.value - a.value
    mean = a.value + delta * (b.n / n)
    m2 = (
        a.stderr**2 * a.n * max(a.n - 1, 0)
        + b.stderr**2 * b.n * max(b.n - 1, 0)
        + delta * delta * (a.n * b.n / n)
    )
    if n < 2:
        return Estimate(value=mean, stderr=0.0, n=n)
    sd = math.sqrt(max(m2, 0.0) / (n - 1))
    return Estimate(value=mean, stderr=sd / math.sqrt(n), n=n)


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares line through (log t, log y); slope is the exponent."""

    slope: float
    slope_stderr: float
    intercept: float
    t_range: tuple
    r_squared: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.r_squared <= 1.0 + 1e-12):
            raise ValueError(f"r_squared out of range: {self.r_squared!r}")


def fit_power_law(t: np.ndarray, y: np.ndarray) -> PowerLawFit:
    """OLS fit of log y on log t; needs >= 5 strictly positive pairs."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = (t > 0) & (y > 0) & np.isfinite(y)
    t, y = t[keep], y[keep]
    if t.size < 5:
        raise FitError(f"power-law fit needs >= 5 positive points, got {t.size}")
    x = np.log(t)
    z = np.log(y)
    xbar = x.mean()
    sxx = float(np.sum((x - xbar) ** 2))
    slope = float(np.sum((x - xbar) * (z - z.mean())) / sxx)
    intercept = float(z.mean() - slope * xbar)
    resid = z - (intercept + slope * x)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((z - z.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, 1.0 - ss_res / ss_tot)
    dof = t.size - 2
    slope_stderr = math.sqrt(ss_res / dof / sxx) if dof > 0 else 0.0
    return PowerLawFit(
        slope=slope,
        slope_stderr=slope_stderr,
        intercept=intercept,
        t_range=(float(t.min()), float(t.max())),
        r_squared=min(r2, 1.0),
    )


def _asymptotic_window(t: np.ndarray, y: np.ndarray):
    """Drop the smallest decade of t: scaling claims are asymptotic."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = t >= 10.0 * t.min() - 1e-12 * t.min()
    if np.count_nonzero(keep) >= 5:
        return t[keep], y[keep]
    return t, y


def estimate_moment(
    params: ModelParams,
    t: float,
    beta: float,
    n_paths: int,
    seed: int,
    max_level: int = DEFAULT_MAX_LEVEL,
    threads: int = 1,
) -> Estimate:
    """Monte Carlo mean of occupation^beta at horizon t."""
    if not beta > 0:
        raise ValueError("beta must be > 0")
    if n_paths < 100:
        raise ValueError("n_paths must be >= 100")
    gen = build_generator(params, max_level)
    res = simulate.run_ensemble(gen, horizon=t, n_paths=n_paths, seed=seed, threads=threads)
    return estimate_from_samples(res.sojourn**beta)


def predicted_moment_exponent(params: ModelParams, beta: float) -> float:
    """Scaling exponent of the beta-th occupation moment, alpha > 1 regimes."""
    a = params.alpha
    if not a > 1:
        raise ValueError("moment scaling prediction requires alpha > 1")
    boundary = a / (a - 1.0)
    if beta < boundary:
        return (a - 1.0) / a * beta
    return beta - 1.0 / (a - 1.0)


@dataclass(frozen=True)
class MomentScaling:
    beta: float
    fit: PowerLawFit
    predicted_slope: float
    t_grid: tuple
    estimates: tuple


def moment_scaling_report(
    params: ModelParams,
    beta_list: Sequence[float],
    t_grid: Sequence[float],
    n_paths: int,
    seed: int,
    max_level: int = DEFAULT_MAX_LEVEL,
    threads: int = 1,
) -> list:
    """Fit occupation-moment growth exponents on a shared ensemble.

    One ensemble runs to max(t_grid) with checkpoints at every grid time, so
    all betas see identical paths.  Fits drop the smallest decade and warn
    (without failing) when r^2 < 0.98.
    """
    if not params.alpha > 1:
        raise ValueError("moment scaling requires alpha > 1")
    t_grid = np.asarray(sorted(float(t) for t in t_grid))
    if t_grid.size < 8:
        raise ValueError("need >= 8 grid times")
    if t_grid[0] <= 0:
        raise ValueError("grid times must be positive")
    gen = build_generator(params, max_level)
    res = simulate.run_ensemble(
        gen,
        horizon=float(t_grid[-1]),
        n_paths=n_paths,
        seed=seed,
        checkpoints=t_grid,
        threads=threads,
    )
    out = []
    for beta in beta_list:
        ests = tuple(
            estimate_from_samples(res.theta[:, j] ** beta) for j in range(t_grid.size)
        )
        means = np.array([e.value for e in ests])
        tt, mm = _asymptotic_window(t_grid, means)
        fit = fit_power_law(tt, mm)
        if fit.r_squared < 0.98:
            warnings.warn(
                f"moment fit beta={beta}: r^2={fit.r_squared:.4f} < 0.98",
                stacklevel=2,
            )
        out.append(
            MomentScaling(
                beta=float(beta),
                fit=fit,
                predicted_slope=predicted_moment_exponent(params, beta),
                t_grid=tuple(t_grid),
                estimates=ests,
            )
        )
    return out


def volterra_residual(
    params: ModelParams,
    t_grid: Sequence[float],
    method=None,
    ctrl: Optional[analytic.SeriesControl] = None,
) -> float:
    """Max residual of the renewal identity v = v * f + f over t_grid.

    v comes from its series, f from numerical inversion, the convolution
    from adaptive quadrature: three independent routes that must cancel.
    """
    if method is None:
        method = laplace.InversionMethod(kind=laplace.KIND_TALBOT, order=24)

    def fdens(u: float) -> float:
        if u <= 0.0:
            return 0.0
        return laplace.first_return_density(u, params, method, ctrl)

    worst = 0.0
    for t in t_grid:
        t = float(t)
        if t <= 0:
            raise ValueError("grid times must be positive")
        out = integrate.quad(
            lambda u: analytic.v_rate(t - u, params, ctrl) * fdens(u),
            0.0,
            t,
            epsabs=1e-7,
            epsrel=1e-7,
            limit=300,
            full_output=1,
        )
        conv, abserr = out[0], out[1]
        if abserr > 1e-4:
            raise NumericalError(
                f"convolution quadrature error {abserr:.2e} too large at t={t}"
            )
        r = analytic.v_rate(t, params, ctrl) - conv - fdens(t)
        worst = max(worst, abs(r))
    return worst


def ode_survival_oracle(
    gen: NormChainGenerator,
    t_grid: Sequence[float],
    tol: float = 1e-9,
) -> np.ndarray:
    """Integrate the master equation dP/dt = Q^T P from delta at level 0.

    Returns rows (t, P_0(t)).  This is a generator-level oracle: it knows
    nothing of the series expressions it is compared against.
    """
    t_grid = np.asarray(sorted(float(t) for t in t_grid))
    if t_grid[0] < 0:
        raise ValueError("grid times must be >= 0")
    qt = np.ascontiguousarray(gen.rows.T)
    p0 = np.zeros(qt.shape[0])
    p0[0] = 1.0
    sol = integrate.solve_ivp(
        lambda _, p: qt @ p,
        (0.0, float(t_grid[-1]) if t_grid[-1] > 0 else 1.0),
        p0,
        method="DOP853",
        rtol=tol,
        atol=tol * 1e-2,
        t_eval=t_grid,
    )
    if not sol.success:
        raise NumericalError(f"master-equation integration failed: {sol.message}")
    return np.column_stack([sol.t, sol.y[0]])


def _stable_cdf_on_grid(gamma: float, y_lo: float, y_hi: float, n: int = 320):
    """Monotone interpolant of F_gamma over [y_lo, y_hi] in log-argument."""
    ys = np.geomspace(y_lo, y_hi, n)
    fs = np.array([stable_cdf(float(y), gamma) for y in ys])
    fs = np.maximum.accumulate(np.clip(fs, 0.0, 1.0))
    return PchipInterpolator(np.log(ys), fs, extrapolate=False)


def limit_law_check(
    params: ModelParams,
    t: float,
    n_paths: int,
    seed: int,
    max_level: int = DEFAULT_MAX_LEVEL,
    threads: int = 1,
) -> dict:
    """One-parameter fit of the rescaled-occupation limit law at horizon t.

    Samples x = occupation(t) / t^gamma and fits the single scale constant b
    in the model CDF 1 - F_gamma((1/(B_alpha b x))^(1/gamma)) by least
    squares on the CDF, then reports the post-fit KS distance.  The law's
    scale constant is only bounded, not pinned, by the theory, so the check
    is goodness-of-fit, not value comparison.
    """
    dc = derive_constants(params)
    if dc.tail_gamma is None:
        raise ValueError("limit law requires alpha > 1")
    if t < 1e3:
        raise ValueError("limit law check needs t >= 1e3")
    gamma = dc.tail_gamma
    b_alpha = dc.b_alpha

    gen = build_generator(params, max_level)
    res = simulate.run_ensemble(gen, horizon=t, n_paths=n_paths, seed=seed, threads=threads)
    x = np.sort(res.sojourn) / t**gamma
    n = x.size

    # y(x; b) = (1/(B_alpha b x))^(1/gamma) = y1(x) * b^(-1/gamma)
    log_y1 = -np.log(b_alpha * x) / gamma
    log_b_grid = np.linspace(math.log(1e-3), math.log(1e3), 2)  # bracket only
    pad = math.log(1e4) / gamma
    interp = _stable_cdf_on_grid(
        gamma,
        max(math.exp(np.min(log_y1) - pad), 1e-4),
        math.exp(np.max(log_y1) + pad),
    )
    lo_knot, hi_knot = interp.x[0], interp.x[-1]

    def model_cdf(log_b: float) -> np.ndarray:
        ly = log_y1 - log_b / gamma
        f = interp(np.clip(ly, lo_knot, hi_knot))
        f = np.where(ly < lo_knot, 0.0, f)  # below grid: F underflows
        f = np.where(ly > hi_knot, 1.0, f)
        return 1.0 - f

    ranks_hi = np.arange(1, n + 1) / n
    ranks_lo = np.arange(0, n) / n

    def cdf_sse(log_b: float) -> float:
        m = model_cdf(log_b)
        mid = 0.5 * (ranks_hi + ranks_lo)
        return float(np.mean((m - mid) ** 2))

    opt = optimize.minimize_scalar(
        cdf_sse, bounds=(float(log_b_grid[0]), float(log_b_grid[-1])), method="bounded"
    )
    if not opt.success:
        raise FitError(f"limit-law scale fit did not converge: {opt}")
    log_b = float(opt.x)
    m = model_cdf(log_b)
    ks = float(np.max(np.maximum(np.abs(m - ranks_hi), np.abs(m - ranks_lo))))
    return {
        "B_fit": math.exp(log_b),
        "ks_distance": ks,
        "gamma": gamma,
        "t": float(t),
        "n": n,
    }


def predicted_return_survival_slope(params: ModelParams) -> Optional[float]:
    """Log-log slope of the first-return survival; None in the log-corrected case."""
    a = params.alpha
    if a > 1:
        return -(a - 1.0) / a
    if a < 1:
        return -(1.0 / a - 1.0)
    return None


def first_return_tail(
    params: ModelParams,
    horizon: float,
    n_paths: int,
    seed: int,
    t_range: Optional[tuple] = None,
    n_grid: int = 16,
    max_level: int = DEFAULT_MAX_LEVEL,
    threads: int = 1,
) -> dict:
    """Fit the tail exponent of the first-return time from simulation.

    For alpha > 1 the unconditional survival is fitted (return is certain);
    for alpha < 1 the survival conditional on returning is fitted and the
    censored (never returned by horizon) fraction is reported alongside.
    The fitted window is [t_range]; one extra decade below it is sampled and
    discarded as pre-asymptotic.
    """
    if n_paths < 10**4:
        raise ValueError("first-return tail needs n_paths >= 1e4")
    if t_range is None:
        t_range = (horizon * 1e-4, horizon * 0.1)
    t_lo, t_hi = float(t_range[0]), float(t_range[1])
    if not (0 < t_lo < t_hi <= horizon):
        raise ValueError("need 0 < t_lo < t_hi <= horizon")

    gen = build_generator(params, max_level)
    res = simulate.run_ensemble(
        gen,
        horizon=horizon,
        n_paths=n_paths,
        seed=seed,
        threads=threads,
        stop_at_first_return=True,
    )
    tau = res.first_return[res.returned]
    n_ret = tau.size
    n_cens = n_paths - n_ret
    if n_ret < 100:
        raise FitError(f"only {n_ret} returned paths; tail fit not meaningful")

    grid = np.geomspace(t_lo / 10.0, t_hi, n_grid)
    tau_sorted = np.sort(tau)
    above = n_ret - np.searchsorted(tau_sorted, grid, side="right")
    if params.alpha > 1:
        surv = (above + n_cens) / n_paths
    else:
        surv = above / n_ret
    tt, ss = _asymptotic_window(grid, surv)
    fit = fit_power_law(tt, ss)
    return {
        "fit": fit,
        "predicted_slope": predicted_return_survival_slope(params),
        "censored_fraction": n_cens / n_paths,
        "grid": grid,
        "survival": surv,
        "n": n_paths,
    }


def transience_check(
    params: ModelParams,
    horizon: float,
    n_paths: int,
    seed: int,
    max_level: int = DEFAULT_MAX_LEVEL,
    threads: int = 1,
) -> dict:
    """Never-returned fraction vs the analytic escape probability 1 - C_alpha."""
    dc = derive_constants(params)
    if dc.c_alpha is None:
        raise ValueError("transience check requires alpha < 1")
    gen = build_generator(params, max_level)
    res = simulate.run_ensemble(
        gen,
        horizon=horizon,
        n_paths=n_paths,
        seed=seed,
        threads=threads,
        stop_at_first_return=True,
    )
    q = 1.0 - res.returned.mean()
    stderr = math.sqrt(max(q * (1.0 - q), 1e-300) / n_paths)
    return {
        "never_return_fraction": q,
        "stderr": stderr,
        "expected": 1.0 - dc.c_alpha,
        "n": n_paths,
        # the remaining bias: returns later than horizon, bounded by the
        # conditional tail ~ horizon^-(1/alpha - 1)
        "censoring_bias_bound": float(dc.c_alpha)
        * horizon ** -(1.0 / params.alpha - 1.0),
    }


def ks_critical_value(n: int, level: float = 0.01) -> float:
    """Asymptotic one-sample Kolmogorov-Smirnov critical distance."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return float(kolmogi(level)) / math.sqrt(n)


def sojourn_ks(
    params: ModelParams,
    t: float,
    n_paths: int,
    seed: int,
    max_level: int = DEFAULT_MAX_LEVEL,
    threads: int = 1,
    inverter=None,
    ctrl: Optional[analytic.SeriesControl] = None,
) -> dict:
    """KS distance between simulated occupation values and the analytic CDF.

    The distribution has an atom at theta = t (paths that never left), where
    the analytic CDF is exactly 1 and its left limit is 1 - exp(-B t); both
    sides of each empirical step are compared accordingly.
    """
    gen = build_generator(params, max_level)
    res = simulate.run_ensemble(gen, horizon=t, n_paths=n_paths, seed=seed, threads=threads)
    theta = np.sort(res.sojourn)
    n = theta.size

    uniq, counts = np.unique(theta, return_counts=True)
    cum = np.cumsum(counts)
    emp_hi = cum / n
    emp_lo = (cum - counts) / n

    b = derive_constants(params).b_alpha
    model = np.empty(uniq.size)
    model_left = np.empty(uniq.size)
    interior = uniq < t
    if np.any(interior):
        vals = analytic.sojourn_cdf_grid(uniq[interior], t, params, inverter, ctrl)
        model[interior] = vals
        model_left[interior] = vals  # continuous below the atom
    at_atom = ~interior
    model[at_atom] = 1.0
    model_left[at_atom] = 1.0 - math.exp(-b * t)

    ks = float(
        np.max(np.maximum(np.abs(emp_hi - model), np.abs(emp_lo - model_left)))
    )
    return {
        "ks_distance": ks,
        "critical_1pct": ks_critical_value(n, 0.01),
        "n": n,
        "t": float(t),
    }


def first_return_cdf_model(
    params: ModelParams,
    ts: Sequence[float],
    method=None,
) -> np.ndarray:
    """First-return CDF by inverting fhat(s)/s pointwise (model side of KS)."""
    if method is None:
        method = laplace.InversionMethod(kind=laplace.KIND_TALBOT, order=24)

    def transform(s):
        return laplace.f_hat_any(s, params) / s

    out = np.empty(len(ts))
    for i, t in enumerate(ts):
        rep = laplace.invert(transform, float(t), method)
        out[i] = min(1.0, max(0.0, rep.value))
    return out
