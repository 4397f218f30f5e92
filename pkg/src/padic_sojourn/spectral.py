"""Subordinated spectral-diffusion model: hole widths from occupation moments.

A self-similar frequency process with variance law D * theta^(2h) is run on
the random clock theta(t), the occupation time of the unit ball.  The hole
width is then sigma(t) = sqrt(D * <theta^(2h)(t)>), so everything reduces to
fractional occupation moments of the simulated walk: no frequency path is
ever sampled.  Ageing variants replace theta(t) by the increment
theta(t_a + t) - theta(t_a).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import simulate
from .errors import FitError
from .experiments import (
    DEFAULT_MAX_LEVEL,
    PowerLawFit,
    estimate_from_samples,
    fit_power_law,
)
from .model import ModelParams, build_generator

__all__ = [
    "SpectralParams",
    "WidthTable",
    "hole_width",
    "ageing_width",
    "width_exponent",
    "ageing_exponent",
    "exponent_report",
    "fit_width_slope",
    "fit_ageing_slope",
]


@dataclass(frozen=True)
class SpectralParams:
    """Frequency-process parameters on top of a walk parameter set.

    h is the self-similarity exponent of the frequency process, D its
    variance scale (frequency^2 per time^(2h)).
    """

    h: float
    d: float
    model: ModelParams

    def __post_init__(self) -> None:
        if not (0.0 < self.h < 1.0):
            raise ValueError(f"h must be in (0, 1), got {self.h!r}")
        if not self.d > 0.0:
            raise ValueError(f"D must be positive, got {self.d!r}")
        a = self.model.alpha
        # sigma^2 tracks the fractional moment at beta = 2h; the clean
        # power-law regime needs 2h below the moment-regime boundary.
        if a <= 1.0:
            warnings.warn(
                f"alpha={a}: width scaling theory assumes alpha > 1",
                stacklevel=2,
            )
        elif 2.0 * self.h >= a / (a - 1.0):
            warnings.warn(
                f"2h={2 * self.h:.3f} >= alpha/(alpha-1)={a / (a - 1.0):.3f}: "
                "width exponent leaves the clean scaling regime",
                stacklevel=2,
            )


@dataclass(frozen=True)
class WidthTable:
    """Hole widths on a grid: rows (t, t_a, sigma, stderr, n).

    t_a = 0 marks the non-ageing case.  Rows are kept sorted by (t_a, t)
    and sigma is nonnegative by construction.
    """

    t: np.ndarray
    t_a: np.ndarray
    sigma: np.ndarray
    stderr: np.ndarray
    n: np.ndarray

    def __post_init__(self) -> None:
        rows = len(self.t)
        for name in ("t_a", "sigma", "stderr", "n"):
            if len(getattr(self, name)) != rows:
                raise ValueError(f"column {name} has wrong length")
        if np.any(self.sigma < 0.0):
            raise ValueError("sigma must be nonnegative")
        order = np.lexsort((self.t, self.t_a))
        if not np.array_equal(order, np.arange(rows)):
            raise ValueError("rows must be sorted by (t_a, t)")

    def __len__(self) -> int:
        return len(self.t)


def _width_from_samples(increments: np.ndarray, h: float, d: float):
    """sigma = sqrt(D * mean(x^(2h))) with a delta-method standard error."""
    est = estimate_from_samples(increments ** (2.0 * h))
    if est.value <= 0.0:
        # no path touched the ball in the window; width is exactly zero
        return 0.0, 0.0, est
    sigma = math.sqrt(d * est.value)
    stderr = math.sqrt(d) * est.stderr / (2.0 * math.sqrt(est.value))
    return sigma, stderr, est


def hole_width(
    sp: SpectralParams,
    t_grid: Sequence[float],
    n_paths: int,
    seed: int,
    max_level: int = DEFAULT_MAX_LEVEL,
    threads: int = 1,
) -> WidthTable:
    """Width sigma(t) = sqrt(D <theta^(2h)(t)>) on a time grid.

    One ensemble runs to max(t_grid) with a checkpoint per grid time, so
    the sample of theta(t) at each t is identical to what a dedicated run
    with horizon t would produce (checkpoints are prefix-exact).
    """
    if n_paths < 10**3:
        raise ValueError("hole_width needs n_paths >= 1e3")
    t_grid = np.asarray(sorted(float(t) for t in t_grid))
    if t_grid.size < 1 or t_grid[0] <= 0.0:
        raise ValueError("t_grid must be nonempty and positive")
    gen = build_generator(sp.model, max_level)
    res = simulate.run_ensemble(
        gen,
        horizon=float(t_grid[-1]),
        n_paths=n_paths,
        seed=seed,
        checkpoints=t_grid,
        threads=threads,
    )
    sig = np.empty(t_grid.size)
    err = np.empty(t_grid.size)
    for j in range(t_grid.size):
        sig[j], err[j], _ = _width_from_samples(res.theta[:, j], sp.h, sp.d)
    return WidthTable(
        t=t_grid,
        t_a=np.zeros(t_grid.size),
        sigma=sig,
        stderr=err,
        n=np.full(t_grid.size, n_paths, dtype=np.int64),
    )


def ageing_width(
    sp: SpectralParams,
    t: float,
    t_a_grid: Sequence[float],
    n_paths: int,
    seed: int,
    max_level: int = DEFAULT_MAX_LEVEL,
    threads: int = 1,
) -> WidthTable:
    """Aged width sigma(t, t_a) from occupation increments over [t_a, t_a+t].

    A t_a of zero reproduces hole_width at t exactly (same seed, same
    draws).  All rows share one ensemble with checkpoints at every t_a and
    t_a + t.
    """
    if n_paths < 10**3:
        raise ValueError("ageing_width needs n_paths >= 1e3")
    if not t > 0.0:
        raise ValueError("t must be positive")
    t_a_grid = np.asarray(sorted(float(v) for v in t_a_grid))
    if t_a_grid.size < 1 or t_a_grid[0] < 0.0:
        raise ValueError("t_a values must be >= 0")
    cps = np.unique(np.concatenate([t_a_grid, t_a_grid + t]))
    cps = cps[cps > 0.0]
    gen = build_generator(sp.model, max_level)
    res = simulate.run_ensemble(
        gen,
        horizon=float(t_a_grid[-1] + t),
        n_paths=n_paths,
        seed=seed,
        checkpoints=cps,
        threads=threads,
    )
    col = {float(c): j for j, c in enumerate(cps)}
    sig = np.empty(t_a_grid.size)
    err = np.empty(t_a_grid.size)
    for i, ta in enumerate(t_a_grid):
        hi = res.theta[:, col[float(ta + t)]]
        lo = 0.0 if ta == 0.0 else res.theta[:, col[float(ta)]]
        sig[i], err[i], _ = _width_from_samples(hi - lo, sp.h, sp.d)
    return WidthTable(
        t=np.full(t_a_grid.size, float(t)),
        t_a=t_a_grid,
        sigma=sig,
        stderr=err,
        n=np.full(t_a_grid.size, n_paths, dtype=np.int64),
    )


def width_exponent(alpha: float, h: float) -> float:
    """Predicted log-log slope of sigma(t): (alpha - 1) h / alpha."""
    if not alpha > 1.0:
        raise ValueError("width exponent prediction requires alpha > 1")
    return (alpha - 1.0) * h / alpha


def ageing_exponent(alpha: float, h: float) -> float:
    """Predicted magnitude of the ageing slope: sigma(t, t_a) ~ t_a^(-h/alpha)."""
    if not alpha > 1.0:
        raise ValueError("ageing exponent prediction requires alpha > 1")
    return h / alpha


def exponent_report(b_obs: float, c_obs: float, h: float = None) -> dict:
    """Infer alpha from measured width/ageing exponents b and c.

    The two predicted exponents share the factor h, so their ratio pins
    alpha = b / c.  When h is given, the report also evaluates both
    predictions at the inferred alpha.
    """
    if not (b_obs > 0.0 and c_obs > 0.0):
        raise ValueError("b_obs and c_obs must be positive")
    alpha = b_obs / c_obs
    out = {"alpha_inferred": alpha}
    if h is not None:
        out["b_pred"] = width_exponent(alpha, h)
        out["c_pred"] = ageing_exponent(alpha, h)
    return out


def fit_width_slope(table: WidthTable) -> PowerLawFit:
    """Power-law fit of sigma against t over the non-ageing rows."""
    keep = table.t_a == 0.0
    if np.count_nonzero(keep) < 5:
        raise FitError("need >= 5 non-ageing rows to fit sigma(t)")
    return fit_power_law(table.t[keep], table.sigma[keep])


def fit_ageing_slope(table: WidthTable) -> PowerLawFit:
    """Power-law fit of sigma against t_a over the aged rows."""
    keep = table.t_a > 0.0
    if np.count_nonzero(keep) < 5:
        raise FitError("need >= 5 aged rows to fit sigma(t_a)")
    return fit_power_law(table.t_a[keep], table.sigma[keep])
