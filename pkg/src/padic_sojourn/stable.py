"""One-sided stable law of index gamma in (0, 1): density and CDF, two routes.

Series route, convergent for every argument > 0 (expansion from infinity):

    f_g(t) = (1/pi) sum_{n>=1} (-1)^(n+1) a^n sin(n pi g) Gamma(n g + 1) t^(-n g - 1) / n!
    S_g(y) = (1/pi) sum_{n>=1} (-1)^(n+1) a^n sin(n pi g) Gamma(n g) y^(-n g) / n!

with a = Gamma(1 - g) and CDF F_g = 1 - S_g.  The term magnitudes are
unimodal in n; at small argument the peak term dwarfs the sum (e.g. ~e^146
at g = 0.75, t = 0.5), so the summation precision is chosen from a Stirling
scan of the peak: float64 when the peak cannot hurt the target accuracy,
mpmath with peak-proportional digits otherwise.

Quadrature route, from exp(-a s^g) with the Bromwich ray rotated onto the
real axis.  The full rotation (by pi) gives

    f_g(t) = (1/pi) int_0^inf e^(-k t) e^(-a cos(pi g) k^g) sin(a sin(pi g) k^g) dk

which is only usable for g <= 1/2: cos(pi g) < 0 for g > 1/2 turns the
envelope into exponential growth.  For g > 1/2 the half rotation (by pi/2)

    f_g(t) = (1/pi) int_0^inf e^(-a cos(pi g/2) k^g) cos(k t - a sin(pi g/2) k^g) dk

keeps a decaying envelope for every g in (0, 1); the price is an oscillatory
but absolutely integrable integrand.  At g = 1/2 both reduce to the Levy
density (1/2) t^(-3/2) exp(-pi/(4 t)).
"""

from __future__ import annotations

import math

import mpmath as mp
import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln

from .errors import QuadratureError, SeriesError

__all__ = [
    "stable_density_series",
    "stable_density_quadrature",
    "stable_cdf",
    "SERIES_EPS",
]

# The series route refuses arguments below this (small-argument regime is
# served by quadrature); override per call if needed.
SERIES_EPS = 0.5

# float64 summation allowed only if peak_term * eps_double * slack < target
_FLOAT64_PEAK_CEILING = 2.0e4


def _check_gamma(gamma: float) -> None:
    if not (0.0 < gamma < 1.0):
        raise ValueError(f"gamma must be in (0, 1), got {gamma!r}")


def _left_tail_log_bound(y: float, gamma: float) -> float:
    """Chernoff bound: log F_g(y) <= -(1/g - 1) (a g)^(1/(1-g)) y^(-g/(1-g)).

    Tight in the exponent (at g = 1/2 it reproduces the Levy erfc exponent
    pi/(4y) exactly), so cutting the series off where this is below log(1e-24)
    only discards mass invisible at double precision.
    """
    a = math.gamma(1.0 - gamma)
    expo = 1.0 / (1.0 - gamma)
    return -(1.0 / gamma - 1.0) * (a * gamma) ** expo * y ** (-gamma * expo)


def _log_term_magnitude(n: float, x: float, gamma: float, cdf: bool) -> float:
    """log of the unsigned n-th series term (sin factor bounded by 1)."""
    a_log = gammaln(1.0 - gamma)
    g_arg = n * gamma if cdf else n * gamma + 1.0
    power = n * gamma if cdf else n * gamma + 1.0
    return float(n * a_log + gammaln(g_arg) - gammaln(n + 1.0) - power * math.log(x))


def _scan_peak(x: float, gamma: float, cdf: bool, max_terms: int) -> float:
    """Largest log term magnitude over n >= 1 (unimodal; coarse-to-fine scan)."""
    best = _log_term_magnitude(1, x, gamma, cdf)
    n = 1
    step = 1
    prev = best
    while n < max_terms:
        n += step
        cur = _log_term_magnitude(n, x, gamma, cdf)
        best = max(best, cur)
        if cur < prev - 2.0 and cur < best - 10.0:
            break
        prev = cur
        if n > 64:
            step = max(1, n // 16)
    return best


def _series_float(x: float, gamma: float, cdf: bool, abs_tol: float, max_terms: int) -> float:
    ln_a = gammaln(1.0 - gamma)
    ln_x = math.log(x)
    acc = 0.0
    small_run = 0
    for n in range(1, max_terms + 1):
        sinf = math.sin(math.pi * ((n * gamma) % 2.0))
        g_arg = n * gamma if cdf else n * gamma + 1.0
        power = n * gamma if cdf else n * gamma + 1.0
        logmag = n * ln_a + gammaln(g_arg) - gammaln(n + 1.0) - power * ln_x
        term = 0.0
        if sinf != 0.0:
            term = ((-1.0) ** (n + 1)) * sinf * math.exp(logmag)
        acc += term
        if math.exp(logmag) < 0.01 * abs_tol:
            small_run += 1
            if small_run >= 3:
                return acc / math.pi
        else:
            small_run = 0
    raise SeriesError(
        f"stable series did not meet its stop criterion in {max_terms} terms "
        f"(argument {x!r}, gamma {gamma!r})"
    )


def _series_mp(x: float, gamma: float, cdf: bool, abs_tol: float, max_terms: int, peak_log: float) -> float:
    # digits: enough that the peak term still carries ~25 guard digits
    dps = int(peak_log / math.log(10.0)) + 30
    with mp.workdps(dps):
        g = mp.mpf(gamma)
        xx = mp.mpf(x)
        a = mp.gamma(1 - g)
        acc = mp.mpf(0)
        tol = mp.mpf(abs_tol) / 100
        small_run = 0
        fact = mp.mpf(1)
        apow = mp.mpf(1)
        for n in range(1, max_terms + 1):
            fact *= n
            apow *= a
            sinf = mp.sinpi(n * g)
            if cdf:
                mag = apow * mp.gamma(n * g) * xx ** (-n * g) / fact
            else:
                mag = apow * mp.gamma(n * g + 1) * xx ** (-n * g - 1) / fact
            acc += (-1) ** (n + 1) * sinf * mag
            if abs(mag) < tol:
                small_run += 1
                if small_run >= 3:
                    return float(acc / mp.pi)
            else:
                small_run = 0
    raise SeriesError(
        f"stable series (extended precision) did not converge in {max_terms} terms "
        f"(argument {x!r}, gamma {gamma!r})"
    )


def _series_eval(x: float, gamma: float, cdf: bool, ctrl) -> float:
    from .analytic import DEFAULT_CTRL  # deferred: analytic re-exports this module

    ctrl = ctrl or DEFAULT_CTRL
    max_terms = max(ctrl.max_terms, 200)
    peak = _scan_peak(x, gamma, cdf, 200000)
    if math.exp(min(peak, 700.0)) <= _FLOAT64_PEAK_CEILING:
        return _series_float(x, gamma, cdf, ctrl.abs_tol, max_terms)
    if peak > 6000.0:
        # would need thousands of working digits; no call site is served
        # at such cost (gamma near 1 or argument far into the left tail)
        raise SeriesError(
            f"stable series peak term exp({peak:.0f}) beyond practical precision "
            f"(argument {x!r}, gamma {gamma!r})"
        )
    return _series_mp(x, gamma, cdf, ctrl.abs_tol, max(max_terms, 200000), peak)


def stable_density_series(t: float, gamma: float, ctrl=None, eps: float = SERIES_EPS) -> float:
    """Density by the large-argument series; refuses t < eps (use quadrature there)."""
    _check_gamma(gamma)
    if not (t >= eps):
        raise ValueError(f"series route needs t >= {eps!r}, got {t!r}")
    val = _series_eval(t, gamma, False, ctrl)
    return max(0.0, val)


def stable_density_quadrature(
    t: float,
    gamma: float,
    epsabs: float = 1e-12,
    epsrel: float = 1e-11,
) -> float:
    """Density by contour quadrature; valid on all t > 0."""
    _check_gamma(gamma)
    if not (t > 0):
        raise ValueError(f"t must be > 0, got {t!r}")
    a = math.gamma(1.0 - gamma)

    if gamma <= 0.5:
        decay = a * math.cos(math.pi * gamma)
        wobble = a * math.sin(math.pi * gamma)

        def integrand(k: float) -> float:
            kg = k**gamma
            return math.exp(-k * t - decay * kg) * math.sin(wobble * kg)

    else:
        decay = a * math.cos(0.5 * math.pi * gamma)
        wobble = a * math.sin(0.5 * math.pi * gamma)

        def integrand(k: float) -> float:
            kg = k**gamma
            return math.exp(-decay * kg) * math.cos(k * t - wobble * kg)

    val, abserr, info, *tail = quad(
        integrand, 0.0, np.inf, epsabs=epsabs, epsrel=epsrel, limit=800, full_output=1
    )
    if tail:  # quad appended an explanation message: refinement trouble
        raise QuadratureError(f"stable density quadrature failed at t={t!r}: {tail[0]}")
    if abserr > 100.0 * max(epsabs, epsrel * abs(val)):
        raise QuadratureError(
            f"stable density quadrature error {abserr:.3e} too large at t={t!r}"
        )
    return max(0.0, val / math.pi)


def stable_cdf(y: float, gamma: float, ctrl=None) -> float:
    """Distribution function F_gamma(y); series with adaptive precision.

    Converges for every y > 0; deep in the left tail the result underflows
    to 0.0, which is exact to double precision.
    """
    _check_gamma(gamma)
    if y <= 0.0:
        return 0.0
    if _left_tail_log_bound(y, gamma) < -55.0:
        return 0.0
    s = _series_eval(y, gamma, True, ctrl)
    return min(1.0, max(0.0, 1.0 - s))
