"""Closed-form and series evaluators for the level-chain sojourn theory.

Everything here is an explicit series in n over the level ladder, cut off by
a certified geometric tail bound:

    J(t)      = (1-1/p) sum_n p^(-n) exp(-p^(-alpha n) t)      ball survival
    Jhat(s)   = (1-1/p) sum_n p^(-n) / (s + p^(-alpha n))      its transform
    v(t)      = J'(t) + B J(t)                                 re-entry flux
    <theta>(t)= (1-1/p) sum_n p^((alpha-1) n) (1 - exp(-p^(-alpha n) t))

plus the first-return transform fhat, the excursion-cycle transform hhat and
its powers, Erlang CDFs of the level-0 clock, and the sojourn-time CDF
assembled from the alternating-renewal mixture

    Phi(theta, t) = 1 - sum_n H_n(t - theta) * pois(n; B theta)

where H_n is inverted numerically (module laplace) from hhat(s)^n / s.

Transform evaluators accept complex s so deformed-contour inversion can call
them; real arguments are validated against the documented domains.  The
poles of Jhat lie on the negative real axis in [-1, 0), so any s off that
ray is safe.

For |s| >= 1 the direct form of hhat, (s + B - 1/Jhat(s)) / B, loses digits
to cancellation (the numerator is O(1/s) while the terms are O(s)).  The
equivalent pole-sum form used instead is built from

    R(s) = (1-1/p) sum_n p^(-n(alpha+1)) / (s + p^(-alpha n))   (= 1 - s Jhat)
    Q(s) = (1-1/p) sum_n p^(-n(2 alpha+1)) / (s + p^(-alpha n)) (= B - s R)

    hhat = (Q - B R) / (B (1 - R)),    fhat = B hhat / (s + B)

whose numerator Q - B R tends to (E[X^2] - E[X]^2)/s > 0 with no growing
cancellation.  R(0) = 1 makes that form 0/0 at the origin, hence the |s| < 1
switch back to the direct form (and exact values at s = 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc, gammaln

from .errors import InversionError, SeriesError
from .model import ModelParams, derive_constants

__all__ = [
    "SeriesControl",
    "TransformPoint",
    "DEFAULT_CTRL",
    "survival_j",
    "j_hat",
    "f_hat",
    "h_n_hat",
    "v_rate",
    "mean_sojourn",
    "g_n_cdf",
    "poisson_weight",
    "poisson_cutoff",
    "sojourn_cdf",
    "sojourn_cdf_grid",
    "complement_sojourn_cdf",
    "stable_density_series",
    "stable_density_quadrature",
    "stable_cdf",
]


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy: absolute and relative tail targets plus a hard cap."""

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_terms: int = 4000

    def __post_init__(self) -> None:
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("abs_tol and rel_tol must be positive")
        if self.max_terms < 8:
            raise ValueError("max_terms must be >= 8")


@dataclass(frozen=True)
class TransformPoint:
    """A Laplace-domain sample (s, value), s restricted to the open right axis."""

    s: float
    value: float

    def __post_init__(self) -> None:
        if not (self.s > 0):
            raise ValueError(f"s must be > 0, got {self.s!r}")


DEFAULT_CTRL = SeriesControl()

# Accuracy gate for sojourn_cdf: limited by inversion, not series tails.
_CDF_CTRL = SeriesControl(abs_tol=1e-5, rel_tol=1e-5, max_terms=4000)


def _tol(ctrl: SeriesControl, acc: float) -> float:
    return max(ctrl.abs_tol, ctrl.rel_tol * abs(acc))


def _s_floor(s: complex) -> float:
    """Lower bound for |s + x| over x in (0, 1]; 0 means s is in/near the pole set."""
    re, im = s.real, s.imag
    if re > 0.0:
        return max(re, abs(im))
    return abs(im)


def survival_j(t: float, params: ModelParams, ctrl: SeriesControl = DEFAULT_CTRL) -> float:
    """Probability the walker started uniform in the unit ball is inside it at t."""
    ctrl = ctrl or DEFAULT_CTRL
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t!r}")
    p = float(params.p)
    alpha = params.alpha
    om = 1.0 - 1.0 / p
    acc = 0.0
    pn = 1.0
    for n in range(ctrl.max_terms):
        rate = math.exp(-alpha * n * math.log(p))
        acc += om * pn * math.exp(-rate * t)
        pn /= p
        if pn < _tol(ctrl, acc):  # remaining tail <= pn
            return acc
    raise SeriesError(f"survival series did not converge in {ctrl.max_terms} terms")


def j_hat(s, params: ModelParams, ctrl: SeriesControl = DEFAULT_CTRL):
    """Laplace transform of survival_j; accepts complex s off the pole ray."""
    ctrl = ctrl or DEFAULT_CTRL
    sc = complex(s)
    floor = _s_floor(sc)
    if floor <= 0.0:
        raise ValueError(f"s must have positive real part or nonzero imaginary part, got {s!r}")
    p = float(params.p)
    alpha = params.alpha
    om = 1.0 - 1.0 / p
    acc = 0.0 + 0.0j
    pn = 1.0
    for n in range(ctrl.max_terms):
        rate = math.exp(-alpha * n * math.log(p))
        acc += om * pn / (sc + rate)
        pn /= p
        if pn / floor < _tol(ctrl, abs(acc)):
            return acc.real if isinstance(s, (int, float)) else acc
    raise SeriesError(f"transform series did not converge in {ctrl.max_terms} terms")


def _r_q(sc: complex, params: ModelParams, ctrl: SeriesControl):
    """Pole sums R(s), Q(s); valid wherever j_hat is, best for |s| >= 1."""
    floor = _s_floor(sc)
    if floor <= 0.0:
        raise ValueError(f"s must be off the negative real axis, got {sc!r}")
    p = float(params.p)
    alpha = params.alpha
    om = 1.0 - 1.0 / p
    b = derive_constants(params).b_alpha
    wr = 1.0  # p^(-n(alpha+1))
    wq = 1.0  # p^(-n(2 alpha+1))
    fr = p ** (-(alpha + 1.0))
    fq = p ** (-(2.0 * alpha + 1.0))
    r = 0.0 + 0.0j
    q = 0.0 + 0.0j
    for n in range(ctrl.max_terms):
        rate = math.exp(-alpha * n * math.log(p))
        den = sc + rate
        r += om * wr / den
        q += om * wq / den
        wr *= fr
        wq *= fq
        # tail of R dominates: sum_{m>n} om*wr/floor = b * wr / floor
        if b * wr / floor < _tol(ctrl, abs(r)):
            return r, q
    raise SeriesError(f"pole-sum series did not converge in {ctrl.max_terms} terms")


def _h1(sc: complex, params: ModelParams, ctrl: SeriesControl) -> complex:
    """One-cycle transform hhat(s) with the cancellation-aware form switch."""
    consts = derive_constants(params)
    b = consts.b_alpha
    if sc == 0:
        return complex(consts.c_alpha if params.alpha < 1.0 else 1.0)
    if abs(sc) >= 1.0:
        r, q = _r_q(sc, params, ctrl)
        return (q - b * r) / (b * (1.0 - r))
    jh = j_hat(complex(sc), params, ctrl)
    return (sc + b - 1.0 / jh) / b


def f_hat(s, params: ModelParams, ctrl: SeriesControl = DEFAULT_CTRL):
    """First-return-time transform; equals 1 at s=0 iff returns are certain."""
    ctrl = ctrl or DEFAULT_CTRL
    sc = complex(s)
    real_input = isinstance(s, (int, float))
    if real_input and s < 0:
        raise ValueError(f"s must be >= 0, got {s!r}")
    consts = derive_constants(params)
    if sc == 0:
        val = consts.c_alpha if params.alpha < 1.0 else 1.0
        return float(val)
    b = consts.b_alpha
    val = b * _h1(sc, params, ctrl) / (sc + b)
    if real_input:
        # clamp last-ulp excursions outside the probability range
        return min(1.0, max(0.0, val.real))
    return val


def h_n_hat(s, n: int, params: ModelParams, ctrl: SeriesControl = DEFAULT_CTRL):
    """n-fold excursion-cycle transform, exactly hhat(s)**n; n=0 gives 1."""
    ctrl = ctrl or DEFAULT_CTRL
    if not isinstance(n, int) or n < 0:
        raise ValueError(f"n must be an integer >= 0, got {n!r}")
    real_input = isinstance(s, (int, float))
    if real_input and s < 0:
        raise ValueError(f"s must be >= 0, got {s!r}")
    if n == 0:
        return 1.0 if real_input else 1.0 + 0.0j
    h1 = _h1(complex(s), params, ctrl)
    val = h1**n
    if real_input:
        return min(1.0, max(0.0, val.real))
    return val


def v_rate(t: float, params: ModelParams, ctrl: SeriesControl = DEFAULT_CTRL) -> float:
    """Re-entry flux v(t) = J'(t) + B J(t); vanishes at t=0, nonnegative after."""
    ctrl = ctrl or DEFAULT_CTRL
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t!r}")
    p = float(params.p)
    alpha = params.alpha
    b = derive_constants(params).b_alpha
    om = 1.0 - 1.0 / p
    bound = max(b, 1.0)
    acc = 0.0
    pn = 1.0
    for n in range(ctrl.max_terms):
        rate = math.exp(-alpha * n * math.log(p))
        acc += om * pn * (b - rate) * math.exp(-rate * t)
        pn /= p
        if pn * bound < _tol(ctrl, acc):
            if acc < -1000.0 * ctrl.abs_tol:
                raise SeriesError(f"re-entry flux came out negative: {acc!r} at t={t!r}")
            return max(0.0, acc)
    raise SeriesError(f"flux series did not converge in {ctrl.max_terms} terms")


def mean_sojourn(t: float, params: ModelParams, ctrl: SeriesControl = DEFAULT_CTRL) -> float:
    """Mean occupation time of the unit ball on [0, t] (the integral of survival_j)."""
    ctrl = ctrl or DEFAULT_CTRL
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t!r}")
    p = float(params.p)
    alpha = params.alpha
    om = 1.0 - 1.0 / p
    acc = 0.0
    pn = 1.0  # p^((alpha-1) n)
    grow = p ** (alpha - 1.0)
    for n in range(ctrl.max_terms):
        rate = math.exp(-alpha * n * math.log(p))
        acc += om * pn * (-math.expm1(-rate * t))
        pn *= grow
        # term_m <= om * p^(-m) * t for all m, so tail <= t * p^(-(n+1))
        if t * p ** (-(n + 1)) < _tol(ctrl, acc):
            return acc
    raise SeriesError(f"mean-sojourn series did not converge in {ctrl.max_terms} terms")


def g_n_cdf(t: float, n: int, params: ModelParams) -> float:
    """CDF of the sum of n independent level-0 holding clocks (Erlang, rate B)."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be an integer >= 1, got {n!r}")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t!r}")
    b = derive_constants(params).b_alpha
    return float(gammainc(n, b * t))


def poisson_weight(n: int, theta: float, params: ModelParams) -> float:
    """Poisson pmf at n with mean B*theta, the G_n - G_(n+1) difference in stable form."""
    if not isinstance(n, int) or n < 0:
        raise ValueError(f"n must be an integer >= 0, got {n!r}")
    if theta < 0:
        raise ValueError(f"theta must be >= 0, got {theta!r}")
    lam = derive_constants(params).b_alpha * theta
    if lam == 0.0:
        return 1.0 if n == 0 else 0.0
    return float(math.exp(n * math.log(lam) - lam - gammaln(n + 1)))


def poisson_cutoff(lam: float) -> int:
    """Term count keeping the Poisson tail far below every tolerance in use."""
    return int(math.ceil(lam + 10.0 * math.sqrt(lam + 1.0) + 20.0))


# ---------------------------------------------------------------------------
# Sojourn-time CDF (alternating-renewal mixture, inverted per time point)
# ---------------------------------------------------------------------------


def _h1_matrix(s: np.ndarray, params: ModelParams, ctrl: SeriesControl) -> np.ndarray:
    """Vectorised hhat over an array of transform nodes (real or complex)."""
    out = np.empty_like(s, dtype=s.dtype)
    consts = derive_constants(params)
    b = consts.b_alpha
    p = float(params.p)
    alpha = params.alpha
    om = 1.0 - 1.0 / p

    mags = np.abs(s)
    big = mags >= 1.0
    small = ~big

    def n_terms(ratio: float, floor: float, scale: float) -> int:
        # smallest n with scale * ratio^(n+1) / floor < abs_tol
        if floor <= 0.0:
            raise ValueError("transform node on the pole ray")
        n = int(math.ceil(math.log(ctrl.abs_tol * floor / scale) / math.log(ratio))) + 1
        return max(4, min(ctrl.max_terms, n))

    floors = np.where(
        np.real(s) > 0,
        np.maximum(np.real(s), np.abs(np.imag(s))),
        np.abs(np.imag(s)),
    ).astype(float)

    if np.any(big):
        sb = s[big]
        fl = float(np.min(floors[big]))
        nn = n_terms(p ** (-(alpha + 1.0)), fl, b)
        r = np.zeros_like(sb)
        q = np.zeros_like(sb)
        wr = 1.0
        wq = 1.0
        for n in range(nn):
            rate = math.exp(-alpha * n * math.log(p))
            den = sb + rate
            r += om * wr / den
            q += om * wq / den
            wr *= p ** (-(alpha + 1.0))
            wq *= p ** (-(2.0 * alpha + 1.0))
        out[big] = (q - b * r) / (b * (1.0 - r))

    if np.any(small):
        ss = s[small]
        fl = float(np.min(floors[small]))
        nn = n_terms(1.0 / p, fl, 1.0)
        jh = np.zeros_like(ss)
        pn = 1.0
        for n in range(nn):
            rate = math.exp(-alpha * n * math.log(p))
            jh += om * pn / (ss + rate)
            pn /= p
        out[small] = (ss + b - 1.0 / jh) / b
    return out


def _poisson_matrix(lam: np.ndarray, nmax: int) -> np.ndarray:
    """pois(n; lam_i) for n = 0..nmax by upward recurrence, rows sum to ~1."""
    w = np.empty((lam.size, nmax + 1))
    w[:, 0] = np.exp(-lam)
    for n in range(1, nmax + 1):
        w[:, n] = w[:, n - 1] * lam / n
    return w


def _takacs_mixture(
    u: np.ndarray,
    lam: np.ndarray,
    params: ModelParams,
    inverter,
    ctrl: SeriesControl,
) -> np.ndarray:
    """Invert sum_n pois(n; lam) hhat(s)^n / s at times u (shared node algebra).

    u must be strictly positive.  Returns the mixture value per (u, lam) pair
    together with a successive-order accuracy gate; raises InversionError when
    the gate exceeds ctrl tolerances.
    """
    from . import laplace  # deferred, laplace imports this module

    if inverter is None:
        inverter = laplace.InversionMethod(kind=laplace.KIND_TALBOT, order=24)
    # The inverter amplifies transform noise (Stehfest weights reach 1e7),
    # so the series layer always runs near machine precision; the caller's
    # ctrl gates only the inversion self-check.
    node_ctrl = SeriesControl(abs_tol=1e-13, rel_tol=1e-13, max_terms=ctrl.max_terms)
    nmax = poisson_cutoff(float(np.max(lam)))
    w = _poisson_matrix(lam, nmax)

    def mixture_at(order: int) -> np.ndarray:
        if inverter.kind == laplace.KIND_GS:
            weights = np.asarray(laplace._stehfest_floats(order))
            k = np.arange(1, order + 1)
            s = (math.log(2.0) / u)[:, None] * k[None, :]
            h1 = _h1_matrix(s, params, node_ctrl)
            acc = np.zeros_like(s)
            hpow = np.ones_like(s)
            for n in range(nmax + 1):
                acc += w[:, n][:, None] * hpow
                hpow *= h1
            vals = acc / s
            return (math.log(2.0) / u) * (vals @ weights)
        nodes, coeffs, r = laplace.talbot_nodes(order, u)
        h1 = _h1_matrix(nodes, params, node_ctrl)
        acc = np.zeros_like(nodes)
        hpow = np.ones_like(nodes)
        for n in range(nmax + 1):
            acc += w[:, n][:, None] * hpow
            hpow *= h1
        vals = acc / nodes
        return np.real(np.sum(vals * coeffs, axis=1)) * (r / order)

    hi = mixture_at(inverter.order)
    lo = mixture_at(inverter.order - 2)
    gate = float(np.max(np.abs(hi - lo)))
    if gate > max(ctrl.abs_tol, ctrl.rel_tol):
        raise InversionError(
            f"sojourn-CDF inversion self-check {gate:.3e} exceeds tolerance "
            f"{max(ctrl.abs_tol, ctrl.rel_tol):.3e}"
        )
    return hi


def sojourn_cdf_grid(
    thetas: np.ndarray,
    t: float,
    params: ModelParams,
    inverter=None,
    ctrl: SeriesControl = _CDF_CTRL,
) -> np.ndarray:
    """Sojourn-time CDF at many theta for one horizon t (vectorised).

    Values at theta == t are exactly 1 (the distribution carries an atom of
    mass exp(-B t) there, the never-left event); elsewhere the mixture series
    is inverted at u = t - theta with nodes shared across the grid.
    """
    ctrl = ctrl or _CDF_CTRL
    thetas = np.asarray(thetas, dtype=float)
    if np.any(thetas < 0) or np.any(thetas > t):
        raise ValueError("thetas must lie in [0, t]")
    if t <= 0:
        raise ValueError(f"t must be > 0, got {t!r}")
    b = derive_constants(params).b_alpha
    out = np.ones(thetas.shape)
    inner = thetas < t
    if np.any(inner):
        th = thetas[inner]
        u = t - th
        lam = b * th
        out[inner] = 1.0 - _takacs_mixture(u, lam, params, inverter, ctrl)
    return np.clip(out, 0.0, 1.0)


def sojourn_cdf(
    theta: float,
    t: float,
    params: ModelParams,
    inverter=None,
    ctrl: SeriesControl = _CDF_CTRL,
) -> float:
    """P(occupation time of the unit ball on [0,t] <= theta)."""
    if not (0.0 <= theta <= t):
        raise ValueError(f"need 0 <= theta <= t, got theta={theta!r}, t={t!r}")
    return float(sojourn_cdf_grid(np.array([theta]), t, params, inverter, ctrl)[0])


def complement_sojourn_cdf(
    theta: float,
    t: float,
    params: ModelParams,
    inverter=None,
    ctrl: SeriesControl = _CDF_CTRL,
) -> float:
    """CDF of the time spent outside the unit ball on [0, t].

    Evaluated from its own mixture (excursion clocks at theta, level-0 clocks
    at t - theta); the sojourn CDF equals 1 minus this at swapped argument,
    up to the boundary atoms.
    """
    ctrl = ctrl or _CDF_CTRL
    if not (0.0 <= theta <= t):
        raise ValueError(f"need 0 <= theta <= t, got theta={theta!r}, t={t!r}")
    if theta >= t:
        return 1.0
    b = derive_constants(params).b_alpha
    if theta == 0.0:
        return float(math.exp(-b * t))
    u = np.array([theta])
    lam = np.array([b * (t - theta)])
    return float(np.clip(_takacs_mixture(u, lam, params, inverter, ctrl)[0], 0.0, 1.0))


# Re-exported here because the one-sided stable law is part of this module's
# public evaluation surface (dual routes live in stable.py).
from .stable import stable_cdf, stable_density_quadrature, stable_density_series  # noqa: E402
