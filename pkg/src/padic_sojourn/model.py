"""Model parameters, derived constants, and the exact norm-chain reduction.

A walker on the p-adic line jumps with kernel density C / |x-y|^(alpha+1)
(C > 0 chosen so the generator matches the standard fractional operator of
order alpha).  The indicator "walker inside the unit ball" depends only on
the integer norm level

    k = 0            if |x|_p <= 1,
    k = log_p |x|_p  otherwise,

and by ultrametricity the jump rate between levels does not depend on the
representative point, so the level process is itself a continuous-time Markov
chain.  build_generator() materialises its rate matrix on levels 0..K with
all mass above K folded into level K.

Closed-form rates (k, m are levels, m != k):

    rate(0 -> m)         = C (1 - 1/p) p^(-alpha m),          m >= 1
    rate(k -> m), m > k  = C (1 - 1/p) p^(-alpha m)
    rate(k -> 0), k >= 1 = C p^(-k (alpha + 1))
    rate(k -> m), 1 <= m < k = C p^(-k (alpha + 1)) (1 - 1/p) p^m

The total exit rate from level 0 equals the sojourn-rate constant

    B = (1 - 1/p) / (1 - p^(-alpha - 1))

which also equals the exit rate from level 1; exit rates decay like
p^(-alpha (k - 1)) above that, which is why deep excursions are long.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = [
    "ModelParams",
    "DerivedConstants",
    "NormChainGenerator",
    "derive_constants",
    "build_generator",
]

# Two algebraic routes to B must agree to this relative tolerance; a failure
# means the constant formulas were edited inconsistently.
_B_CROSSCHECK_RTOL = 1e-12


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class ModelParams:
    """Kernel parameters: prime p >= 2 and exponent alpha > 0."""

    p: int
    alpha: float

    def __post_init__(self) -> None:
        if not isinstance(self.p, int) or isinstance(self.p, bool):
            raise ValueError(f"p must be an int, got {self.p!r}")
        if not _is_prime(self.p):
            raise ValueError(f"p must be prime, got {self.p}")
        alpha = float(self.alpha)
        if not math.isfinite(alpha) or alpha <= 0.0:
            raise ValueError(f"alpha must be finite and > 0, got {self.alpha!r}")
        object.__setattr__(self, "alpha", alpha)

    @property
    def ln_p(self) -> float:
        return math.log(self.p)


@dataclass(frozen=True)
class DerivedConstants:
    """Constants derived from (p, alpha).

    gamma_p_neg_alpha : value of the p-adic gamma factor at -alpha; negative
        for every valid (p, alpha).
    kernel_scale : C = -1 / gamma_p_neg_alpha, the kernel normalisation.
    b_alpha : exit rate of the unit ball (level 0), also the rate of the
        exponential sojourn clock.
    c_alpha : return probability of an excursion; only defined for alpha < 1
        (None otherwise; returns are certain for alpha >= 1).
    tail_gamma : first-return tail exponent (alpha - 1)/alpha; only defined
        for alpha > 1 (None otherwise).
    """

    gamma_p_neg_alpha: float
    kernel_scale: float
    b_alpha: float
    c_alpha: Optional[float]
    tail_gamma: Optional[float]


def derive_constants(params: ModelParams) -> DerivedConstants:
    p = float(params.p)
    alpha = params.alpha

    gamma = (1.0 - p ** (-alpha - 1.0)) / (1.0 - p**alpha)
    kernel_scale = -1.0 / gamma
    b_alpha = (1.0 - 1.0 / p) / (1.0 - p ** (-alpha - 1.0))

    # Independent route: total kernel mass outside the unit ball.
    b_geom = kernel_scale * (1.0 - 1.0 / p) * p ** (-alpha) / (1.0 - p ** (-alpha))
    if abs(b_geom - b_alpha) > _B_CROSSCHECK_RTOL * abs(b_alpha):
        raise AssertionError(
            f"b_alpha cross-check failed: {b_alpha!r} vs {b_geom!r}"
        )

    c_alpha = None
    if alpha < 1.0:
        c_alpha = (p / p**alpha) * ((p**alpha - 1.0) / (p - 1.0)) ** 2

    tail_gamma = None
    if alpha > 1.0:
        tail_gamma = (alpha - 1.0) / alpha

    return DerivedConstants(
        gamma_p_neg_alpha=gamma,
        kernel_scale=kernel_scale,
        b_alpha=b_alpha,
        c_alpha=c_alpha,
        tail_gamma=tail_gamma,
    )


@dataclass(frozen=True)
class NormChainGenerator:
    """Rate matrix of the level chain on states 0..max_level.

    rows[k, m] is the jump rate k -> m for m != k; rows[k, k] is minus the
    exit rate, so every row sums to zero.  Upward mass that would land above
    max_level is folded into the max_level column; row max_level itself has
    no upward part.
    """

    params: ModelParams
    max_level: int
    rows: np.ndarray

    @property
    def exit_rates(self) -> np.ndarray:
        return -np.diag(self.rows)

    def jump_probabilities(self, k: int) -> np.ndarray:
        """Embedded-chain distribution of the next level after leaving k."""
        row = self.rows[k].copy()
        row[k] = 0.0
        total = row.sum()
        if total <= 0.0:
            raise ValueError(f"level {k} has no outgoing rate")
        return row / total


def build_generator(params: ModelParams, max_level: int) -> NormChainGenerator:
    """Materialise the level-chain rate matrix on 0..max_level.

    max_level must be >= 1.  Rates are computed in log space so large alpha
    (deep sub-unit rates ~ p^(-alpha k)) underflows to zero instead of
    overflowing anywhere.
    """
    if not isinstance(max_level, int) or max_level < 1:
        raise ValueError(f"max_level must be an int >= 1, got {max_level!r}")

    p = float(params.p)
    alpha = params.alpha
    ln_p = math.log(p)
    consts = derive_constants(params)
    ln_c = math.log(consts.kernel_scale)
    one_minus = 1.0 - 1.0 / p

    K = max_level
    rows = np.zeros((K + 1, K + 1), dtype=np.float64)

    # Upward rates depend only on the target level; the clipped column K
    # absorbs the whole geometric tail sum_{m >= K} C (1-1/p) p^(-alpha m).
    up = np.zeros(K + 1)
    for m in range(1, K + 1):
        up[m] = one_minus * math.exp(ln_c - alpha * m * ln_p)
    up[K] = up[K] / (1.0 - p ** (-alpha)) if up[K] > 0.0 else 0.0

    for k in range(K + 1):
        if k < K:
            rows[k, k + 1 :] = up[k + 1 :]
        if k >= 1:
            # Everything below level k sits at ultrametric distance p^k.
            base = math.exp(ln_c - k * (alpha + 1.0) * ln_p)
            rows[k, 0] = base
            for m in range(1, k):
                rows[k, m] = base * one_minus * p**m
        rows[k, k] = -(rows[k].sum() - rows[k, k])

    return NormChainGenerator(params=params, max_level=K, rows=rows)
