"""Event-driven exact simulation of the level chain.

Each path is a continuous-time Markov chain on levels 0..K started at 0:
draw an exponential holding from the row's total exit rate, then the next
level from the row's normalized rates, repeat until the horizon.  One RNG
block (two uniforms) is consumed per event, so trajectories are pure
functions of (generator, horizon, seed, path index).

Levels whose exit rate underflows to zero (large alpha deep in the ladder)
are treated as absorbing: the path parks there until the horizon and no
randomness is consumed.

Time and occupation sums are Kahan-compensated; the running error stays at
one ulp over arbitrarily many events.  The complement occupation is defined
as horizon - sojourn, which makes the additivity identity exact by
construction (the two occupations are one number observed two ways).

The per-path kernel is compiled with numba when available; the identical
function body runs in pure Python otherwise, producing bit-identical output
(the RNG layer guarantees draw-for-draw equality).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from . import rng
from .model import ModelParams, NormChainGenerator

__all__ = [
    "Trajectory",
    "TrajectoryFunctionals",
    "EnsembleResult",
    "sample_path",
    "functionals",
    "sojourn_increment",
    "run_ensemble",
    "first_holdings",
]

MASK32 = rng.MASK32


@dataclass(frozen=True)
class Trajectory:
    """One realized path: dwell records (level, holding) from time 0.

    The final holding is recorded as drawn, so holdings sum to at least the
    horizon; functionals truncate it.  A holding of +inf marks an absorbing
    level (exit rate underflowed to zero).
    """

    params: ModelParams
    horizon: float
    events: Tuple[Tuple[int, float], ...]
    seed: int
    path_index: int = 0

    def __post_init__(self) -> None:
        if self.horizon < 0:
            raise ValueError("horizon must be >= 0")
        prev = None
        total = 0.0
        for level, holding in self.events:
            if level < 0:
                raise ValueError("negative level in trajectory")
            if not holding > 0:
                raise ValueError("holdings must be positive")
            if prev is not None and level == prev:
                raise ValueError("consecutive events at the same level")
            prev = level
            total += holding
        if self.events and total < self.horizon:
            raise ValueError("holdings do not cover the horizon")


@dataclass(frozen=True)
class TrajectoryFunctionals:
    """Occupation summaries of one path up to a query time t.

    sojourn + complement_sojourn = t exactly (complement is defined as the
    difference).  first_return is the end of the first completed excursion
    away from level 0, when that happened by t.
    """

    sojourn: float
    complement_sojourn: float
    first_return: Optional[float]
    returned: bool
    visits_to_zero: int


def _prepare_tables(gen: NormChainGenerator):
    """Total exit rates plus cumulative jump tables per level.

    Rows with nonpositive total rate get an empty jump table (absorbing).
    """
    K = gen.max_level
    rows = gen.rows
    total_rates = -np.diag(rows).copy()
    targets = np.zeros((K + 1, K), dtype=np.int64)
    cum_probs = np.ones((K + 1, K), dtype=np.float64)
    for k in range(K + 1):
        cand = [m for m in range(K + 1) if m != k]
        targets[k] = cand
        if total_rates[k] > 0.0:
            probs = np.array([rows[k, m] for m in cand]) / total_rates[k]
            c = np.cumsum(probs)
            c[-1] = 1.0  # guard the top edge against rounding
            cum_probs[k] = c
        else:
            total_rates[k] = 0.0
    return total_rates, cum_probs, targets


def _path_kernel(
    seed_lo,
    seed_hi,
    path_lo,
    path_hi,
    total_rates,
    cum_probs,
    targets,
    horizon,
    checkpoints,
    theta_out,
    stop_at_first_return,
):
    level = 0
    t_now = 0.0
    t_comp = 0.0
    soj = 0.0
    s_comp = 0.0
    visits0 = 1
    max_level = 0
    first_return = -1.0
    left_ball = False
    block = 0
    cp_i = 0
    ncp = checkpoints.shape[0]

    while t_now < horizon:
        rate = total_rates[level]
        if rate > 0.0:
            blo = block & MASK32
            bhi = (block >> 32) & MASK32
            u1, u2 = rng.block_uniforms(seed_lo, seed_hi, path_lo, path_hi, blo, bhi)
            block += 1
            holding = -math.log(u1) / rate
        else:
            holding = math.inf
            u2 = 0.0
        t_end = t_now + holding

        while cp_i < ncp and checkpoints[cp_i] <= t_end:
            theta = soj
            if level == 0:
                # same compensated add a run ending here would perform, so a
                # checkpoint column is bit-identical to that run's sojourn
                theta = soj + ((checkpoints[cp_i] - t_now) - s_comp)
            theta_out[cp_i] = theta
            cp_i += 1

        if t_end >= horizon:
            if level == 0:
                y = (horizon - t_now) - s_comp
                tt = soj + y
                s_comp = (tt - soj) - y
                soj = tt
            t_now = horizon
            break

        if level == 0:
            y = holding - s_comp
            tt = soj + y
            s_comp = (tt - soj) - y
            soj = tt
        y = holding - t_comp
        tt = t_now + y
        t_comp = (tt - t_now) - y
        t_now = tt

        # next level: linear scan of the cumulative row (mass sits low)
        row = cum_probs[level]
        j = 0
        last = row.shape[0] - 1
        while j < last and u2 > row[j]:
            j += 1
        new_level = targets[level, j]
        if new_level == 0:
            visits0 += 1
            if left_ball and first_return < 0.0:
                first_return = t_now
                if stop_at_first_return:
                    level = new_level
                    break
        elif level == 0:
            left_ball = True
        if new_level > max_level:
            max_level = new_level
        level = new_level

    while cp_i < ncp:
        theta_out[cp_i] = soj
        cp_i += 1

    if soj > horizon:
        soj = horizon
    return soj, first_return, visits0, max_level


def _batch_kernel(
    i0,
    i1,
    seed_lo,
    seed_hi,
    start_index,
    total_rates,
    cum_probs,
    targets,
    horizon,
    checkpoints,
    stop_at_first_return,
    out_sojourn,
    out_first_return,
    out_visits,
    out_maxlev,
    out_theta,
):
    for i in range(i0, i1):
        path = start_index + i
        plo = path & MASK32
        phi = (path >> 32) & MASK32
        soj, fr, visits, maxlev = _path_kernel(
            seed_lo,
            seed_hi,
            plo,
            phi,
            total_rates,
            cum_probs,
            targets,
            horizon,
            checkpoints,
            out_theta[i],
            stop_at_first_return,
        )
        out_sojourn[i] = soj
        out_first_return[i] = fr
        out_visits[i] = visits
        out_maxlev[i] = maxlev


if rng.HAVE_NUMBA:
    import numba

    _path_kernel = numba.njit(nogil=True)(_path_kernel)
    _batch_kernel = numba.njit(nogil=True)(_batch_kernel)


@dataclass(frozen=True)
class EnsembleResult:
    """Per-path functionals of a deterministic ensemble, indexed by path.

    first_return holds -1.0 where no return happened by the horizon.
    theta has one column per checkpoint time (occupation of level 0 up to
    that time); None when no checkpoints were requested.
    """

    horizon: float
    seed: int
    start_index: int
    sojourn: np.ndarray
    first_return: np.ndarray
    visits_to_zero: np.ndarray
    max_level: np.ndarray
    checkpoints: Optional[np.ndarray] = None
    theta: Optional[np.ndarray] = None

    @property
    def returned(self) -> np.ndarray:
        return self.first_return >= 0.0

    @property
    def complement_sojourn(self) -> np.ndarray:
        return self.horizon - self.sojourn


def run_ensemble(
    gen: NormChainGenerator,
    horizon: float,
    n_paths: int,
    seed: int,
    checkpoints: Optional[Sequence[float]] = None,
    threads: int = 1,
    stop_at_first_return: bool = False,
    start_index: int = 0,
) -> EnsembleResult:
    """Simulate n_paths independent paths; deterministic for any thread count.

    Path i uses stream (seed, start_index + i); outputs are stored by path
    index, so chunking and parallelism cannot reorder anything.
    """
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    if threads < 1:
        raise ValueError("threads must be >= 1")
    cps = np.asarray(checkpoints if checkpoints is not None else [], dtype=float)
    if cps.size:
        if stop_at_first_return:
            raise ValueError("checkpoints cannot be combined with stop_at_first_return")
        if np.any(np.diff(cps) < 0):
            raise ValueError("checkpoints must be sorted ascending")
        if cps[0] < 0 or cps[-1] > horizon:
            raise ValueError("checkpoints must lie in [0, horizon]")

    total_rates, cum_probs, targets = _prepare_tables(gen)
    seed_lo, seed_hi = rng.split64(seed)

    out_sojourn = np.empty(n_paths)
    out_first_return = np.empty(n_paths)
    out_visits = np.empty(n_paths, dtype=np.int64)
    out_maxlev = np.empty(n_paths, dtype=np.int64)
    out_theta = np.empty((n_paths, cps.size))

    def run_range(i0: int, i1: int) -> None:
        _batch_kernel(
            i0,
            i1,
            seed_lo,
            seed_hi,
            start_index,
            total_rates,
            cum_probs,
            targets,
            float(horizon),
            cps,
            stop_at_first_return,
            out_sojourn,
            out_first_return,
            out_visits,
            out_maxlev,
            out_theta,
        )

    if threads == 1 or n_paths < 2 * threads:
        run_range(0, n_paths)
    else:
        bounds = np.linspace(0, n_paths, threads + 1).astype(int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(run_range, int(a), int(b))
                for a, b in zip(bounds[:-1], bounds[1:])
                if b > a
            ]
            for fut in futures:
                fut.result()

    return EnsembleResult(
        horizon=float(horizon),
        seed=seed,
        start_index=start_index,
        sojourn=out_sojourn,
        first_return=out_first_return,
        visits_to_zero=out_visits,
        max_level=out_maxlev,
        checkpoints=cps if cps.size else None,
        theta=out_theta if cps.size else None,
    )


def sample_path(
    gen: NormChainGenerator, horizon: float, seed: int, path_index: int = 0
) -> Trajectory:
    """One trajectory with its full event list (pure Python mirror of the kernel).

    Consumes exactly the same RNG blocks as the ensemble kernel, so the
    recorded events reproduce the kernel's functionals draw for draw.
    """
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    total_rates, cum_probs, targets = _prepare_tables(gen)
    seed_lo, seed_hi = rng.split64(seed)
    path_lo, path_hi = rng.split64(path_index)

    events = []
    level = 0
    t_now = 0.0
    block = 0
    while t_now < horizon:
        rate = total_rates[level]
        if rate > 0.0:
            blo, bhi = rng.split64(block)
            u1, u2 = rng.block_uniforms(seed_lo, seed_hi, path_lo, path_hi, blo, bhi)
            block += 1
            holding = -math.log(u1) / rate
        else:
            events.append((level, math.inf))
            break
        events.append((level, holding))
        t_now += holding
        if t_now >= horizon:
            break
        row = cum_probs[level]
        j = 0
        last = row.shape[0] - 1
        while j < last and u2 > row[j]:
            j += 1
        level = int(targets[level, j])
    return Trajectory(
        params=gen.params,
        horizon=float(horizon),
        events=tuple(events),
        seed=seed,
        path_index=path_index,
    )


def functionals(traj: Trajectory, t: float) -> TrajectoryFunctionals:
    """Occupation functionals of a recorded trajectory up to time t <= horizon."""
    if not (0 <= t <= traj.horizon):
        raise ValueError(f"t must lie in [0, horizon], got {t!r}")
    soj = 0.0
    s_comp = 0.0
    clock = 0.0
    t_comp = 0.0
    visits0 = 1
    first_return = None
    left_ball = False
    for idx, (level, holding) in enumerate(traj.events):
        if clock >= t:
            break
        # entry bookkeeping at the dwell start (strictly before t here)
        if idx > 0:
            if level == 0:
                visits0 += 1
                if left_ball and first_return is None:
                    first_return = clock
            else:
                left_ball = True
        # compensated sums in the batch kernel's exact operation order, so a
        # replayed path reproduces its ensemble row bit for bit
        if clock + holding >= t:
            if level == 0:
                y = (t - clock) - s_comp
                tt = soj + y
                s_comp = (tt - soj) - y
                soj = tt
            break
        if level == 0:
            y = holding - s_comp
            tt = soj + y
            s_comp = (tt - soj) - y
            soj = tt
        y = holding - t_comp
        tt = clock + y
        t_comp = (tt - clock) - y
        clock = tt
    soj = min(soj, t)
    return TrajectoryFunctionals(
        sojourn=soj,
        complement_sojourn=t - soj,
        first_return=first_return,
        returned=first_return is not None,
        visits_to_zero=visits0,
    )


def sojourn_increment(traj: Trajectory, t_a: float, t: float) -> float:
    """Occupation gained on (t_a, t_a + t]; the ageing increment."""
    if t < 0 or t_a < 0:
        raise ValueError("times must be nonnegative")
    if t_a + t > traj.horizon:
        raise ValueError("t_a + t exceeds the trajectory horizon")
    later = functionals(traj, t_a + t).sojourn
    earlier = functionals(traj, t_a).sojourn
    return later - earlier


def first_holdings(gen: NormChainGenerator, n_paths: int, seed: int) -> np.ndarray:
    """First holding time of each path stream; distributed Exp(row-0 exit rate)."""
    total_rates, _, _ = _prepare_tables(gen)
    rate0 = float(total_rates[0])
    seed_lo, seed_hi = rng.split64(seed)
    out = np.empty(n_paths)
    for i in range(n_paths):
        plo, phi = rng.split64(i)
        u1, _ = rng.block_uniforms(seed_lo, seed_hi, plo, phi, 0, 0)
        out[i] = -math.log(u1) / rate0
    return out
