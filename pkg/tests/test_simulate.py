"""Path sampler: RNG known answers, determinism, kernel/mirror parity, laws."""

import math

import numpy as np
import pytest

from padic_sojourn import analytic, rng, simulate
from padic_sojourn.experiments import first_return_cdf_model, ks_critical_value
from padic_sojourn.model import build_generator, derive_constants

# Philox4x32-10 reference vectors (counter words, key words -> output words),
# the standard published known-answer triples for this generator.
PHILOX_KAT = [
    ((0, 0, 0, 0), (0, 0), (0x6627E8D5, 0xE169C58D, 0xBC57AC4C, 0x9B00DBD8)),
    (
        (0xFFFFFFFF, 0xFFFFFFFF, 0xFFFFFFFF, 0xFFFFFFFF),
        (0xFFFFFFFF, 0xFFFFFFFF),
        (0x408F276D, 0x41C83B0E, 0xA20BC7C6, 0x6D5451FD),
    ),
    (
        (0x243F6A88, 0x85A308D3, 0x13198A2E, 0x03707344),
        (0xA4093822, 0x299F31D0),
        (0xD16CFE09, 0x94FDCCEB, 0x5001E420, 0x24126EA1),
    ),
]


class TestRng:
    @pytest.mark.parametrize("ctr,key,expected", PHILOX_KAT)
    def test_philox_known_answers(self, ctr, key, expected):
        assert rng._philox4x32_py(*ctr, *key) == expected
        # the compiled variant must agree word for word
        assert tuple(rng.philox4x32(*ctr, *key)) == expected

    def test_block_uniforms_compiled_matches_python(self):
        for seed in (0, 1, 2**63 - 1):
            slo, shi = rng.split64(seed)
            for path in (0, 7, 12345):
                plo, phi = rng.split64(path)
                for block in (0, 3):
                    blo, bhi = rng.split64(block)
                    a = rng._block_uniforms_py(slo, shi, plo, phi, blo, bhi)
                    b = rng.block_uniforms(slo, shi, plo, phi, blo, bhi)
                    assert a == tuple(b)

    def test_uniforms_open_interval(self):
        slo, shi = rng.split64(99)
        us = []
        for block in range(2000):
            blo, bhi = rng.split64(block)
            us.extend(rng._block_uniforms_py(slo, shi, 0, 0, blo, bhi))
        arr = np.array(us)
        assert np.all((arr > 0.0) & (arr < 1.0))
        # crude uniformity: mean of 4000 draws within 5 sigma of 1/2
        assert abs(arr.mean() - 0.5) < 5.0 / math.sqrt(12.0 * arr.size)

    def test_split64(self):
        assert rng.split64(0) == (0, 0)
        lo, hi = rng.split64((123 << 32) | 456)
        assert (lo, hi) == (456, 123)


class TestDeterminism:
    def test_same_seed_same_result(self, p22):
        gen = build_generator(p22, 30)
        a = simulate.run_ensemble(gen, horizon=5.0, n_paths=64, seed=42)
        b = simulate.run_ensemble(gen, horizon=5.0, n_paths=64, seed=42)
        assert np.array_equal(a.sojourn, b.sojourn)
        assert np.array_equal(a.first_return, b.first_return)
        assert np.array_equal(a.visits_to_zero, b.visits_to_zero)

    def test_different_seed_differs(self, p22):
        gen = build_generator(p22, 30)
        a = simulate.run_ensemble(gen, horizon=5.0, n_paths=64, seed=42)
        b = simulate.run_ensemble(gen, horizon=5.0, n_paths=64, seed=43)
        assert not np.array_equal(a.sojourn, b.sojourn)

    def test_thread_count_invariant(self, p22):
        gen = build_generator(p22, 30)
        one = simulate.run_ensemble(gen, horizon=5.0, n_paths=101, seed=7, threads=1)
        three = simulate.run_ensemble(gen, horizon=5.0, n_paths=101, seed=7, threads=3)
        assert np.array_equal(one.sojourn, three.sojourn)
        assert np.array_equal(one.first_return, three.first_return)

    def test_start_index_slices_the_stream(self, p22):
        gen = build_generator(p22, 30)
        full = simulate.run_ensemble(gen, horizon=3.0, n_paths=10, seed=5)
        tail = simulate.run_ensemble(gen, horizon=3.0, n_paths=4, seed=5, start_index=6)
        assert np.array_equal(full.sojourn[6:], tail.sojourn)
        assert np.array_equal(full.first_return[6:], tail.first_return)

    def test_mirror_matches_kernel(self, p22):
        # the pure-Python path recorder consumes identical RNG blocks
        gen = build_generator(p22, 30)
        horizon = 4.0
        res = simulate.run_ensemble(gen, horizon=horizon, n_paths=6, seed=11)
        for i in range(6):
            traj = simulate.sample_path(gen, horizon, seed=11, path_index=i)
            fn = simulate.functionals(traj, horizon)
            assert fn.sojourn == res.sojourn[i]
            assert fn.visits_to_zero == res.visits_to_zero[i]
            if fn.first_return is None:
                assert res.first_return[i] == -1.0
            else:
                assert fn.first_return == res.first_return[i]


class TestValidation:
    def test_run_ensemble_rejects(self, p22):
        gen = build_generator(p22, 20)
        with pytest.raises(ValueError):
            simulate.run_ensemble(gen, horizon=-1.0, n_paths=2, seed=0)
        with pytest.raises(ValueError):
            simulate.run_ensemble(gen, horizon=1.0, n_paths=0, seed=0)
        with pytest.raises(ValueError):
            simulate.run_ensemble(gen, horizon=1.0, n_paths=2, seed=0, threads=0)
        with pytest.raises(ValueError):
            simulate.run_ensemble(gen, horizon=1.0, n_paths=2, seed=0,
                                  checkpoints=[0.5, 0.2])
        with pytest.raises(ValueError):
            simulate.run_ensemble(gen, horizon=1.0, n_paths=2, seed=0,
                                  checkpoints=[0.5, 2.0])
        with pytest.raises(ValueError):
            simulate.run_ensemble(gen, horizon=1.0, n_paths=2, seed=0,
                                  checkpoints=[0.5], stop_at_first_return=True)

    def test_zero_horizon(self, p22):
        gen = build_generator(p22, 20)
        res = simulate.run_ensemble(gen, horizon=0.0, n_paths=3, seed=1)
        assert np.all(res.sojourn == 0.0)
        assert np.all(res.first_return == -1.0)
        assert np.all(res.visits_to_zero == 1)

    def test_trajectory_invariants(self, p22):
        with pytest.raises(ValueError):
            simulate.Trajectory(p22, 1.0, ((0, 1.0), (0, 2.0)), seed=0)
        with pytest.raises(ValueError):
            simulate.Trajectory(p22, 1.0, ((0, -0.5),), seed=0)
        with pytest.raises(ValueError):
            simulate.Trajectory(p22, 9.0, ((0, 1.0), (2, 0.5)), seed=0)


class TestHandTrajectory:
    def _traj(self, p22):
        return simulate.Trajectory(
            p22, 3.5, ((0, 1.0), (2, 0.5), (0, 2.0)), seed=0
        )

    def test_functionals_mid_excursion(self, p22):
        fn = simulate.functionals(self._traj(p22), 1.25)
        assert fn.sojourn == 1.0
        assert fn.complement_sojourn == 0.25
        assert not fn.returned and fn.first_return is None
        assert fn.visits_to_zero == 1

    def test_functionals_after_return(self, p22):
        fn = simulate.functionals(self._traj(p22), 2.0)
        assert fn.sojourn == 1.5
        assert fn.complement_sojourn == 0.5
        assert fn.returned and fn.first_return == 1.5
        assert fn.visits_to_zero == 2

    def test_increment_bookkeeping(self, p22):
        traj = self._traj(p22)
        # (1, 3]: out on (1, 1.5], in on (1.5, 3] -> gain 1.5
        assert simulate.sojourn_increment(traj, 1.0, 2.0) == 1.5
        assert simulate.sojourn_increment(traj, 0.0, 1.0) == 1.0
        with pytest.raises(ValueError):
            simulate.sojourn_increment(traj, 3.0, 1.0)

    def test_functionals_domain(self, p22):
        with pytest.raises(ValueError):
            simulate.functionals(self._traj(p22), 4.0)


class TestAgainstAnalytic:
    def test_first_holding_is_exponential(self, p22):
        from scipy import stats

        gen = build_generator(p22, 30)
        b = derive_constants(p22).b_alpha
        sample = simulate.first_holdings(gen, 100_000, seed=314)
        d = stats.kstest(sample, lambda x: 1.0 - np.exp(-b * x)).statistic
        assert d <= ks_critical_value(sample.size, 0.01)

    def test_mean_sojourn(self, p22, close):
        gen = build_generator(p22, 40)
        res = simulate.run_ensemble(gen, horizon=1.0, n_paths=10_000, seed=2718)
        se = res.sojourn.std(ddof=1) / math.sqrt(res.sojourn.size)
        close(res.sojourn.mean(), analytic.mean_sojourn(1.0, p22),
              abs_=3.0 * se, label="mean occupation t=1")

    def test_occupancy_probability(self, p22, close):
        # fraction of paths inside the ball at t vs the survival series
        t, n = 1.0, 3000
        gen = build_generator(p22, 40)
        inside = 0
        for i in range(n):
            traj = simulate.sample_path(gen, t, seed=777, path_index=i)
            clock, level = 0.0, 0
            for lev, hold in traj.events:
                level = lev
                clock += hold
                if clock >= t:
                    break
            inside += level == 0
        j = analytic.survival_j(t, p22)
        se = math.sqrt(j * (1.0 - j) / n)
        close(inside / n, j, abs_=3.0 * se, label="P(inside at t)")

    def test_first_return_distribution(self, p22):
        # empirical sub-CDF of return times vs pointwise inversion of the
        # return transform, both censored at the horizon
        horizon, n = 100.0, 10_000
        gen = build_generator(p22, 40)
        res = simulate.run_ensemble(
            gen, horizon=horizon, n_paths=n, seed=909, stop_at_first_return=True
        )
        ret = np.sort(res.first_return[res.returned])
        qs = np.linspace(0.02, 0.98, 25)
        grid = np.quantile(ret, qs)
        emp = np.searchsorted(ret, grid, side="right") / n
        model = first_return_cdf_model(p22, grid)
        assert float(np.max(np.abs(emp - model))) <= ks_critical_value(n, 0.01)

    def test_checkpoint_columns(self, p22):
        gen = build_generator(p22, 30)
        cps = [0.5, 1.0, 2.0, 4.0]
        res = simulate.run_ensemble(
            gen, horizon=4.0, n_paths=50, seed=13, checkpoints=cps
        )
        assert res.theta.shape == (50, 4)
        # occupation is nondecreasing in t and the last column is the total
        assert np.all(np.diff(res.theta, axis=1) >= 0.0)
        assert np.array_equal(res.theta[:, -1], res.sojourn)
        assert np.all(res.theta[:, 0] <= 0.5 + 1e-12)
