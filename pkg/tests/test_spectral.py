"""Width-of-spectral-hole layer: exact identities, scaling laws, validation."""

import math

import numpy as np
import pytest

from padic_sojourn import spectral
from padic_sojourn.errors import FitError
from padic_sojourn.experiments import estimate_moment
from padic_sojourn.model import ModelParams


def _sp(p22, h=0.27, d=1.3):
    return spectral.SpectralParams(h=h, d=d, model=p22)


class TestParams:
    def test_h_domain(self, p22):
        for bad in (0.0, 1.0, -0.3, 1.7):
            with pytest.raises(ValueError):
                spectral.SpectralParams(h=bad, d=1.0, model=p22)

    def test_d_domain(self, p22):
        with pytest.raises(ValueError):
            spectral.SpectralParams(h=0.3, d=0.0, model=p22)

    def test_warns_outside_clean_regime(self, p205):
        with pytest.warns(UserWarning):
            spectral.SpectralParams(h=0.3, d=1.0, model=p205)  # alpha <= 1
        with pytest.warns(UserWarning):
            # boundary at alpha=3 is 1.5 and 2h = 1.6 crosses it
            spectral.SpectralParams(h=0.8, d=1.0, model=ModelParams(2, 3.0))

    def test_clean_regime_silent(self, p22, recwarn):
        spectral.SpectralParams(h=0.27, d=1.0, model=p22)
        assert not [w for w in recwarn if issubclass(w.category, UserWarning)]


class TestWidthTable:
    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            spectral.WidthTable(
                t=np.array([1.0, 2.0]),
                t_a=np.zeros(2),
                sigma=np.zeros(2),
                stderr=np.zeros(2),
                n=np.array([10]),
            )

    def test_negative_sigma(self):
        with pytest.raises(ValueError):
            spectral.WidthTable(
                t=np.array([1.0]),
                t_a=np.zeros(1),
                sigma=np.array([-0.1]),
                stderr=np.zeros(1),
                n=np.array([10]),
            )

    def test_row_order_enforced(self):
        with pytest.raises(ValueError):
            spectral.WidthTable(
                t=np.array([2.0, 1.0]),
                t_a=np.zeros(2),
                sigma=np.zeros(2),
                stderr=np.zeros(2),
                n=np.array([10, 10]),
            )


class TestExactIdentities:
    def test_width_is_scaled_fractional_moment(self, p22):
        # same seed: sigma(t)^2 must equal D times the plain fractional
        # moment estimate at beta = 2h, bit for bit, at every grid time
        sp = _sp(p22)
        t_grid = [1.0, 4.0, 16.0]
        table = spectral.hole_width(sp, t_grid, n_paths=1000, seed=99)
        for i, t in enumerate(t_grid):
            est = estimate_moment(p22, t, 2.0 * sp.h, 1000, seed=99)
            assert table.sigma[i] == math.sqrt(sp.d * est.value)
            assert table.n[i] == est.n

    def test_prefix_exactness_across_grids(self, p22):
        # adding later grid times must not change earlier rows
        sp = _sp(p22)
        short = spectral.hole_width(sp, [1.0, 4.0], n_paths=1000, seed=7)
        long = spectral.hole_width(sp, [1.0, 4.0, 64.0], n_paths=1000, seed=7)
        assert np.array_equal(short.sigma, long.sigma[:2])
        assert np.array_equal(short.stderr, long.stderr[:2])

    def test_ageing_zero_offset_matches_hole(self, p22):
        sp = _sp(p22)
        hole = spectral.hole_width(sp, [8.0], n_paths=1000, seed=31)
        aged = spectral.ageing_width(sp, t=8.0, t_a_grid=[0.0], n_paths=1000, seed=31)
        assert aged.t_a[0] == 0.0
        assert aged.sigma[0] == hole.sigma[0]
        assert aged.stderr[0] == hole.stderr[0]

    def test_width_from_samples_delta_method(self, close):
        x = np.abs(np.random.default_rng(3).normal(size=500)) + 0.1
        h, d = 0.3, 2.0
        sigma, stderr, est = spectral._width_from_samples(x, h, d)
        close(sigma, math.sqrt(d * np.mean(x ** (2 * h))), rel=1e-12,
              label="sigma")
        close(stderr, math.sqrt(d) * est.stderr / (2 * math.sqrt(est.value)),
              rel=1e-12, label="stderr")

    def test_width_zero_when_no_occupation(self):
        sigma, stderr, est = spectral._width_from_samples(
            np.zeros(50), 0.3, 1.0
        )
        assert sigma == 0.0 and stderr == 0.0 and est.n == 50


class TestExponents:
    def test_closed_forms(self, close):
        close(spectral.width_exponent(2.0, 0.27), 0.135, abs_=1e-15, label="b")
        close(spectral.ageing_exponent(2.0, 0.27), 0.135, abs_=1e-15, label="c")
        close(spectral.width_exponent(3.0, 0.3), 0.2, abs_=1e-15, label="b a=3")

    def test_ratio_is_alpha_minus_one(self, close):
        for alpha in (1.5, 2.0, 4.0, 8.0, 50.0):
            r = spectral.width_exponent(alpha, 0.2) / spectral.ageing_exponent(
                alpha, 0.2
            )
            close(r, alpha - 1.0, rel=1e-12, label=f"ratio a={alpha}")

    def test_domain(self):
        with pytest.raises(ValueError):
            spectral.width_exponent(1.0, 0.3)
        with pytest.raises(ValueError):
            spectral.ageing_exponent(0.5, 0.3)

    def test_exponent_report_inverts_exactly(self):
        out = spectral.exponent_report(0.27, 0.07)
        assert out["alpha_inferred"] == 0.27 / 0.07
        out2 = spectral.exponent_report(0.27, 0.07, h=0.27)
        a = out2["alpha_inferred"]
        assert out2["b_pred"] == spectral.width_exponent(a, 0.27)
        assert out2["c_pred"] == spectral.ageing_exponent(a, 0.27)


class TestScalingLaws:
    def test_hole_width_slope(self, p22):
        # fitted growth exponent vs (alpha-1)h/alpha = 0.135
        sp = _sp(p22)
        table = spectral.hole_width(
            sp, np.geomspace(1e2, 1e5, 7), n_paths=4000, seed=41
        )
        fit = spectral.fit_width_slope(table)
        assert abs(fit.slope - 0.135) < max(3.0 * fit.slope_stderr, 0.02)

    def test_slope_tracks_alpha(self, p22):
        # heavier tails (smaller alpha) slow the width growth
        slopes = []
        for alpha in (1.5, 4.0):
            sp = spectral.SpectralParams(h=0.27, d=1.0, model=ModelParams(2, alpha))
            table = spectral.hole_width(
                sp, np.geomspace(1e2, 1e5, 6), n_paths=1500, seed=43
            )
            slopes.append(spectral.fit_width_slope(table).slope)
        pred = [spectral.width_exponent(a, 0.27) for a in (1.5, 4.0)]
        assert slopes[0] < slopes[1]
        for got, want in zip(slopes, pred):
            assert abs(got - want) < 0.035

    def test_ageing_width_decreases(self, p22):
        # older systems show narrower holes, all else equal
        sp = _sp(p22)
        table = spectral.ageing_width(
            sp, t=10.0, t_a_grid=np.geomspace(10.0, 1e4, 6), n_paths=3000, seed=47
        )
        assert np.all(table.t_a > 0.0)
        sig = table.sigma
        assert sig[0] > sig[-1]
        drop = sig[0] - sig[-1]
        noise = math.hypot(table.stderr[0], table.stderr[-1])
        assert drop > 3.0 * noise

    def test_fit_needs_rows(self, p22):
        sp = _sp(p22)
        table = spectral.hole_width(sp, [1.0, 2.0, 4.0], n_paths=1000, seed=3)
        with pytest.raises(FitError):
            spectral.fit_width_slope(table)
        with pytest.raises(FitError):
            spectral.fit_ageing_slope(table)  # no ageing rows at all
