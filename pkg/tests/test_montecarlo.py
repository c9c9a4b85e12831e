import numpy as np
import pytest
from math import erfc

from gkdvlab.grid import field_from_function, l2_norm
from gkdvlab.montecarlo import (
    auto_n_max,
    exceedance_fit_line,
    exceptional_probability,
    fit_scale_exponent,
    make_lambda_grid,
    run_ensemble,
    scale_report_from_observations,
    strichartz_scaling,
    tail_fit,
    wilson_interval,
)
from gkdvlab.norms import sobolev_norm
from gkdvlab.spacetime import centered_axis

from conftest import banded_bump


class TestRunEnsemble:
    def test_deterministic_across_calls_and_threads(self, grid64):
        phi = banded_bump(grid64, band=3.0)
        obs = {"hs": lambda f: sobolev_norm(f, 0.2)}
        a = run_ensemble(phi, 32, obs, seed=5, threads=1)
        b = run_ensemble(phi, 32, obs, seed=5, threads=1)
        c = run_ensemble(phi, 32, obs, seed=5, threads=8)
        assert all(x.values == y.values and x.seed == y.seed for x, y in zip(a, b))
        assert all(x.values == y.values and x.seed == y.seed for x, y in zip(a, c))

    def test_degenerate_ones_reproduces_norm(self, grid64):
        phi = banded_bump(grid64, band=3.0)
        recs = run_ensemble(
            phi, 1, {"hs": lambda f: sobolev_norm(f, 0.25)}, seed=1, distribution="ones"
        )
        assert recs[0].values["hs"] == pytest.approx(sobolev_norm(phi, 0.25), rel=1e-12)

    def test_failures_recorded_not_raised(self, grid64):
        phi = banded_bump(grid64, band=3.0)

        def broken(f):
            raise RuntimeError("observable exploded")

        recs = run_ensemble(phi, 4, {"bad": broken}, seed=2)
        assert len(recs) == 4
        assert all(r.blown_up for r in recs)

    def test_callable_spec_returns_mapping(self, grid64):
        phi = banded_bump(grid64, band=3.0)
        recs = run_ensemble(
            phi, 3, lambda f: {"a": l2_norm(f), "b": 2.0 * l2_norm(f)}, seed=3
        )
        for r in recs:
            assert r.values["b"] == pytest.approx(2.0 * r.values["a"])

    def test_auto_n_max_covers_support(self, grid64):
        phi = banded_bump(grid64, band=3.0)
        assert auto_n_max(phi) == 4


class TestTailFit:
    def test_synthetic_gaussian_recovers_oracle_slope(self):
        # oracle: least squares on the exact tail log erfc(lambda/sqrt(2))
        # over the same thresholds; the empirical fit must land within 10%
        rng = np.random.default_rng(0)
        obs = np.abs(rng.standard_normal(100_000))
        lam = make_lambda_grid(obs, 12, 0.9, 0.995)
        oracle_slope, _, oracle_r2, _ = exceedance_fit_line(
            lam, np.log([erfc(l / np.sqrt(2.0)) for l in lam])
        )
        fit = tail_fit(obs, None, lam)
        assert oracle_slope < 0
        assert abs(fit.slope - oracle_slope) <= 0.10 * abs(oracle_slope)
        assert fit.r_squared >= 0.9 and oracle_r2 >= 0.99

    def test_constant_observable_degenerate(self):
        obs = np.ones(2000)
        with pytest.raises(ValueError):
            tail_fit(obs, None, np.linspace(0.9, 1.1, 5))

    def test_grid_outside_sampled_range_rejected(self):
        rng = np.random.default_rng(1)
        obs = np.abs(rng.standard_normal(2000))
        with pytest.raises(ValueError):
            tail_fit(obs, None, np.linspace(0.01, 0.02, 5))

    def test_needs_thousand_samples(self):
        obs = np.abs(np.random.default_rng(2).standard_normal(500))
        with pytest.raises(ValueError):
            tail_fit(obs, None, np.linspace(1.0, 2.0, 5))

    def test_records_interface(self, grid64):
        phi = banded_bump(grid64, band=3.0)
        recs = run_ensemble(phi, 1200, {"hs": lambda f: sobolev_norm(f, 0.2)}, seed=9)
        obs = np.array([r.values["hs"] for r in recs])
        fit = tail_fit(recs, "hs", make_lambda_grid(obs))
        assert fit.slope < 0
        assert fit.n_samples == 1200


class TestWilson:
    def test_zero_failures_bound(self):
        lo, hi = wilson_interval(0, 200)
        assert lo == 0.0
        assert hi == pytest.approx(0.0188, abs=5e-4)

    def test_contains_fraction(self):
        lo, hi = wilson_interval(30, 100)
        assert lo < 0.3 < hi


class TestScalePipeline:
    def test_exact_power_law_recovered(self):
        rng = np.random.default_rng(5)
        base = np.abs(rng.standard_normal(5000)) + 0.5
        obs = {t: t**0.25 * base for t in (0.125, 0.25, 0.5)}
        rep = scale_report_from_observations(4.0, 4.0, obs)
        assert rep.alpha == pytest.approx(0.25, rel=0.01)

    def test_doubling_data_doubles_scale(self):
        rng = np.random.default_rng(6)
        base = np.abs(rng.standard_normal(5000)) + 0.5
        obs = {t: t**0.25 * base for t in (0.125, 0.25, 0.5)}
        a = scale_report_from_observations(4.0, 4.0, obs)
        b = scale_report_from_observations(4.0, 4.0, {t: 2 * o for t, o in obs.items()})
        assert np.allclose(b.scales, 2.0 * np.array(a.scales), rtol=1e-9)

    def test_fit_scale_exponent(self):
        t = [0.1, 0.2, 0.4]
        scales = [0.5 * ti**0.25 for ti in t]
        assert fit_scale_exponent(t, scales) == pytest.approx(0.25, rel=1e-12)

    def test_strichartz_run_small(self, grid64):
        phi = banded_bump(grid64, band=3.0)
        rep = strichartz_scaling(phi, 4.0, 4.0, [0.125, 0.25, 0.5], 1500, seed=3,
                                 n_time_samples=32)
        assert 0.7 * 0.25 <= rep.alpha <= 1.3 * 0.25

    def test_needs_three_T_values(self, grid64):
        phi = banded_bump(grid64, band=3.0)
        with pytest.raises(ValueError):
            strichartz_scaling(phi, 4.0, 4.0, [0.25, 0.5], 1500)


class TestExceptionalProbability:
    def test_zero_data_all_converge(self, grid64):
        phi = field_from_function(grid64, lambda x: 0.0 * x)
        rep = exceptional_probability(
            phi, [0.25, 0.125], 100, tol=1e-10, taxis=centered_axis(4.0, 256),
            xi_band=4.0, seed=1, n_max=3,
        )
        assert all(r.failures == 0 for r in rep.rows)
        assert rep.trend_ok

    def test_requires_descending_grid(self, grid64):
        phi = banded_bump(grid64, band=2.0)
        with pytest.raises(ValueError):
            exceptional_probability(phi, [0.125, 0.25], 100, tol=1e-10)

    def test_requires_hundred_samples(self, grid64):
        phi = banded_bump(grid64, band=2.0)
        with pytest.raises(ValueError):
            exceptional_probability(phi, [0.25], 50, tol=1e-10)
