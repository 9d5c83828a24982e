"""Dispersion statistic, normalizer, normal quantile and the decision rule."""

import math

import numpy as np
import pytest
from scipy.special import ndtri

from cpk import (
    IntensitySpec,
    UndecidableTestError,
    dispersion_stat,
    filtered_intensities,
    ks_normal_distance,
    normal_quantile,
    oracle_report,
    run_test,
    simulate,
    variance_estimate,
)

LINEAR = IntensitySpec.linear(1.0, 0.3, 0.4)


class TestDispersionStat:
    def test_single_observation(self):
        assert dispersion_stat([3], [3.0]) == pytest.approx(-3.0, abs=1e-12)

    def test_four_observations(self):
        # terms: -2, +1, -2, -1; total -4 over sqrt(4)
        val = dispersion_stat([2, 0, 3, 1], [2.0, 1.0, 2.0, 1.0])
        assert val == pytest.approx(-2.0, abs=1e-12)

    def test_oracle_centering(self):
        # conditional mean of each term vanishes under the true intensities
        means = []
        for i in range(300):
            traj = simulate(LINEAR, n=800, burn_in=300, seed=20_000 + i)
            means.append(dispersion_stat(traj.counts, traj.intensities))
        se = np.std(means, ddof=1) / math.sqrt(len(means))
        assert abs(np.mean(means)) <= 3.0 * se

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            dispersion_stat([1, 2], [1.0])


class TestVarianceEstimate:
    def test_arithmetic(self):
        assert variance_estimate([2.0, 1.0, 2.0, 1.0]) == pytest.approx(5.0, abs=1e-12)

    def test_all_zero(self):
        assert variance_estimate(np.zeros(10)) == 0.0

    def test_ergodic_stabilization(self):
        traj = simulate(LINEAR, n=100_000, burn_in=500, seed=52)
        v_small = variance_estimate(traj.intensities[:1000])
        v_large = variance_estimate(traj.intensities)
        assert abs(v_small - v_large) / v_large < 0.10


class TestNormalQuantile:
    def test_median(self):
        assert normal_quantile(0.5) == 0.0

    def test_upper_five_percent(self):
        assert normal_quantile(0.05) == pytest.approx(1.6448536270, abs=1e-9)

    def test_symmetric_tail(self):
        assert normal_quantile(0.975) == pytest.approx(-1.9599639845, abs=1e-9)

    def test_against_scipy_grid(self):
        # oracle via the tail that is exactly representable: u_a solves
        # survival(u) = a, i.e. u = -ndtri(a) for small a
        alphas = np.concatenate([
            np.array([1e-12, 1e-10, 1e-7, 1e-4, 1e-2]),
            np.linspace(0.02, 0.98, 49),
            np.array([1 - 1e-4, 1 - 1e-7, 1 - 1e-10]),
        ])
        for a in alphas:
            ref = -ndtri(a) if a <= 0.5 else ndtri(1.0 - a)
            assert normal_quantile(a) == pytest.approx(ref, abs=1e-9)

    def test_domain(self):
        for bad in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(ValueError):
                normal_quantile(bad)


class TestRunTest:
    def test_oracle_report_arithmetic(self):
        counts = np.array([2, 0, 3, 1])
        lams = np.array([2.0, 1.0, 2.0, 1.0])
        rep = oracle_report(counts, lams, alpha=0.05)
        assert rep.statistic == pytest.approx(-2.0, abs=1e-12)
        assert rep.variance_estimate == pytest.approx(5.0, abs=1e-12)
        assert rep.standardized == pytest.approx(-2.0 / math.sqrt(5.0), abs=1e-12)
        assert rep.mode == "oracle"
        assert abs(rep.standardized * math.sqrt(rep.variance_estimate) - rep.statistic) < 1e-12

    def test_reject_recomputable_from_fields(self):
        for seed in range(4):
            traj = simulate(LINEAR, n=600, burn_in=200, seed=seed)
            rep = run_test(traj.counts, "linear", alpha=0.2)
            assert rep.reject == (rep.standardized > rep.u_alpha)

    def test_simple_mode_with_true_f0_accepts(self):
        traj = simulate(LINEAR, n=5000, burn_in=500, seed=53)
        rep = run_test(traj.counts, LINEAR, alpha=0.05)
        assert rep.mode == "simple"
        assert abs(rep.standardized) < 4.0

    def test_simple_mode_power_against_misstated_feedback(self):
        wrong = IntensitySpec.linear(1.0, 0.3, 0.1)
        traj = simulate(LINEAR, n=5000, burn_in=500, seed=54)
        rep = run_test(traj.counts, wrong, alpha=0.05)
        assert rep.reject

    def test_composite_mode_fits_then_filters(self):
        traj = simulate(LINEAR, n=2000, burn_in=300, seed=55)
        rep = run_test(traj.counts, "linear", alpha=0.05)
        assert rep.mode == "composite"
        assert rep.fit is not None
        lams = filtered_intensities(rep.fit.spec, traj.counts)
        assert rep.variance_estimate == pytest.approx(variance_estimate(lams), rel=1e-12)

    def test_alpha_zero_never_rejects(self):
        traj = simulate(LINEAR, n=600, burn_in=100, seed=56)
        rep = run_test(traj.counts, "linear", alpha=0.0)
        assert rep.u_alpha == math.inf
        assert not rep.reject

    def test_zero_intensity_series_undecidable(self):
        counts = np.zeros(100, dtype=int)
        spec = IntensitySpec.expar(0.0, 0.3, 0.4, 0.2, 0.5)
        with pytest.raises(UndecidableTestError):
            run_test(counts, spec, alpha=0.05, lambda_start=0.0)

    def test_start_forgetting_between_variants(self):
        # statistic from the default (sample-mean) start converges to the
        # statistic computed from the unobserved true start
        diffs = []
        for i in range(51):
            traj = simulate(LINEAR, n=5000, burn_in=500, seed=30_000 + i)
            t_true_start = dispersion_stat(
                traj.counts,
                filtered_intensities(LINEAR, traj.counts, lambda_start=traj.intensities[0]),
            )
            t_default_start = dispersion_stat(
                traj.counts,
                filtered_intensities(LINEAR, traj.counts),
            )
            diffs.append(abs(t_default_start - t_true_start))
        assert np.median(diffs) < 0.05

    def test_short_series_rejected(self):
        with pytest.raises(ValueError):
            run_test(np.ones(10, dtype=int), "linear")


class TestKsDistance:
    def test_exact_normal_sample_is_close(self):
        x = ndtri((np.arange(1, 2001) - 0.5) / 2000)  # normal scores
        assert ks_normal_distance(x) < 0.001

    def test_shifted_sample_is_far(self):
        x = ndtri((np.arange(1, 2001) - 0.5) / 2000) + 1.0
        assert ks_normal_distance(x) > 0.3

    def test_oracle_standardized_normality_smoke(self):
        R, n = 300, 1500
        stats = []
        for i in range(R):
            traj = simulate(LINEAR, n=n, burn_in=300, seed=40_000 + i)
            stats.append(oracle_report(traj.counts, traj.intensities).standardized)
        arr = np.asarray(stats)
        assert abs(arr.mean()) <= 3.0 / math.sqrt(R)
        assert abs(arr.var(ddof=1) - 1.0) <= 3.0 * math.sqrt(2.0 / (R - 1)) + 0.05
        assert ks_normal_distance(arr) < 1.95 / math.sqrt(R)  # 0.1% KS critical value
