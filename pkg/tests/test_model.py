"""Intensity families: evaluation, Lipschitz validation and closed-form bounds."""

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.optimize import minimize_scalar

from cpk import (
    ContractionError,
    IntensitySpec,
    conditional_mean_bound,
    eval_intensity,
    mean_bound,
    second_moment_bound,
    validate_contraction,
)

LINEAR = IntensitySpec.linear(1.0, 0.3, 0.4)
EXPAR0 = IntensitySpec.expar(0.0, 0.3, 0.4, 0.2, 0.5)
FRAC = IntensitySpec.fractional(0.25, 0.2)
ALL_SPECS = [LINEAR, EXPAR0, FRAC, IntensitySpec.expar(0.5, 0.3, 0.4, 0.2, 0.5)]


class TestSpecConstruction:
    def test_declared_kappas(self):
        assert (LINEAR.kappa1, LINEAR.kappa2) == (0.3, 0.4)
        assert (EXPAR0.kappa1, EXPAR0.kappa2) == (0.5, 0.4)
        assert (FRAC.kappa1, FRAC.kappa2) == (0.2, 0.5)

    def test_contraction_gate_message(self):
        with pytest.raises(ContractionError, match=r"contraction violated: kappa1\+kappa2=1.1"):
            IntensitySpec.linear(1.0, 0.6, 0.5)

    def test_negative_params_rejected(self):
        with pytest.raises(ValueError):
            IntensitySpec.linear(1.0, -0.1, 0.4)

    def test_fractional_range_requirements(self):
        with pytest.raises(ValueError):
            IntensitySpec.fractional(0.0, 0.2)  # c1 must be positive
        with pytest.raises(ValueError):
            IntensitySpec.fractional(0.3, 0.25)  # c1 + s must stay below 1/2

    def test_json_round_trip(self):
        for spec in ALL_SPECS:
            again = IntensitySpec.from_json(spec.to_json())
            assert again == spec

    def test_json_unknown_keys_rejected(self):
        with pytest.raises(ValueError, match="unknown"):
            IntensitySpec.from_json_dict(
                {"family": "linear", "params": {"theta0": 1, "theta1": 0.3, "theta2": 0.4}, "extra": 1}
            )
        with pytest.raises(ValueError, match="unknown"):
            IntensitySpec.from_json_dict(
                {"family": "linear", "params": {"theta0": 1, "theta1": 0.3, "theta2": 0.4, "oops": 2}}
            )


class TestEvalIntensity:
    def test_linear_arithmetic(self):
        assert eval_intensity(LINEAR, 3.0, 2) == pytest.approx(2.7, abs=1e-12)

    def test_expar_zero_fixed_point(self):
        assert eval_intensity(EXPAR0, 0.0, 0) == 0.0

    def test_fractional_arithmetic(self):
        # 0.25 + 0.2*(1/2) + 3/2
        assert eval_intensity(FRAC, 1.0, 3) == pytest.approx(1.85, abs=1e-12)

    def test_negative_lambda_rejected(self):
        with pytest.raises(ValueError):
            eval_intensity(LINEAR, -1.0, 0)

    def test_array_matches_scalar(self):
        lams = np.linspace(0.0, 8.0, 13)
        ys = np.arange(13)
        for spec in ALL_SPECS:
            arr = eval_intensity(spec, lams, ys)
            scl = np.array([eval_intensity(spec, l, int(y)) for l, y in zip(lams, ys)])
            assert np.array_equal(arr, scl)

    def test_linear_growth_bound(self):
        # f(lam, y) <= f(0,0) + kappa1*lam + kappa2*y on a grid
        rng = np.random.default_rng(42)
        for spec in ALL_SPECS:
            lams = rng.uniform(0.0, 30.0, 200)
            ys = rng.integers(0, 30, 200)
            f00 = eval_intensity(spec, 0.0, 0)
            vals = eval_intensity(spec, lams, ys)
            assert np.all(vals <= f00 + spec.kappa1 * lams + spec.kappa2 * ys + 1e-12)


class TestValidateContraction:
    def test_linear_attains_constants(self):
        report = validate_contraction(LINEAR, grid_size=31, lambda_max=8.0)
        assert report.passed
        assert report.worst_ratio == pytest.approx(1.0, abs=1e-9)

    def test_expar_passes_with_declared_constants(self):
        report = validate_contraction(EXPAR0, grid_size=41, lambda_max=10.0)
        assert report.passed

    def test_fractional_passes(self):
        assert validate_contraction(FRAC, grid_size=41, lambda_max=10.0).passed

    def test_understated_kappa1_fails_with_ratio_3(self):
        bad = IntensitySpec("linear", (1.0, 0.3, 0.4), kappa1=0.1)
        report = validate_contraction(bad, grid_size=31, lambda_max=8.0)
        assert not report.passed
        # a pure-lambda perturbation gives |df| = theta1*|dl| against 0.1*|dl|
        assert report.worst_ratio == pytest.approx(3.0, rel=1e-9)

    def test_pairwise_lipschitz_random_pairs(self):
        rng = np.random.default_rng(7)
        for spec in ALL_SPECS:
            l1, l2 = rng.uniform(0.0, 20.0, (2, 500))
            y1, y2 = rng.integers(0, 20, (2, 500))
            df = np.abs(eval_intensity(spec, l1, y1) - eval_intensity(spec, l2, y2))
            lip = spec.kappa1 * np.abs(l1 - l2) + spec.kappa2 * np.abs(y1 - y2)
            assert np.all(df <= lip + 1e-12)

    def test_preconditions(self):
        with pytest.raises(ValueError):
            validate_contraction(LINEAR, grid_size=1)
        with pytest.raises(ValueError):
            validate_contraction(LINEAR, lambda_max=0.0)


class TestMeanBounds:
    def test_linear_value(self):
        assert mean_bound(LINEAR) == pytest.approx(10.0 / 3.0, abs=1e-12)

    def test_expar_degenerate(self):
        assert mean_bound(EXPAR0) == 0.0

    def test_fractional_value(self):
        # f(0,0) = 0.25, kappa = 0.7
        assert mean_bound(FRAC) == pytest.approx(0.25 / 0.3, abs=1e-12)

    def test_conditional_bound_t3(self):
        assert conditional_mean_bound(LINEAR, 10.0, 3) == pytest.approx(6.6, abs=1e-12)

    def test_conditional_bound_t1_is_start(self):
        for spec in ALL_SPECS:
            assert conditional_mean_bound(spec, 7.5, 1) == 7.5

    def test_conditional_bound_limit(self):
        assert conditional_mean_bound(LINEAR, 0.0, 400) == pytest.approx(mean_bound(LINEAR), abs=1e-12)

    def test_conditional_bound_monotone_envelope(self):
        mb = mean_bound(LINEAR)
        for lam1 in (0.0, 1.0, mb, 12.0):
            vals = [conditional_mean_bound(LINEAR, lam1, t) for t in range(1, 60)]
            assert all(v <= max(lam1, mb) + 1e-12 for v in vals)
            if lam1 <= mb:
                assert vals[-1] == pytest.approx(mb, abs=1e-6)


class TestSecondMomentBound:
    def test_linear_closed_form(self):
        k0, bound = second_moment_bound(LINEAR, 0.85)
        # maximize (1 + 0.7*l)^2 + 0.16*l - 0.85*l^2 analytically: stationary
        # point of 1 + 1.56*l - 0.36*l^2 at l* = 1.56/0.72
        assert k0 == pytest.approx(1.0 + 1.56**2 / (4 * 0.36), abs=1e-12)
        assert bound == pytest.approx(k0 / 0.15, abs=1e-10)
        assert bound == pytest.approx(17.9333333333, abs=1e-9)

    def test_matches_numeric_maximization(self):
        for spec in ALL_SPECS:
            for kbar in (0.85, 0.92, 0.99):
                if kbar <= spec.kappa ** 2:
                    continue
                k0, _ = second_moment_bound(spec, kbar)
                f00 = eval_intensity(spec, 0.0, 0)
                q = lambda l: -((f00 + spec.kappa * l) ** 2 + spec.kappa2**2 * l - kbar * l * l)
                res = minimize_scalar(q, bounds=(0.0, 1e4), method="bounded",
                                      options={"xatol": 1e-12})
                assert k0 == pytest.approx(-res.fun, rel=1e-8)

    def test_expar_zero_intercept(self):
        k0, bound = second_moment_bound(EXPAR0, 0.85)
        # f(0,0) = 0: quadratic peaks at kappa2^4 / (4*(kbar - kappa^2))
        assert k0 == pytest.approx(0.16**2 / (4 * (0.85 - 0.81)), abs=1e-12)
        assert bound == pytest.approx(k0 / 0.15, abs=1e-12)

    def test_fully_degenerate(self):
        spec = IntensitySpec.expar(0.0, 0.3, 0.0, 0.2, 0.5)  # f(0,0)=0 and kappa2=0
        k0, bound = second_moment_bound(spec, 0.85)
        assert k0 == 0.0
        assert bound == 0.0

    def test_kappa_bar_domain(self):
        # valid region is (kappa^2, 1); linear example has kappa^2 = 0.49
        ksq = LINEAR.kappa ** 2
        with pytest.raises(ValueError):
            second_moment_bound(LINEAR, ksq)
        with pytest.raises(ValueError):
            second_moment_bound(LINEAR, 1.0)
        assert second_moment_bound(LINEAR, ksq + 1e-9)[1] > 0
