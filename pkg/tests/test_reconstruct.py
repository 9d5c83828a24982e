"""Depth-d intensity reconstruction and its pathwise error bounds."""

import numpy as np
import pytest

from cpk import (
    IntensitySpec,
    mean_bound,
    reconstruct_intensity,
    reconstruction_sweep,
    simulate,
)

LINEAR = IntensitySpec.linear(1.0, 0.3, 0.4)


class TestReconstructIntensity:
    def test_depth_one(self):
        res = reconstruct_intensity(LINEAR, [2])
        assert res.value == pytest.approx(1.8, abs=1e-12)  # f(0, 2)
        assert res.depth == 1

    def test_depth_two_hand_unrolled(self):
        # f(f(0, 5), 2) = f(3, 2) = 2.7; most recent count first
        res = reconstruct_intensity(LINEAR, [2, 5])
        assert res.value == pytest.approx(2.7, abs=1e-12)

    def test_true_init_reproduces_exactly(self):
        traj = simulate(LINEAR, n=400, burn_in=100, seed=21)
        t = 250
        for d in (1, 2, 5, 10):
            recent = traj.counts[t - d:t][::-1]
            res = reconstruct_intensity(LINEAR, recent, lambda_init=traj.intensities[t - d])
            assert res.value == traj.intensities[t]

    def test_zero_init_bound(self):
        traj = simulate(LINEAR, n=400, burn_in=100, seed=22)
        t, d = 300, 6
        recent = traj.counts[t - d:t][::-1]
        lam_past = traj.intensities[t - d]
        res = reconstruct_intensity(LINEAR, recent, lambda_past=lam_past)
        assert abs(res.value - traj.intensities[t]) <= LINEAR.kappa1 ** d * lam_past + 1e-12
        assert res.error_bound == pytest.approx(LINEAR.kappa1 ** d * lam_past)

    def test_default_bound_uses_mean_bound(self):
        res = reconstruct_intensity(LINEAR, [1, 2, 3])
        assert res.error_bound == pytest.approx(LINEAR.kappa1 ** 3 * mean_bound(LINEAR))

    def test_initialization_forgetting(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            d = int(rng.integers(1, 12))
            counts = rng.integers(0, 10, d)
            a, b = rng.uniform(0.0, 15.0, 2)
            va = reconstruct_intensity(LINEAR, counts, lambda_init=a).value
            vb = reconstruct_intensity(LINEAR, counts, lambda_init=b).value
            assert abs(va - vb) <= LINEAR.kappa1 ** d * abs(a - b) + 1e-12

    def test_empty_counts_rejected(self):
        with pytest.raises(ValueError):
            reconstruct_intensity(LINEAR, [])


class TestReconstructionSweep:
    def test_pathwise_bound_never_violated(self):
        traj = simulate(LINEAR, n=3000, burn_in=200, seed=24)
        rows = reconstruction_sweep(LINEAR, traj, range(1, 16))
        for row in rows:
            assert row.max_abs_error <= row.bound + 1e-12

    def test_error_decays_geometrically(self):
        traj = simulate(LINEAR, n=3000, burn_in=200, seed=25)
        rows = reconstruction_sweep(LINEAR, traj, [1, 5, 10])
        errs = [row.max_abs_error for row in rows]
        assert errs[0] > errs[1] > errs[2]
        assert rows[2].bound == pytest.approx(
            LINEAR.kappa1 ** 10 * traj.intensities[: len(traj) - 10].max()
        )

    def test_memoryless_family_is_exact(self):
        # theta1 = 0: the intensity depends on the last count only
        spec = IntensitySpec.linear(1.0, 0.0, 0.4)
        traj = simulate(spec, n=500, burn_in=100, seed=26)
        rows = reconstruction_sweep(spec, traj, [1, 2, 5])
        for row in rows:
            assert row.max_abs_error == 0.0

    def test_deep_reconstruction_near_exact(self):
        traj = simulate(LINEAR, n=60, burn_in=100, seed=27)
        rows = reconstruction_sweep(LINEAR, traj, [45])
        assert rows[0].max_abs_error < 1e-12  # 0.3^45 * max(lam) is ~1e-23

    def test_depth_must_fit(self):
        traj = simulate(LINEAR, n=30, burn_in=0, seed=28)
        with pytest.raises(ValueError):
            reconstruction_sweep(LINEAR, traj, [30])
