#!/usr/bin/env python3
"""Tour of the intensity families and their closed-form bounds.

Each family is a contractive map f(lam, y) driving the recursion
lam_t = f(lam_{t-1}, N_{t-1}) with N_t ~ Poisson(lam_t) given the past.
Everything downstream (stationarity, mixing rates, reconstruction depth,
test asymptotics) is controlled by the two Lipschitz constants kappa1 and
kappa2 with kappa1 + kappa2 < 1.
"""

import numpy as np

from cpk import (
    IntensitySpec,
    conditional_mean_bound,
    eval_intensity,
    mean_bound,
    second_moment_bound,
    validate_contraction,
)

linear = IntensitySpec.linear(1.0, 0.3, 0.4)
expar = IntensitySpec.expar(0.5, 0.3, 0.4, 0.2, 0.5)
frac = IntensitySpec.fractional(0.25, 0.2)

print("== families ==")
for spec in (linear, expar, frac):
    print(f"{spec.family:10s} params={spec.param_dict()}  kappa=({spec.kappa1:.2f}, {spec.kappa2:.2f})")
    print(f"{'':10s} f(3, 2) = {eval_intensity(spec, 3.0, 2):.6f}")

print("\n== contraction safety net ==")
report = validate_contraction(linear, grid_size=41, lambda_max=10.0)
print(f"linear declared constants: worst grid ratio {report.worst_ratio:.6f} -> passed={report.passed}")
lying = IntensitySpec("linear", (1.0, 0.3, 0.4), kappa1=0.1)
report = validate_contraction(lying, grid_size=41, lambda_max=10.0)
print(f"understated kappa1 (0.1 instead of 0.3): worst ratio {report.worst_ratio:.2f} -> passed={report.passed}")

print("\n== a-priori moment bounds ==")
for spec in (linear, expar, frac):
    mb = mean_bound(spec)
    print(f"{spec.family:10s} stationary mean bound f(0,0)/(1-kappa) = {mb:.4f}")

print("\nconditional mean bound from lam_1 = 10 (linear family):")
for t in (1, 3, 5, 10, 30):
    print(f"  t={t:3d}  E(lam_t | lam_1=10) <= {conditional_mean_bound(linear, 10.0, t):.4f}")
print(f"  limit = mean bound = {mean_bound(linear):.4f}")

print("\nsecond-moment drift bound (linear family):")
for kbar in (0.6, 0.75, 0.85, 0.95):
    k0, bound = second_moment_bound(linear, kbar)
    print(f"  kappa_bar={kbar:.2f}  K0={k0:.4f}  E lam^2 <= {bound:.4f}")
