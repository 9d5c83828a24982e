"""Trajectory generation for the bivariate count/intensity chain.

Counts are drawn by inverse-CDF from an explicit uniform stream, so a
trajectory is a pure function of (spec, seed, stream, burn_in, lambda_start,
n).  The stream is counter-based (Philox keyed by (seed, stream)): the t-th
uniform depends only on (seed, stream, t), which is what makes
common-random-number coupling and order-independent parallel replication
possible.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from ._kernels import eval_intensity_kernel, poisson_quantile_kernel, simulate_kernel
from .model import IntensitySpec, mean_bound


def uniform_stream(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by (seed, stream)."""
    key = np.array([seed, stream], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def poisson_quantile(lam: float, u: float) -> int:
    """Smallest integer k with Poisson(lam) CDF(k) >= u.

    Computed by sequential CDF accumulation with the pmf recurrence
    p_{k+1} = p_k * lam/(k+1) from p_0 = exp(-lam); for lam > 700 the
    accumulation runs in log space so the start never underflows.
    """
    if not 0.0 <= u < 1.0:
        raise ValueError(f"u must lie in [0, 1), got {u}")
    if lam < 0.0:
        raise ValueError("lambda must be non-negative")
    return int(poisson_quantile_kernel(float(lam), float(u)))


def step(spec: IntensitySpec, state: tuple[int, float], u: float) -> tuple[int, float]:
    """One transition: advance the intensity, then draw the count by inverse CDF."""
    n_prev, lam_prev = state
    if lam_prev < 0.0:
        raise ValueError("state intensity must be non-negative")
    lam_new = eval_intensity_kernel(spec.family_code, spec.params_array, float(lam_prev), float(n_prev))
    return poisson_quantile(lam_new, u), lam_new


@dataclass(frozen=True)
class Trajectory:
    """Paired count and intensity paths with full generation provenance."""

    counts: np.ndarray
    intensities: np.ndarray
    spec: IntensitySpec
    seed: int
    burn_in: int
    lambda_start: float
    stream: int = 0

    def __len__(self) -> int:
        return len(self.counts)

    def to_csv(self, path) -> None:
        """Write header ``t,N,lambda`` with lambda at 17 significant digits."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "N", "lambda"])
            for t, (n, lam) in enumerate(zip(self.counts, self.intensities), start=1):
                writer.writerow([t, int(n), f"{lam:.17g}"])


def read_trajectory_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a ``t,N,lambda`` CSV back into (counts, intensities) arrays."""
    counts = []
    lams = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["t", "N", "lambda"]:
            raise ValueError(f"expected header ['t', 'N', 'lambda'], got {header}")
        for row in reader:
            counts.append(int(row[1]))
            lams.append(float(row[2]))
    return np.asarray(counts, dtype=np.int64), np.asarray(lams, dtype=np.float64)


def read_counts_csv(path) -> np.ndarray:
    """Read a single-column ``N`` CSV (the `fit`/`test` input format)."""
    counts = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[0] not in ("N", "t"):
            raise ValueError(f"expected a counts CSV with header 'N' or 't,N,lambda', got {header}")
        idx = 0 if header[0] == "N" else 1
        for row in reader:
            counts.append(int(row[idx]))
    return np.asarray(counts, dtype=np.int64)


def simulate(
    spec: IntensitySpec,
    n: int,
    lambda_start: float | None = None,
    burn_in: int = 500,
    seed: int = 0,
    stream: int = 0,
) -> Trajectory:
    """Simulate burn_in + n steps from lam_1 = lambda_start and keep the last n.

    The recursion is N_t = F^{-1}_{lam_t}(U_t), lam_{t+1} = f(lam_t, N_t),
    with U_t drawn from the (seed, stream) uniform stream.  lambda_start
    defaults to the a-priori stationary mean bound f(0,0)/(1-kappa).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if burn_in < 0:
        raise ValueError("burn_in must be >= 0")
    if lambda_start is None:
        lambda_start = mean_bound(spec)
    if lambda_start < 0.0:
        raise ValueError("lambda_start must be non-negative")
    total = burn_in + n
    uniforms = uniform_stream(seed, stream).random(total)
    counts = np.empty(total, dtype=np.int64)
    lams = np.empty(total, dtype=np.float64)
    simulate_kernel(spec.family_code, spec.params_array, float(lambda_start), uniforms, counts, lams)
    return Trajectory(
        counts=counts[burn_in:],
        intensities=lams[burn_in:],
        spec=spec,
        seed=int(seed),
        burn_in=int(burn_in),
        lambda_start=float(lambda_start),
        stream=int(stream),
    )
