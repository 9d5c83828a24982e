"""Monte Carlo studies: size, normality, mixing decay and moment bounds.

Replicate r always runs on its own counter-based stream seeded by
``replicate_seed(master_seed, r)``, and aggregation is a fold over replicate
index, so results are byte-identical for any thread count.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

from .coupling import coalescence_experiment
from .estimate import spec_from_theta
from .model import IntensitySpec, mean_bound, second_moment_bound
from .simulate import simulate, uniform_stream
from .spectest import dispersion_stat, oracle_report, run_test, variance_estimate

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

#: identifier of the replicate-seed derivation rule embedded in every summary
SEED_RULE = "splitmix64-v1"


def replicate_seed(master_seed: int, index: int) -> int:
    """Element `index` of the SplitMix64 stream started at `master_seed`.

    splitmix64((master + (index+1) * 0x9E3779B97F4A7C15) mod 2^64): a fixed
    64-bit mixing function, part of the reproducibility contract.
    """
    z = (master_seed + (index + 1) * _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def normal_cdf_array(x: np.ndarray) -> np.ndarray:
    """Vectorized exact standard normal CDF via erfc."""
    return 0.5 * erfc(-np.asarray(x, dtype=np.float64) / math.sqrt(2.0))


def ks_normal_distance(sample) -> float:
    """Kolmogorov-Smirnov distance of a sample to the standard normal law."""
    x = np.sort(np.asarray(sample, dtype=np.float64))
    n = x.size
    if n == 0:
        raise ValueError("sample must not be empty")
    cdf = normal_cdf_array(x)
    upper = np.arange(1, n + 1) / n - cdf
    lower = cdf - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))


@dataclass(frozen=True)
class MCSummary:
    """Per-replicate metric values plus deterministic aggregates."""

    study: str
    replicates: int
    n: int
    master_seed: int
    seed_rule: str
    config: dict
    per_replicate: dict = field(default_factory=dict)
    aggregates: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "study": self.study,
            "replicates": self.replicates,
            "n": self.n,
            "master_seed": self.master_seed,
            "seed_rule": self.seed_rule,
            "config": self.config,
            "per_replicate": self.per_replicate,
            "aggregates": self.aggregates,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2)


def _parallel_map(fn, count: int, threads: int | None):
    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, range(count)))
    return [fn(i) for i in range(count)]


def size_study(
    family: str,
    theta0,
    n: int,
    replicates: int,
    alpha: float,
    seed: int,
    burn_in: int = 500,
    threads: int | None = None,
) -> MCSummary:
    """Empirical size of the composite test when the family is true.

    Simulates under (family, theta0), runs the composite test per replicate
    and aggregates the rejection rate with its binomial standard error
    sqrt(alpha*(1-alpha)/R).
    """
    if replicates < 100:
        raise ValueError("size studies need at least 100 replicates")
    spec0 = spec_from_theta(family, theta0)

    def one(i: int):
        traj = simulate(spec0, n=n, burn_in=burn_in, seed=replicate_seed(seed, i))
        report = run_test(traj.counts, family, alpha=alpha)
        return report.standardized, report.reject

    results = _parallel_map(one, replicates, threads)
    standardized = [r[0] for r in results]
    rejects = [bool(r[1]) for r in results]
    rate = sum(rejects) / replicates
    agg = {
        "rejection_rate": rate,
        "se": math.sqrt(alpha * (1.0 - alpha) / replicates),
        "mean_standardized": float(np.mean(standardized)),
        "var_standardized": float(np.var(standardized, ddof=1)),
    }
    return MCSummary(
        study="size",
        replicates=replicates,
        n=n,
        master_seed=int(seed),
        seed_rule=SEED_RULE,
        config={"family": family, "theta0": list(float(v) for v in spec0.params),
                "alpha": alpha, "burn_in": burn_in},
        per_replicate={"standardized": standardized, "reject": rejects},
        aggregates=agg,
    )


def normality_study(
    family: str,
    theta0,
    n: int,
    replicates: int,
    seed: int,
    mode: str = "oracle",
    burn_in: int = 500,
    threads: int | None = None,
) -> MCSummary:
    """Distribution of the standardized statistic under the null.

    ``oracle`` standardizes with the true simulated intensities; ``composite``
    refits the family per replicate.  Aggregates: mean, variance and the KS
    distance to the standard normal.
    """
    if replicates < 200:
        raise ValueError("normality studies need at least 200 replicates")
    if mode not in ("oracle", "composite"):
        raise ValueError(f"mode must be 'oracle' or 'composite', got {mode!r}")
    spec0 = spec_from_theta(family, theta0)

    def one(i: int):
        traj = simulate(spec0, n=n, burn_in=burn_in, seed=replicate_seed(seed, i))
        if mode == "oracle":
            return oracle_report(traj.counts, traj.intensities).standardized
        return run_test(traj.counts, family).standardized

    standardized = _parallel_map(one, replicates, threads)
    arr = np.asarray(standardized)
    agg = {
        "mean": float(arr.mean()),
        "variance": float(arr.var(ddof=1)),
        "ks_distance": ks_normal_distance(arr),
        "se_mean": float(arr.std(ddof=1) / math.sqrt(replicates)),
    }
    return MCSummary(
        study="normality",
        replicates=replicates,
        n=n,
        master_seed=int(seed),
        seed_rule=SEED_RULE,
        config={"family": family, "theta0": list(float(v) for v in spec0.params),
                "mode": mode, "burn_in": burn_in},
        per_replicate={"standardized": standardized},
        aggregates=agg,
    )


def mixing_study(
    spec: IntensitySpec,
    n_values,
    tail: int,
    replicates: int,
    seed: int,
    pool_size: int = 100_000,
    burn_in: int = 500,
) -> MCSummary:
    """Coalescence frequencies against the plug-in mixing bound at each gap n."""
    if replicates < 100:
        raise ValueError("mixing studies need at least 100 replicates")
    n_values = [int(v) for v in n_values]
    pool = simulate(spec, n=pool_size, burn_in=burn_in, seed=replicate_seed(seed, 0)).intensities

    per_rep = {}
    agg = {}
    for j, n in enumerate(n_values):
        rng = uniform_stream(replicate_seed(seed, j + 1))
        res = coalescence_experiment(spec, n, tail, replicates, rng, pool=pool)
        per_rep[f"disagree_n{n}"] = [float(v) for v in res.disagree]
        agg[f"estimate_n{n}"] = res.estimate
        agg[f"bound_n{n}"] = res.bound
        agg[f"se_n{n}"] = res.se
        agg[f"trunc_err_n{n}"] = res.trunc_err
    return MCSummary(
        study="mixing",
        replicates=replicates,
        n=max(n_values),
        master_seed=int(seed),
        seed_rule=SEED_RULE,
        config={"spec": spec.to_json_dict(), "n_values": n_values, "tail": tail,
                "pool_size": pool_size, "burn_in": burn_in},
        per_replicate=per_rep,
        aggregates=agg,
    )


def moment_study(
    spec: IntensitySpec,
    n: int,
    seed: int,
    kappa_bar: float,
    burn_in: int = 500,
    batches: int = 100,
) -> MCSummary:
    """Long-run first and second intensity moments against their a-priori bounds.

    Standard errors come from batch means (to absorb serial dependence); the
    ok flags record empirical <= bound + 3*SE.  Aggregates are computed on
    the first batches*(n//batches) retained steps so they reproduce exactly
    from the stored batch means.
    """
    if n < 10_000:
        raise ValueError("moment studies need n >= 10000")
    traj = simulate(spec, n=n, burn_in=burn_in, seed=seed)
    m = batches * (n // batches)
    lam = traj.intensities[:m]
    lam_batches = lam.reshape(batches, -1)
    mean_batch = lam_batches.mean(axis=1)
    sm_batch = (lam_batches ** 2).mean(axis=1)

    emp_mean = float(mean_batch.mean())
    emp_sm = float(sm_batch.mean())
    se_mean = float(mean_batch.std(ddof=1) / math.sqrt(batches))
    se_sm = float(sm_batch.std(ddof=1) / math.sqrt(batches))
    mb = mean_bound(spec)
    k0, smb = second_moment_bound(spec, kappa_bar)
    agg = {
        "empirical_mean": emp_mean,
        "mean_bound": mb,
        "se_mean": se_mean,
        "mean_ok": bool(emp_mean <= mb + 3.0 * se_mean),
        "empirical_second_moment": emp_sm,
        "second_moment_bound": smb,
        "k0": k0,
        "se_second_moment": se_sm,
        "second_moment_ok": bool(emp_sm <= smb + 3.0 * se_sm),
    }
    return MCSummary(
        study="moment",
        replicates=batches,
        n=n,
        master_seed=int(seed),
        seed_rule=SEED_RULE,
        config={"spec": spec.to_json_dict(), "kappa_bar": kappa_bar,
                "burn_in": burn_in, "batches": batches},
        per_replicate={"batch_mean": [float(v) for v in mean_batch],
                       "batch_second_moment": [float(v) for v in sm_batch]},
        aggregates=agg,
    )
