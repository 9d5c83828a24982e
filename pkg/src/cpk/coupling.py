"""Couplings of the count chain and the resulting mixing diagnostics.

Two chains driven by the same randomness are kept close by the additive
Poisson pair construction: at rates (a, b) with a <= b draw X ~ Poisson(a)
and an independent Z ~ Poisson(b - a) and hand the larger-rate chain X + Z.
Both marginals are exact, E|X1 - X2| = |a - b| and
P(X1 != X2) = 1 - exp(-|a - b|) <= |a - b|, so intensity gaps contract
geometrically and count paths coalesce; the observed coalescence frequency
is the empirical side of the plug-in absolute-regularity bound
2*E[lam]*kappa^(n-1)/(1-kappa1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import IntensitySpec, eval_intensity
from .simulate import Trajectory, simulate


def couple_poisson(lambda_a, lambda_b, rng: np.random.Generator):
    """Draw a coupled Poisson pair (X1, X2) with marginals (lambda_a, lambda_b).

    Scalar rates give a scalar pair; equal-length array rates give arrays
    coupled elementwise.  |X1 - X2| is Poisson(|lambda_a - lambda_b|), so the
    two draws agree exactly whenever the rates agree.
    """
    la = np.asarray(lambda_a, dtype=np.float64)
    lb = np.asarray(lambda_b, dtype=np.float64)
    if np.any(la < 0.0) or np.any(lb < 0.0):
        raise ValueError("Poisson rates must be non-negative")
    scalar = la.ndim == 0 and lb.ndim == 0
    la, lb = np.broadcast_arrays(la, lb)
    base = rng.poisson(np.minimum(la, lb))
    extra = rng.poisson(np.abs(la - lb))
    x1 = base + np.where(la > lb, extra, 0)
    x2 = base + np.where(lb > la, extra, 0)
    if scalar:
        return int(x1), int(x2)
    return x1.astype(np.int64), x2.astype(np.int64)


@dataclass(frozen=True)
class CoupledPath:
    """Two synchronized chains plus their per-step discrepancy record."""

    lambda_a: np.ndarray
    lambda_b: np.ndarray
    counts_a: np.ndarray
    counts_b: np.ndarray
    switch_point: int
    first_disagreement_after: int | None

    def __len__(self) -> int:
        return len(self.lambda_a)


def couple_chains(
    spec: IntensitySpec,
    lambda_a1: float,
    lambda_b1: float,
    horizon: int,
    rng: np.random.Generator,
) -> CoupledPath:
    """Run two coupled chains from (lambda_a1, lambda_b1) for `horizon` steps.

    At every step the count pair is drawn through :func:`couple_poisson` at
    the current intensity pair, then both intensities advance through f.
    The expected intensity gap contracts like kappa^(t-1) * |lambda_a1 -
    lambda_b1|.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if lambda_a1 < 0.0 or lambda_b1 < 0.0:
        raise ValueError("starting intensities must be non-negative")
    lam_a = np.empty(horizon)
    lam_b = np.empty(horizon)
    cnt_a = np.empty(horizon, dtype=np.int64)
    cnt_b = np.empty(horizon, dtype=np.int64)
    la, lb = float(lambda_a1), float(lambda_b1)
    for t in range(horizon):
        if t > 0:
            la = float(eval_intensity(spec, la, int(cnt_a[t - 1])))
            lb = float(eval_intensity(spec, lb, int(cnt_b[t - 1])))
        lam_a[t] = la
        lam_b[t] = lb
        cnt_a[t], cnt_b[t] = couple_poisson(la, lb, rng)
    return CoupledPath(
        lambda_a=lam_a,
        lambda_b=lam_b,
        counts_a=cnt_a,
        counts_b=cnt_b,
        switch_point=horizon,
        first_disagreement_after=_first_disagreement(cnt_a, cnt_b, horizon),
    )


def _first_disagreement(cnt_a, cnt_b, switch_point) -> int | None:
    # steps are 1-based; look from the switch point onwards
    diff = np.nonzero(cnt_a[switch_point - 1:] != cnt_b[switch_point - 1:])[0]
    if diff.size == 0:
        return None
    return switch_point + int(diff[0])


def beta_mixing_bound(spec: IntensitySpec, mean_lambda: float, n: int) -> float:
    """Plug-in absolute-regularity bound 2*mean_lambda*kappa^(n-1)/(1-kappa1).

    Pass ``mean_bound(spec)`` for a fully a-priori bound, or an empirical
    stationary mean for the plug-in version.
    """
    if mean_lambda < 0.0:
        raise ValueError("mean_lambda must be non-negative")
    if n < 1:
        raise ValueError("n must be >= 1")
    return 2.0 * mean_lambda * spec.kappa ** (n - 1) / (1.0 - spec.kappa1)


@dataclass(frozen=True)
class CoalescenceResult:
    """Empirical non-coalescence frequency against its plug-in bound."""

    estimate: float
    bound: float
    se: float
    trunc_err: float
    n: int
    tail: int
    replicates: int
    disagree: np.ndarray = field(repr=False, compare=False, default=None)


def coalescence_experiment(
    spec: IntensitySpec,
    n: int,
    tail: int,
    replicates: int,
    rng: np.random.Generator,
    pool: np.ndarray | None = None,
    pool_size: int = 100_000,
    burn_in: int = 500,
) -> CoalescenceResult:
    """Estimate how often two stationary-start coupled count paths disagree
    anywhere in steps n .. n+tail, and compare with the plug-in bound.

    Starting intensities are drawn independently (with replacement) from an
    empirical stationary pool; by default the pool is one presimulated
    trajectory of length `pool_size` after burn-in, seeded from `rng`.  The
    additive coupling runs unchanged through the whole horizon; the reported
    truncation error kappa1^tail * bound accounts for cutting the infinite
    tail of the disagreement event at `tail` steps.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if tail < 0:
        raise ValueError("tail must be >= 0")
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    if pool is None:
        pool_seed = int(rng.integers(0, 2**63))
        pool = simulate(spec, n=pool_size, burn_in=burn_in, seed=pool_seed).intensities
    pool = np.asarray(pool, dtype=np.float64)

    lam_a = pool[rng.integers(0, pool.size, replicates)]
    lam_b = pool[rng.integers(0, pool.size, replicates)]
    disagree = np.zeros(replicates, dtype=bool)
    for t in range(1, n + tail + 1):
        if t > 1:
            lam_a = eval_intensity(spec, lam_a, cnt_a)
            lam_b = eval_intensity(spec, lam_b, cnt_b)
        cnt_a, cnt_b = couple_poisson(lam_a, lam_b, rng)
        if t >= n:
            disagree |= cnt_a != cnt_b
    estimate = float(disagree.mean())
    bound = beta_mixing_bound(spec, float(pool.mean()), n)
    se = math.sqrt(estimate * (1.0 - estimate) / replicates)
    trunc_err = spec.kappa1 ** tail * bound
    return CoalescenceResult(
        estimate=estimate,
        bound=bound,
        se=se,
        trunc_err=trunc_err,
        n=n,
        tail=tail,
        replicates=replicates,
        disagree=disagree,
    )


@dataclass(frozen=True)
class RecoveryReport:
    """Outcome of reconstructing the previous state from each intensity."""

    max_lambda_error: float
    count_mismatches: int
    n_checked: int


def past_recovery_check(spec: IntensitySpec, trajectory: Trajectory) -> RecoveryReport:
    """Recover (lam_{t-1}, N_{t-1}) exactly from lam_t for the fractional family.

    Because g(lam) = c1 + s*lam/(1+lam) lies in [c1, 1/2), the update
    lam_t = g(lam_{t-1}) + N_{t-1}/2 splits cleanly: N_{t-1} = floor(2 lam_t)
    and g(lam_{t-1}) is the fractional part of 2 lam_t halved, inverted by
    g^{-1}(u) = r/(1-r) with r = (u - c1)/s.  The existence of this exact
    inversion is what rules out strong mixing of the intensity path.
    """
    if spec.family != "fractional":
        raise ValueError("past recovery requires the fractional family")
    c1, s = spec.params
    if s <= 0.0:
        raise ValueError("past recovery needs a strictly increasing g, i.e. s > 0")
    lam = trajectory.intensities
    counts = trajectory.counts
    if len(lam) < 2:
        raise ValueError("trajectory must have at least 2 steps")

    two_lam = 2.0 * lam[1:]
    rec_counts = np.floor(two_lam).astype(np.int64)
    g_vals = (two_lam - np.floor(two_lam)) / 2.0
    r = (g_vals - c1) / s
    rec_lams = r / (1.0 - r)

    count_mismatches = int(np.sum(rec_counts != counts[:-1]))
    max_lambda_error = float(np.max(np.abs(rec_lams - lam[:-1])))
    return RecoveryReport(
        max_lambda_error=max_lambda_error,
        count_mismatches=count_mismatches,
        n_checked=len(lam) - 1,
    )
