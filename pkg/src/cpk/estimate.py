"""Conditional maximum-likelihood estimation of intensity-family parameters.

The likelihood conditions on the first observation and on an arbitrary
starting intensity (default: the sample mean), exploiting the geometric
forgetting of the filter start.  The optimizer is a derivative-free simplex
search whose every trial point is projected into the contraction region, so
the estimate can never leave the parameter set on which the downstream
bounds and test statistics are defined.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import filter_kernel, nll_kernel
from .model import FAMILIES, PARAM_NAMES, IntensitySpec

PARAM_FLOOR = 1e-8
KAPPA_CAP = 1.0 - 1e-6
_PENALTY = 1e12


def spec_from_theta(family: str, theta) -> IntensitySpec:
    return IntensitySpec(family, tuple(float(v) for v in theta))


def _kappas(family: str, theta: np.ndarray) -> tuple[float, float]:
    if family == "linear":
        return theta[1], theta[2]
    if family == "expar":
        return theta[1] + theta[3], theta[2]
    return theta[1], 0.5


def region_violation(family: str, theta: np.ndarray) -> float:
    """Zero inside the admissible region, positive (and growing) outside."""
    v = float(np.sum(np.maximum(0.0, PARAM_FLOOR - theta)))
    k1, k2 = _kappas(family, theta)
    v += max(0.0, k1 + k2 - KAPPA_CAP)
    if family == "fractional":
        # keep g(lam) = c1 + s*lam/(1+lam) strictly below 1/2
        v += max(0.0, theta[0] + theta[1] - (0.5 - 1e-6))
    return v


def project_theta(family: str, theta: np.ndarray) -> np.ndarray:
    """Project a trial point into the admissible region (floor, kappa cap)."""
    theta = np.maximum(np.asarray(theta, dtype=np.float64), PARAM_FLOOR)
    if family == "linear":
        s = theta[1] + theta[2]
        if s > KAPPA_CAP:
            theta[1:3] *= KAPPA_CAP / s
    elif family == "expar":
        s = theta[1] + theta[2] + theta[3]
        if s > KAPPA_CAP:
            theta[[1, 2, 3]] *= KAPPA_CAP / s
    else:
        s = theta[0] + theta[1]
        if s > 0.5 - 1e-6:
            theta[:2] *= (0.5 - 1e-6) / s
    return theta


def filtered_intensities(spec: IntensitySpec, counts, lambda_start: float | None = None) -> np.ndarray:
    """Filter lam_t forward from counts: lam_1 = lambda_start, lam_t = f(lam_{t-1}, N_{t-1})."""
    counts = np.ascontiguousarray(counts, dtype=np.int64)
    if counts.size == 0:
        raise ValueError("counts must not be empty")
    if lambda_start is None:
        lambda_start = float(counts.mean())
    if lambda_start < 0.0:
        raise ValueError("lambda_start must be non-negative")
    out = np.empty(counts.size)
    filter_kernel(spec.family_code, spec.params_array, counts, float(lambda_start), out)
    return out


def neg_log_likelihood(family: str, theta, counts, lambda_start: float | None = None) -> float:
    """Poisson conditional negative log-likelihood (terms t >= 2, log N_t! dropped).

    Outside the admissible parameter region this returns a large finite
    penalty instead of raising, so simplex searches can probe freely.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    theta = np.asarray(theta, dtype=np.float64)
    counts = np.ascontiguousarray(counts, dtype=np.int64)
    if counts.size < 2:
        raise ValueError("need at least 2 observations")
    if lambda_start is None:
        lambda_start = float(counts.mean())
    v = region_violation(family, theta)
    if v > 0.0:
        return _PENALTY * (1.0 + v)
    code = {"linear": 0, "expar": 1, "fractional": 2}[family]
    return float(nll_kernel(code, theta, counts, float(lambda_start)))


@dataclass(frozen=True)
class EstimationResult:
    family: str
    theta_hat: tuple[float, ...]
    neg_loglik: float
    converged: bool
    iterations: int
    n: int
    degenerate_data: bool = False

    @property
    def spec(self) -> IntensitySpec:
        return spec_from_theta(self.family, self.theta_hat)

    def theta_dict(self) -> dict:
        return dict(zip(PARAM_NAMES[self.family], self.theta_hat))

    def to_json_dict(self) -> dict:
        return {
            "family": self.family,
            "theta_hat": self.theta_dict(),
            "neg_loglik": self.neg_loglik,
            "converged": self.converged,
            "iterations": self.iterations,
            "n": self.n,
            "degenerate_data": self.degenerate_data,
        }


def default_theta_init(family: str, counts) -> np.ndarray:
    """Moment-flavoured starting point: match the sample mean at mild feedback."""
    m = float(np.mean(counts))
    if family == "linear":
        theta = np.array([max(m, 0.5) * 0.4, 0.3, 0.3])
    elif family == "expar":
        theta = np.array([max(m, 0.5) * 0.3, 0.3, 0.3, 0.1, 1.0])
    else:
        theta = np.array([min(max(0.5 * m, 0.05), 0.4), 0.1])
    return project_theta(family, theta)


def _nelder_mead(fn, x0, max_iter, diam_tol, project):
    """Projected Nelder-Mead; returns (x_best, f_best, iterations, converged)."""
    dim = x0.size
    sim = np.empty((dim + 1, dim))
    sim[0] = project(x0)
    for i in range(dim):
        x = np.array(sim[0])
        h = 0.05 * abs(x[i]) if x[i] != 0.0 else 0.00025
        x[i] += h
        sim[i + 1] = project(x)
    fvals = np.array([fn(s) for s in sim])

    iterations = 0
    converged = False
    while iterations < max_iter:
        order = np.argsort(fvals, kind="stable")
        sim = sim[order]
        fvals = fvals[order]
        if np.max(np.abs(sim[1:] - sim[0])) < diam_tol:
            converged = True
            break
        iterations += 1

        centroid = sim[:-1].mean(axis=0)
        xr = project(centroid + (centroid - sim[-1]))
        fr = fn(xr)
        if fr < fvals[0]:
            xe = project(centroid + 2.0 * (centroid - sim[-1]))
            fe = fn(xe)
            if fe < fr:
                sim[-1], fvals[-1] = xe, fe
            else:
                sim[-1], fvals[-1] = xr, fr
        elif fr < fvals[-2]:
            sim[-1], fvals[-1] = xr, fr
        else:
            xc = project(centroid + 0.5 * (sim[-1] - centroid))
            fc = fn(xc)
            if fc < fvals[-1]:
                sim[-1], fvals[-1] = xc, fc
            else:
                for i in range(1, dim + 1):
                    sim[i] = project(sim[0] + 0.5 * (sim[i] - sim[0]))
                    fvals[i] = fn(sim[i])

    order = np.argsort(fvals, kind="stable")
    return sim[order[0]], float(fvals[order[0]]), iterations, converged


def fit_cmle(
    family: str,
    counts,
    theta_init=None,
    options: dict | None = None,
) -> EstimationResult:
    """Fit an intensity family by conditional maximum likelihood.

    Options: ``max_iter`` (default 2000), ``diam_tol`` (default 1e-8,
    simplex-diameter convergence threshold) and ``lambda_start`` (filter
    start, default: sample mean).  All-zero data short-circuits to the
    boundary estimate with ``degenerate_data=True``.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    counts = np.ascontiguousarray(counts, dtype=np.int64)
    if counts.size < 50:
        raise ValueError(f"need at least 50 observations, got {counts.size}")
    opts = {"max_iter": 2000, "diam_tol": 1e-8, "lambda_start": None}
    if options:
        unknown = set(options) - set(opts)
        if unknown:
            raise ValueError(f"unknown options: {sorted(unknown)}")
        opts.update(options)
    lambda_start = opts["lambda_start"]
    if lambda_start is None:
        lambda_start = float(counts.mean())

    if not np.any(counts):
        theta = project_theta(family, np.full(len(PARAM_NAMES[family]), PARAM_FLOOR))
        nll = neg_log_likelihood(family, theta, counts, lambda_start)
        return EstimationResult(
            family=family,
            theta_hat=tuple(theta),
            neg_loglik=nll,
            converged=True,
            iterations=0,
            n=int(counts.size),
            degenerate_data=True,
        )

    if theta_init is None:
        theta_init = default_theta_init(family, counts)
    theta_init = np.asarray(theta_init, dtype=np.float64)

    def objective(theta):
        return neg_log_likelihood(family, theta, counts, lambda_start)

    def project(theta):
        return project_theta(family, theta)

    x, fval, iterations, converged = _nelder_mead(
        objective, theta_init, opts["max_iter"], opts["diam_tol"], project
    )
    return EstimationResult(
        family=family,
        theta_hat=tuple(x),
        neg_loglik=fval,
        converged=converged,
        iterations=iterations,
        n=int(counts.size),
    )
