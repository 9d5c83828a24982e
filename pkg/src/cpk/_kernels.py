"""Numba kernels for the sequential recursions.

Everything that iterates over time lives here, compiled once and shared by
the public modules.  All intensity evaluations in the package route through
``eval_intensity_kernel`` so that simulation, filtering and reconstruction
produce bit-identical floating-point sequences.
"""

import numpy as np
from numba import njit

LINEAR = 0
EXPAR = 1
FRACTIONAL = 2


@njit(cache=True, nogil=True)
def eval_intensity_kernel(family, params, lam, y):
    if family == LINEAR:
        # params = (theta0, theta1, theta2)
        return params[0] + params[1] * lam + params[2] * y
    elif family == EXPAR:
        # params = (d, a, b, c, gamma)
        return params[0] + (params[1] + params[3] * np.exp(-params[4] * lam * lam)) * lam + params[2] * y
    else:
        # params = (c1, s); g(lam) = c1 + s*lam/(1+lam)
        return params[0] + params[1] * lam / (1.0 + lam) + 0.5 * y


@njit(cache=True, nogil=True)
def eval_intensity_array(family, params, lams, ys, out):
    for i in range(lams.shape[0]):
        out[i] = eval_intensity_kernel(family, params, lams[i], ys[i])


@njit(cache=True, nogil=True)
def poisson_quantile_kernel(lam, u):
    """Smallest k with Poisson(lam) CDF(k) >= u, for 0 <= u < 1."""
    if lam == 0.0:
        return 0
    if lam <= 700.0:
        p = np.exp(-lam)
        c = p
        k = 0
        while c < u:
            k += 1
            p *= lam / k
            c_new = c + p
            if c_new == c:
                # CDF saturated in float64; no larger quantile is reachable
                break
            c = c_new
        return k
    # exp(-lam) underflows: accumulate the CDF in log space
    logu = np.log(u)
    logp = -lam
    logc = -lam
    k = 0
    while logc < logu:
        k += 1
        logp += np.log(lam / k)
        logc_new = np.logaddexp(logc, logp)
        if logc_new == logc:
            break
        logc = logc_new
    return k


@njit(cache=True, nogil=True)
def simulate_kernel(family, params, lambda_start, uniforms, counts_out, lams_out):
    lam = lambda_start
    for t in range(uniforms.shape[0]):
        if t > 0:
            lam = eval_intensity_kernel(family, params, lam, float(counts_out[t - 1]))
        lams_out[t] = lam
        counts_out[t] = poisson_quantile_kernel(lam, uniforms[t])


@njit(cache=True, nogil=True)
def filter_kernel(family, params, counts, lambda_start, out):
    out[0] = lambda_start
    for t in range(1, counts.shape[0]):
        out[t] = eval_intensity_kernel(family, params, out[t - 1], float(counts[t - 1]))


@njit(cache=True, nogil=True)
def nll_kernel(family, params, counts, lambda_start):
    """Poisson conditional negative log-likelihood, terms t >= 2, log floored at 1e-10."""
    lam = lambda_start
    total = 0.0
    for t in range(1, counts.shape[0]):
        lam = eval_intensity_kernel(family, params, lam, float(counts[t - 1]))
        guarded = lam if lam > 1e-10 else 1e-10
        total += lam - counts[t] * np.log(guarded)
    return total


@njit(cache=True, nogil=True)
def reconstruct_all_kernel(family, params, counts, depth, out):
    """Depth-d intensity reconstruction from counts, zero-initialised, for every
    target index tau in [depth, len(counts)); out has length len(counts) - depth."""
    n = counts.shape[0]
    for i in range(n - depth):
        lam = 0.0
        for j in range(depth):
            lam = eval_intensity_kernel(family, params, lam, float(counts[i + j]))
        out[i] = lam
