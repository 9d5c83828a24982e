"""Contractive intensity families and their closed-form bounds.

The intensity map ``f(lam, y)`` drives the count recursion: counts are
conditionally Poisson with rate ``lam_t`` and ``lam_t = f(lam_{t-1}, N_{t-1})``.
Every family shipped here is Lipschitz with constants ``kappa1`` (in the
intensity argument) and ``kappa2`` (in the count argument) with
``kappa1 + kappa2 < 1``, which is what guarantees a unique stationary law
and everything downstream (mixing bounds, reconstruction, test asymptotics).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from ._kernels import (
    EXPAR,
    FRACTIONAL,
    LINEAR,
    eval_intensity_array,
    eval_intensity_kernel,
)

FAMILIES = ("linear", "expar", "fractional")

PARAM_NAMES = {
    "linear": ("theta0", "theta1", "theta2"),
    "expar": ("d", "a", "b", "c", "gamma"),
    "fractional": ("c1", "s"),
}

_FAMILY_CODES = {"linear": LINEAR, "expar": EXPAR, "fractional": FRACTIONAL}

#: absolute tolerance used for float comparisons throughout the package
FLOAT_TOL = 1e-12


class ContractionError(ValueError):
    """Raised when parameters violate the kappa1 + kappa2 < 1 requirement."""


@dataclass(frozen=True)
class IntensitySpec:
    """A parametric intensity map with declared Lipschitz constants.

    Families
    --------
    linear      f(lam, y) = theta0 + theta1*lam + theta2*y
    expar       f(lam, y) = d + (a + c*exp(-gamma*lam^2))*lam + b*y
    fractional  f(lam, y) = g(lam) + y/2  with  g(lam) = c1 + s*lam/(1+lam)

    ``kappa1``/``kappa2`` default to the family's closed-form constants
    (linear: theta1, theta2; expar: a+c, b; fractional: s, 1/2) and can be
    overridden only for exercising :func:`validate_contraction`.
    """

    family: str
    params: tuple[float, ...]
    kappa1: float = None  # type: ignore[assignment]
    kappa2: float = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        names = PARAM_NAMES[self.family]
        params = tuple(float(p) for p in self.params)
        if len(params) != len(names):
            raise ValueError(
                f"{self.family} needs {len(names)} parameters {names}, got {len(params)}"
            )
        if any(p < 0.0 for p in params):
            raise ValueError(f"{self.family} parameters must be non-negative, got {params}")
        object.__setattr__(self, "params", params)

        k1, k2 = _default_kappas(self.family, params)
        if self.kappa1 is None:
            object.__setattr__(self, "kappa1", k1)
        if self.kappa2 is None:
            object.__setattr__(self, "kappa2", k2)
        object.__setattr__(self, "kappa1", float(self.kappa1))
        object.__setattr__(self, "kappa2", float(self.kappa2))
        if self.kappa1 < 0.0 or self.kappa2 < 0.0:
            raise ValueError("kappa1 and kappa2 must be non-negative")
        ksum = self.kappa1 + self.kappa2
        if ksum >= 1.0:
            raise ContractionError(f"contraction violated: kappa1+kappa2={ksum:g}")

        if self.family == "fractional":
            c1, s = params
            if not (c1 > 0.0 and c1 + s < 0.5):
                raise ValueError(
                    f"fractional family requires c1 > 0 and c1 + s < 1/2, got c1={c1}, s={s}"
                )

    # -- constructors -----------------------------------------------------

    @classmethod
    def linear(cls, theta0: float, theta1: float, theta2: float) -> "IntensitySpec":
        return cls("linear", (theta0, theta1, theta2))

    @classmethod
    def expar(cls, d: float, a: float, b: float, c: float, gamma: float) -> "IntensitySpec":
        return cls("expar", (d, a, b, c, gamma))

    @classmethod
    def fractional(cls, c1: float, s: float) -> "IntensitySpec":
        return cls("fractional", (c1, s))

    # -- derived quantities ------------------------------------------------

    @property
    def kappa(self) -> float:
        return self.kappa1 + self.kappa2

    @property
    def family_code(self) -> int:
        return _FAMILY_CODES[self.family]

    @property
    def params_array(self) -> np.ndarray:
        return np.asarray(self.params, dtype=np.float64)

    def param_dict(self) -> dict:
        return dict(zip(PARAM_NAMES[self.family], self.params))

    # -- JSON wire format ---------------------------------------------------

    def to_json_dict(self) -> dict:
        return {"family": self.family, "params": self.param_dict()}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, obj: dict) -> "IntensitySpec":
        extra = set(obj) - {"family", "params"}
        if extra:
            raise ValueError(f"unknown keys in intensity spec JSON: {sorted(extra)}")
        if "family" not in obj or "params" not in obj:
            raise ValueError("intensity spec JSON needs 'family' and 'params'")
        family = obj["family"]
        if family not in FAMILIES:
            raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
        names = PARAM_NAMES[family]
        pobj = obj["params"]
        extra = set(pobj) - set(names)
        if extra:
            raise ValueError(f"unknown params for family {family!r}: {sorted(extra)}")
        missing = set(names) - set(pobj)
        if missing:
            raise ValueError(f"missing params for family {family!r}: {sorted(missing)}")
        return cls(family, tuple(float(pobj[k]) for k in names))

    @classmethod
    def from_json(cls, text: str) -> "IntensitySpec":
        return cls.from_json_dict(json.loads(text))


def _default_kappas(family: str, params: tuple) -> tuple[float, float]:
    if family == "linear":
        return params[1], params[2]
    if family == "expar":
        d, a, b, c, gamma = params
        return a + c, b
    c1, s = params
    return s, 0.5


def eval_intensity(spec: IntensitySpec, lam, y):
    """Evaluate f(lam, y).

    Accepts scalars or equally shaped arrays; array inputs are evaluated
    elementwise through the same compiled kernel the simulator uses, so
    results agree bit-for-bit with simulated recursions.
    """
    lam_arr = np.asarray(lam, dtype=np.float64)
    if np.any(lam_arr < 0.0):
        raise ValueError("lambda must be non-negative")
    y_arr = np.asarray(y, dtype=np.float64)
    if np.any(y_arr < 0.0):
        raise ValueError("count must be non-negative")
    if lam_arr.ndim == 0 and y_arr.ndim == 0:
        return eval_intensity_kernel(spec.family_code, spec.params_array, float(lam_arr), float(y_arr))
    lam_b, y_b = np.broadcast_arrays(lam_arr, y_arr)
    out = np.empty(lam_b.shape, dtype=np.float64)
    eval_intensity_array(
        spec.family_code,
        spec.params_array,
        np.ascontiguousarray(lam_b, dtype=np.float64).ravel(),
        np.ascontiguousarray(y_b, dtype=np.float64).ravel(),
        out.ravel(),
    )
    return out


@dataclass(frozen=True)
class ValidationReport:
    """Result of the grid Lipschitz check."""

    passed: bool
    worst_ratio: float
    grid_size: int
    lambda_max: float


def validate_contraction(spec: IntensitySpec, grid_size: int = 41, lambda_max: float = 10.0) -> ValidationReport:
    """Check |f(l,y) - f(l',y')| <= kappa1|l-l'| + kappa2|y-y'| on a grid.

    All pairs from a uniform lambda grid on [0, lambda_max] crossed with
    y in {0, ..., ceil(lambda_max)} are tested.  Passes iff the worst ratio
    |df| / (kappa1|dl| + kappa2|dy|) is <= 1 + 1e-12.  A pair with zero
    denominator and nonzero numerator yields an infinite ratio (fail).
    """
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    if lambda_max <= 0.0:
        raise ValueError("lambda_max must be positive")
    lams = np.linspace(0.0, lambda_max, grid_size)
    ys = np.arange(0, math.ceil(lambda_max) + 1, dtype=np.float64)
    L, Y = np.meshgrid(lams, ys, indexing="ij")
    L = L.ravel()
    Y = Y.ravel()
    F = eval_intensity(spec, L, Y)

    dF = np.abs(F[:, None] - F[None, :])
    denom = spec.kappa1 * np.abs(L[:, None] - L[None, :]) + spec.kappa2 * np.abs(Y[:, None] - Y[None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(denom > 0.0, dF / denom, np.where(dF > 0.0, np.inf, 0.0))
    worst = float(ratio.max())
    return ValidationReport(passed=worst <= 1.0 + FLOAT_TOL, worst_ratio=worst,
                            grid_size=grid_size, lambda_max=lambda_max)


def mean_bound(spec: IntensitySpec) -> float:
    """Upper bound f(0,0)/(1 - kappa) for the stationary mean intensity."""
    f00 = eval_intensity(spec, 0.0, 0)
    return f00 / (1.0 - spec.kappa)


def conditional_mean_bound(spec: IntensitySpec, lambda1: float, t: int) -> float:
    """Upper bound for E(lam_t | lam_1): f(0,0)(1-kappa^(t-1))/(1-kappa) + kappa^(t-1) lam_1."""
    if lambda1 < 0.0:
        raise ValueError("lambda1 must be non-negative")
    if t < 1:
        raise ValueError("t must be >= 1")
    f00 = eval_intensity(spec, 0.0, 0)
    k = spec.kappa
    kt = k ** (t - 1)
    return f00 * (1.0 - kt) / (1.0 - k) + kt * lambda1


def second_moment_bound(spec: IntensitySpec, kappa_bar: float) -> tuple[float, float]:
    """Drift constant K0 and the bound K0/(1 - kappa_bar) for the stationary
    second moment of the intensity.

    K0 is the maximum over lam >= 0 of
        (f(0,0) + kappa*lam)^2 + kappa2^2*lam - kappa_bar*lam^2,
    a concave quadratic in lam whenever kappa_bar > kappa^2, so the maximum
    is closed-form.  Any kappa_bar in (kappa^2, 1) yields a valid bound; the
    smaller kappa_bar is, the smaller the geometric tail factor 1/(1 -
    kappa_bar).

    Returns (K0, bound).
    """
    k = spec.kappa
    if not (k * k < kappa_bar < 1.0):
        raise ValueError(
            f"kappa_bar must lie in (kappa^2, 1) = ({k * k:g}, 1), got {kappa_bar:g}"
        )
    f00 = eval_intensity(spec, 0.0, 0)
    # quadratic (k^2 - kbar) lam^2 + (2 f00 k + kappa2^2) lam + f00^2
    a2 = k * k - kappa_bar
    a1 = 2.0 * f00 * k + spec.kappa2 ** 2
    a0 = f00 * f00
    if a1 == 0.0:
        k0 = a0
    else:
        lam_star = -a1 / (2.0 * a2)  # a2 < 0, a1 >= 0 -> lam_star >= 0
        k0 = a0 + a1 * lam_star + a2 * lam_star * lam_star
    return k0, k0 / (1.0 - kappa_bar)
