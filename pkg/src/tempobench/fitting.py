"""Maximum-likelihood estimation of the four duration families.

Normal and Log-Normal have closed-form MLEs (n-denominator standard
deviations).  Weibull and Gamma reduce to one-dimensional shape equations
solved by safeguarded Newton iteration, with method-of-moments starting
points and a bisection-style fallback bracket of [1e-3, 1e3] on the shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import distributions as dist
from . import special
from .dataset import Dataset
from .distributions import (
    DurationModel,
    Family,
    FamilyParams,
    GammaParams,
    LogNormalParams,
    NormalParams,
    WeibullParams,
)
from .errors import DegenerateDataError, SupportError

MAX_ITERATIONS = 200
RESIDUAL_TOL = 1e-10
SHAPE_BRACKET = (1e-3, 1e3)


@dataclass(frozen=True)
class FitResult:
    model: DurationModel
    log_likelihood: float
    k: int
    converged: bool
    iterations: int


def _checked_samples(family: Family, data: Dataset) -> np.ndarray:
    xs = data.samples
    if xs.size < 2:
        raise ValueError(f"fitting needs n >= 2 samples, got {xs.size}")
    if family is not Family.NORMAL and np.any(xs <= 0.0):
        raise SupportError(
            f"{family.value} fitting requires strictly positive samples"
        )
    return xs


def moment_init(family: Family, data: Dataset) -> FamilyParams:
    """Method-of-moments starting parameters for the MLE iteration."""
    xs = _checked_samples(family, data)
    if family in (Family.NORMAL, Family.LOGNORMAL):
        vals = xs if family is Family.NORMAL else np.log(xs)
        m = float(np.mean(vals))
        sd = float(np.std(vals))
        if sd == 0.0:
            raise DegenerateDataError("zero sample variance")
        cls = NormalParams if family is Family.NORMAL else LogNormalParams
        return cls(m, sd)

    m = float(np.mean(xs))
    v = float(np.var(xs))
    if v == 0.0:
        raise DegenerateDataError("zero sample variance")
    if family is Family.GAMMA:
        return GammaParams(shape=m * m / v, rate=m / v)

    # Weibull: solve the coefficient-of-variation relation coarsely.
    shape0 = _weibull_shape_from_cv(math.sqrt(v) / m)
    scale0 = m / math.exp(special.lngamma(1.0 + 1.0 / shape0))
    return WeibullParams(shape=shape0, scale=scale0)


def _weibull_shape_from_cv(cv: float) -> float:
    # 1 + cv^2 = Gamma(1 + 2/g) / Gamma(1 + 1/g)^2, decreasing in g.
    target = math.log1p(cv * cv)

    def h(g: float) -> float:
        return (
            special.lngamma(1.0 + 2.0 / g)
            - 2.0 * special.lngamma(1.0 + 1.0 / g)
            - target
        )

    lo, hi = 0.05, 50.0
    if h(lo) < 0.0 or h(hi) > 0.0:
        return 1.0
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if h(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def fit_mle(family: Family, data: Dataset) -> FitResult:
    """Fit one family by maximum likelihood.

    Non-convergence of the shape iteration is reported through
    ``converged=False``, not raised; support violations raise.
    """
    xs = _checked_samples(family, data)
    if float(np.var(xs)) == 0.0:
        raise DegenerateDataError("all samples equal; refusing zero-variance fit")

    if family is Family.NORMAL:
        params: FamilyParams = NormalParams(float(np.mean(xs)), float(np.std(xs)))
        converged, iterations = True, 0
    elif family is Family.LOGNORMAL:
        logs = np.log(xs)
        params = LogNormalParams(float(np.mean(logs)), float(np.std(logs)))
        converged, iterations = True, 0
    elif family is Family.WEIBULL:
        params, converged, iterations = _fit_weibull(xs)
    else:
        params, converged, iterations = _fit_gamma(xs)

    model = DurationModel(family, params)
    return FitResult(
        model=model,
        log_likelihood=dist.log_likelihood(model, xs),
        k=2,
        converged=converged,
        iterations=iterations,
    )


def _fit_weibull(xs: np.ndarray) -> tuple[WeibullParams, bool, int]:
    logs = np.log(xs)
    log_mean = float(np.mean(logs))
    log_max = float(np.max(logs))
    n = xs.size

    def score_and_slope(g: float) -> tuple[float, float]:
        # Profile score g(shape) and its derivative; weights are shifted by
        # the max log to keep x^shape finite for large shapes.
        w = np.exp(g * (logs - log_max))
        s0 = float(np.sum(w))
        s1 = float(np.sum(w * logs))
        s2 = float(np.sum(w * logs * logs))
        r = s1 / s0
        score = r - 1.0 / g - log_mean
        slope = (s2 / s0 - r * r) + 1.0 / (g * g)
        return score, slope

    lo, hi = SHAPE_BRACKET
    try:
        init = moment_init(Family.WEIBULL, Dataset("init", xs))
        g = min(max(init.shape, lo * 1.01), hi * 0.99)  # type: ignore[union-attr]
    except DegenerateDataError:  # pragma: no cover - guarded by caller
        g = 1.0

    converged = False
    iterations = 0
    for iterations in range(1, MAX_ITERATIONS + 1):
        score, slope = score_and_slope(g)
        scale = max(1.0, abs(log_mean), 1.0 / g)
        if abs(score) < RESIDUAL_TOL * scale:
            converged = True
            break
        if score > 0.0:
            hi = min(hi, g)
        else:
            lo = max(lo, g)
        step = score / slope
        nxt = g - step
        if not math.isfinite(nxt) or not (lo < nxt < hi):
            nxt = 0.5 * (lo + hi)
        g = nxt

    # Stable scale: alpha = (sum x^g / n)^(1/g) via the shifted weights.
    w = np.exp(g * (logs - log_max))
    log_alpha = log_max + (math.log(float(np.sum(w))) - math.log(n)) / g
    return WeibullParams(shape=g, scale=math.exp(log_alpha)), converged, iterations


def _fit_gamma(xs: np.ndarray) -> tuple[GammaParams, bool, int]:
    m = float(np.mean(xs))
    s = math.log(m) - float(np.mean(np.log(xs)))  # > 0 unless degenerate

    lo, hi = SHAPE_BRACKET
    init = moment_init(Family.GAMMA, Dataset("init", xs))
    g = min(max(init.shape, lo * 1.01), hi * 0.99)  # type: ignore[union-attr]

    converged = False
    iterations = 0
    for iterations in range(1, MAX_ITERATIONS + 1):
        score = math.log(g) - special.digamma(g) - s
        if abs(score) < RESIDUAL_TOL * max(1.0, s):
            converged = True
            break
        if score > 0.0:
            lo = max(lo, g)  # log g - digamma(g) decreases in g
        else:
            hi = min(hi, g)
        slope = 1.0 / g - special.trigamma(g)
        nxt = g - score / slope
        if not math.isfinite(nxt) or not (lo < nxt < hi):
            nxt = 0.5 * (lo + hi)
        g = nxt

    return GammaParams(shape=g, rate=g / m), converged, iterations
