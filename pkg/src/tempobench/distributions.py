"""The four candidate duration families: Normal, Weibull, Gamma, Log-Normal.

Parameterizations follow the usual conventions for task-duration work:
Weibull carries (shape, scale), Gamma carries (shape, rate), Log-Normal
carries the mean and standard deviation of the log of the variable, and
Normal carries plain (mean, sd).  All evaluation functions are pure, and
models are immutable and hashable, so they can be shared freely across
threads.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from . import special
from .dataset import Dataset

__all__ = [
    "Family",
    "NormalParams",
    "WeibullParams",
    "GammaParams",
    "LogNormalParams",
    "DurationModel",
    "normal",
    "weibull",
    "gamma",
    "lognormal",
    "pdf",
    "logpdf",
    "cdf",
    "quantile",
    "pdf_values",
    "cdf_values",
    "sample",
    "sample_values",
    "log_likelihood",
    "model_to_text",
    "model_from_text",
    "model_to_dict",
    "model_from_dict",
    "model_from_json",
]

_LOG_SQRT2PI = 0.5 * math.log(2.0 * math.pi)
_FLOAT_EPS = 2.220446049250313e-16


class Family(str, enum.Enum):
    NORMAL = "normal"
    WEIBULL = "weibull"
    GAMMA = "gamma"
    LOGNORMAL = "lognormal"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


def _require_positive(name: str, value: float) -> None:
    if not (math.isfinite(value) and value > 0.0):
        raise ValueError(f"{name} must be finite and > 0, got {value}")


@dataclass(frozen=True)
class NormalParams:
    mu: float
    sigma: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.mu):
            raise ValueError(f"mu must be finite, got {self.mu}")
        _require_positive("sigma", self.sigma)


@dataclass(frozen=True)
class WeibullParams:
    shape: float
    scale: float

    def __post_init__(self) -> None:
        _require_positive("shape", self.shape)
        _require_positive("scale", self.scale)


@dataclass(frozen=True)
class GammaParams:
    shape: float
    rate: float

    def __post_init__(self) -> None:
        _require_positive("shape", self.shape)
        _require_positive("rate", self.rate)


@dataclass(frozen=True)
class LogNormalParams:
    mu: float
    sigma: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.mu):
            raise ValueError(f"mu must be finite, got {self.mu}")
        _require_positive("sigma", self.sigma)


FamilyParams = Union[NormalParams, WeibullParams, GammaParams, LogNormalParams]

_PARAM_TYPES: dict[Family, type] = {
    Family.NORMAL: NormalParams,
    Family.WEIBULL: WeibullParams,
    Family.GAMMA: GammaParams,
    Family.LOGNORMAL: LogNormalParams,
}


@dataclass(frozen=True)
class DurationModel:
    """A family tag plus that family's parameters."""

    family: Family
    params: FamilyParams

    def __post_init__(self) -> None:
        expected = _PARAM_TYPES[self.family]
        if type(self.params) is not expected:
            raise ValueError(
                f"params for family {self.family.value!r} must be "
                f"{expected.__name__}, got {type(self.params).__name__}"
            )

    def param_dict(self) -> dict[str, float]:
        p = self.params
        if isinstance(p, NormalParams):
            return {"mu": p.mu, "sigma": p.sigma}
        if isinstance(p, WeibullParams):
            return {"shape": p.shape, "scale": p.scale}
        if isinstance(p, GammaParams):
            return {"shape": p.shape, "rate": p.rate}
        return {"mu": p.mu, "sigma": p.sigma}


def normal(mu: float, sigma: float) -> DurationModel:
    return DurationModel(Family.NORMAL, NormalParams(mu, sigma))


def weibull(shape: float, scale: float) -> DurationModel:
    return DurationModel(Family.WEIBULL, WeibullParams(shape, scale))


def gamma(shape: float, rate: float) -> DurationModel:
    return DurationModel(Family.GAMMA, GammaParams(shape, rate))


def lognormal(mu: float, sigma: float) -> DurationModel:
    return DurationModel(Family.LOGNORMAL, LogNormalParams(mu, sigma))


# ---------------------------------------------------------------------------
# density / distribution / quantile
# ---------------------------------------------------------------------------

def logpdf(model: DurationModel, x: float) -> float:
    """Natural log of the density at x; -inf outside the support."""
    p = model.params
    if isinstance(p, NormalParams):
        z = (x - p.mu) / p.sigma
        return -0.5 * z * z - math.log(p.sigma) - _LOG_SQRT2PI
    if x <= 0.0:
        return -math.inf
    if isinstance(p, WeibullParams):
        t = x / p.scale
        return (
            math.log(p.shape / p.scale)
            + (p.shape - 1.0) * math.log(t)
            - t ** p.shape
        )
    if isinstance(p, GammaParams):
        return (
            p.shape * math.log(p.rate)
            + (p.shape - 1.0) * math.log(x)
            - p.rate * x
            - special.lngamma(p.shape)
        )
    z = (math.log(x) - p.mu) / p.sigma
    return -0.5 * z * z - math.log(x * p.sigma) - _LOG_SQRT2PI


def pdf(model: DurationModel, x: float) -> float:
    """Density at x (1/seconds); zero at and below 0 for the positive families."""
    lp = logpdf(model, x)
    if lp == -math.inf:
        return 0.0
    try:
        return math.exp(lp)
    except OverflowError:
        return math.inf


def cdf(model: DurationModel, x: float) -> float:
    """Distribution function at x, exact (no clamping)."""
    p = model.params
    if isinstance(p, NormalParams):
        return special.normal_cdf((x - p.mu) / p.sigma)
    if x <= 0.0:
        return 0.0
    if isinstance(p, WeibullParams):
        return -math.expm1(-((x / p.scale) ** p.shape))
    if isinstance(p, GammaParams):
        return special.gammainc_lower(p.shape, p.rate * x)
    return special.normal_cdf((math.log(x) - p.mu) / p.sigma)


def quantile(model: DurationModel, prob: float) -> float:
    """Inverse CDF on 0 < prob < 1.

    Closed form for Normal, Weibull and Log-Normal; safeguarded
    Newton/bisection on the CDF for Gamma.
    """
    if not 0.0 < prob < 1.0:
        raise ValueError(f"quantile requires 0 < p < 1, got {prob}")
    p = model.params
    if isinstance(p, NormalParams):
        return p.mu + p.sigma * special.normal_quantile(prob)
    if isinstance(p, WeibullParams):
        return p.scale * (-math.log1p(-prob)) ** (1.0 / p.shape)
    if isinstance(p, LogNormalParams):
        return math.exp(p.mu + p.sigma * special.normal_quantile(prob))
    return _gamma_quantile(p.shape, p.rate, prob)


def _gamma_quantile(shape: float, rate: float, prob: float) -> float:
    # Work on the unit-rate distribution, rescale at the end.  The solver
    # runs Newton on log cdf(exp(y)) = log prob, which is near-linear in y
    # in both tails, with a geometric-bisection safeguard on the bracket.
    f = lambda x: special.gammainc_lower(shape, x)
    log_prob = math.log(prob)

    # Wilson-Hilferty starting point, clamped into the open support.
    z = special.normal_quantile(prob)
    g = 1.0 - 1.0 / (9.0 * shape) + z / (3.0 * math.sqrt(shape))
    x = shape * g * g * g if g > 0.0 else shape * math.exp(z / math.sqrt(shape))
    x = min(max(x, 1e-300), 1e300)

    # Grow a bracket [lo, hi] with f(lo) <= prob <= f(hi).
    lo = hi = x
    flo = fhi = f(x)
    while fhi < prob:
        lo, flo = hi, fhi
        hi *= 4.0
        fhi = f(hi)
    while flo > prob:
        hi, fhi = lo, flo
        lo /= 4.0
        if lo < 1e-308:
            return lo / rate
        flo = f(lo)

    x = math.sqrt(lo) * math.sqrt(hi)
    for _ in range(200):
        fx = f(x)
        err = fx - prob
        if abs(err) <= 1e-13 * prob + 1e-16:
            break
        if err > 0.0:
            hi = x
        else:
            lo = x
        nxt = math.nan
        if fx > 0.0:
            # d(log F)/d(log x) = x pdf(x) / F(x), assembled in logs.
            t = shape * math.log(x) - x - special.lngamma(shape) - math.log(fx)
            if t < 700.0:
                slope = math.exp(t)
                if slope > 0.0:
                    nxt = x * math.exp((log_prob - math.log(fx)) / slope)
        if not math.isfinite(nxt) or not (lo < nxt < hi):
            nxt = math.sqrt(lo) * math.sqrt(hi)
        if abs(nxt - x) <= 4.0 * _FLOAT_EPS * x:
            x = nxt
            break
        x = nxt
    return x / rate


# ---------------------------------------------------------------------------
# vectorized evaluation (same math as the scalar forms)
# ---------------------------------------------------------------------------

_erfc_arr = np.frompyfunc(math.erfc, 1, 1)


def _normal_cdf_values(z: np.ndarray) -> np.ndarray:
    return 0.5 * _erfc_arr(-z / math.sqrt(2.0)).astype(np.float64)


def cdf_values(model: DurationModel, xs: Sequence[float]) -> np.ndarray:
    """CDF evaluated over an array of points."""
    xs = np.asarray(xs, dtype=np.float64)
    p = model.params
    if isinstance(p, NormalParams):
        return _normal_cdf_values((xs - p.mu) / p.sigma)
    out = np.zeros_like(xs)
    pos = xs > 0.0
    if isinstance(p, WeibullParams):
        out[pos] = -np.expm1(-((xs[pos] / p.scale) ** p.shape))
    elif isinstance(p, GammaParams):
        out[pos] = _gammainc_lower_values(p.shape, p.rate * xs[pos])
    else:
        out[pos] = _normal_cdf_values((np.log(xs[pos]) - p.mu) / p.sigma)
    return out


def pdf_values(model: DurationModel, xs: Sequence[float]) -> np.ndarray:
    """Density evaluated over an array of points."""
    xs = np.asarray(xs, dtype=np.float64)
    p = model.params
    if isinstance(p, NormalParams):
        z = (xs - p.mu) / p.sigma
        return np.exp(-0.5 * z * z) / (p.sigma * math.sqrt(2.0 * math.pi))
    out = np.zeros_like(xs)
    pos = xs > 0.0
    x = xs[pos]
    if isinstance(p, WeibullParams):
        t = x / p.scale
        out[pos] = np.exp(
            math.log(p.shape / p.scale) + (p.shape - 1.0) * np.log(t) - t ** p.shape
        )
    elif isinstance(p, GammaParams):
        out[pos] = np.exp(
            p.shape * math.log(p.rate)
            + (p.shape - 1.0) * np.log(x)
            - p.rate * x
            - special.lngamma(p.shape)
        )
    else:
        z = (np.log(x) - p.mu) / p.sigma
        out[pos] = np.exp(-0.5 * z * z) / (x * p.sigma * math.sqrt(2.0 * math.pi))
    return out


def _gammainc_lower_values(a: float, xs: np.ndarray) -> np.ndarray:
    """Vectorized regularized lower incomplete gamma for fixed a."""
    out = np.empty_like(xs)
    series = xs < a + 1.0
    if series.any():
        out[series] = _gamma_series_values(a, xs[series])
    rest = ~series
    if rest.any():
        out[rest] = 1.0 - _gamma_cf_values(a, xs[rest])
    return np.clip(out, 0.0, 1.0)


def _gamma_series_values(a: float, xs: np.ndarray) -> np.ndarray:
    ap = a
    term = np.full_like(xs, 1.0 / a)
    total = term.copy()
    for k in range(1, 500):
        ap += 1.0
        term *= xs
        term /= ap
        total += term
        if k % 4 == 0 and np.all(term < total * 3e-16):
            break
    return total * np.exp(-xs + a * np.log(xs) - special.lngamma(a))


def _gamma_cf_values(a: float, xs: np.ndarray) -> np.ndarray:
    tiny = 1e-300
    b = xs + 1.0 - a
    c = np.full_like(xs, 1.0 / tiny)
    d = 1.0 / np.where(np.abs(b) < tiny, tiny, b)
    h = d.copy()
    for i in range(1, 500):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        np.copyto(d, tiny, where=np.abs(d) < tiny)
        c = b + an / c
        np.copyto(c, tiny, where=np.abs(c) < tiny)
        d = 1.0 / d
        delta = d * c
        h *= delta
        if i % 4 == 0 and np.all(np.abs(delta - 1.0) < 3e-16):
            break
    return h * np.exp(-xs + a * np.log(xs) - special.lngamma(a))


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def sample_values(model: DurationModel, seed: int, n: int) -> np.ndarray:
    """Draw n samples as an array; deterministic in (model, seed, n)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return sample_with(model, np.random.Generator(np.random.PCG64(seed)), n)


def sample_with(model: DurationModel, rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw n samples from an existing generator stream."""
    p = model.params
    if isinstance(p, NormalParams):
        return p.mu + p.sigma * rng.standard_normal(n)
    if isinstance(p, LogNormalParams):
        return np.exp(p.mu + p.sigma * rng.standard_normal(n))
    if isinstance(p, WeibullParams):
        # Inverse transform through the closed-form quantile.
        u = rng.random(n)
        return p.scale * (-np.log1p(-u)) ** (1.0 / p.shape)
    return _sample_gamma(rng, p.shape, n) / p.rate


def sample(model: DurationModel, seed: int, n: int) -> Dataset:
    """Draw n samples as a Dataset labeled by the family."""
    return Dataset(label=model.family.value, samples=sample_values(model, seed, n))


def _sample_gamma(rng: np.random.Generator, shape: float, n: int) -> np.ndarray:
    """Marsaglia-Tsang unit-rate gamma sampler.

    Shapes below one use the standard boost: draw at shape+1 and scale by
    U^(1/shape).
    """
    if shape < 1.0:
        boost = rng.random(n) ** (1.0 / shape)
        return _sample_gamma_ge1(rng, shape + 1.0, n) * boost
    return _sample_gamma_ge1(rng, shape, n)


def _sample_gamma_ge1(rng: np.random.Generator, shape: float, n: int) -> np.ndarray:
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(n, dtype=np.float64)
    filled = 0
    while filled < n:
        m = n - filled
        z = rng.standard_normal(m)
        u = rng.random(m)
        v = (1.0 + c * z) ** 3
        ok = v > 0.0
        zz, uu, vv = z[ok], u[ok], v[ok]
        with np.errstate(divide="ignore"):
            accept = np.log(uu) < 0.5 * zz * zz + d - d * vv + d * np.log(vv)
        vals = d * vv[accept]
        out[filled:filled + vals.size] = vals
        filled += vals.size
    return out


# ---------------------------------------------------------------------------
# likelihood
# ---------------------------------------------------------------------------

def log_likelihood(model: DurationModel, data: Dataset | Sequence[float]) -> float:
    """Sum of per-point log densities; -inf when any point leaves the support."""
    xs = data.samples if isinstance(data, Dataset) else np.asarray(data, dtype=np.float64)
    if xs.size == 0:
        raise ValueError("log_likelihood requires a nonempty dataset")
    p = model.params
    if isinstance(p, NormalParams):
        z = (xs - p.mu) / p.sigma
        return float(-0.5 * np.sum(z * z) - xs.size * (math.log(p.sigma) + _LOG_SQRT2PI))
    if np.any(xs <= 0.0):
        return -math.inf
    logs = np.log(xs)
    n = xs.size
    if isinstance(p, WeibullParams):
        t = xs / p.scale
        return float(
            n * math.log(p.shape / p.scale)
            + (p.shape - 1.0) * np.sum(np.log(t))
            - np.sum(t ** p.shape)
        )
    if isinstance(p, GammaParams):
        return float(
            n * (p.shape * math.log(p.rate) - special.lngamma(p.shape))
            + (p.shape - 1.0) * np.sum(logs)
            - p.rate * np.sum(xs)
        )
    z = (logs - p.mu) / p.sigma
    return float(
        -0.5 * np.sum(z * z) - np.sum(logs) - n * (math.log(p.sigma) + _LOG_SQRT2PI)
    )


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def model_to_dict(model: DurationModel) -> dict[str, float | str]:
    """JSON-ready form, e.g. {"family": "lognormal", "mu": 3.85, "sigma": 0.62}."""
    out: dict[str, float | str] = {"family": model.family.value}
    out.update(model.param_dict())
    return out


def model_from_dict(obj: Mapping[str, object]) -> DurationModel:
    data = dict(obj)
    try:
        family = Family(str(data.pop("family")))
    except (KeyError, ValueError) as exc:
        raise ValueError(f"bad or missing family in model record: {obj!r}") from exc
    expected = _PARAM_TYPES[family]
    names = [f for f in expected.__dataclass_fields__]
    try:
        values = {name: float(data.pop(name)) for name in names}  # type: ignore[arg-type]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(
            f"family {family.value!r} requires fields {names}, got {sorted(obj)}"
        ) from exc
    if data:
        raise ValueError(f"unknown fields for family {family.value!r}: {sorted(data)}")
    return DurationModel(family, expected(**values))


def model_to_text(model: DurationModel) -> str:
    """Flat key-value record, e.g. ``family=lognormal mu=3.85 sigma=0.62``."""
    parts = [f"family={model.family.value}"]
    parts += [f"{k}={v!r}" for k, v in model.param_dict().items()]
    return " ".join(parts)


def model_from_text(text: str) -> DurationModel:
    fields: dict[str, object] = {}
    for token in text.split():
        if "=" not in token:
            raise ValueError(f"bad token {token!r} in model record {text!r}")
        key, value = token.split("=", 1)
        fields[key] = value
    return model_from_dict(fields)


def model_from_json(text: str) -> DurationModel:
    return model_from_dict(json.loads(text))
