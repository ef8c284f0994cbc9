"""Robot dispatch timing against a fitted human-readiness distribution.

The objective is a two-sided linear waiting cost: c_robot per second the
robot idles at the meeting point plus c_human per second the human waits
on the robot.  Its exact minimizer is the cost-ratio quantile of the
readiness distribution (the classic newsvendor condition), which is what
:func:`optimal_dispatch` returns; :func:`expected_cost` evaluates the
objective itself, closed-form where the partial expectations allow it and
by adaptive 64-node Gauss-Legendre quadrature otherwise.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import distributions as dist
from .distributions import (
    DurationModel,
    GammaParams,
    LogNormalParams,
    NormalParams,
)
from .errors import ConfigError, UnboundedOptimumError
from . import special
from .special import normal_cdf

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


@dataclass(frozen=True)
class CostSpec:
    """Waiting costs per second; at least one side must be positive."""

    c_human: float
    c_robot: float

    def __post_init__(self) -> None:
        if self.c_human < 0.0 or self.c_robot < 0.0:
            raise ConfigError("costs must be nonnegative")
        if self.c_human + self.c_robot <= 0.0:
            raise ConfigError("at least one cost must be positive")

    @property
    def ratio(self) -> float:
        """The service-level ratio c_robot / (c_human + c_robot)."""
        return self.c_robot / (self.c_human + self.c_robot)


@dataclass(frozen=True)
class DispatchEntry:
    order_index: int
    target_s: float
    travel_s: float
    departure_s: float
    floored: bool
    expected_cost: float
    p_on_time: float


@dataclass(frozen=True)
class DispatchPlan:
    costs: CostSpec
    orders: tuple[DispatchEntry, ...]


def _partial_expectations(model: DurationModel, t: float) -> tuple[float, float]:
    """(E[(H - t)+], E[(t - H)+]) for readiness time H."""
    p = model.params
    if isinstance(p, NormalParams):
        z = (t - p.mu) / p.sigma
        phi = math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
        big = normal_cdf(z)
        over = p.sigma * (phi - z * (1.0 - big))
        under = p.sigma * (z * big + phi)
        return over, under
    if isinstance(p, LogNormalParams):
        mean = math.exp(p.mu + 0.5 * p.sigma * p.sigma)
        if t <= 0.0:
            return mean - t, 0.0
        z = (math.log(t) - p.mu) / p.sigma
        over = mean * normal_cdf(p.sigma - z) - t * (1.0 - normal_cdf(z))
        under = t * normal_cdf(z) - mean * normal_cdf(z - p.sigma)
        return max(over, 0.0), max(under, 0.0)
    # Weibull / Gamma: H >= 0, so E[(t-H)+] is the cdf integral over [0, t]
    # and the other side follows from E[(H-t)+] - E[(t-H)+] = E[H] - t.
    t = max(t, 0.0)
    if isinstance(p, GammaParams):
        mean = p.shape / p.rate
    else:
        mean = p.scale * math.exp(special.lngamma(1.0 + 1.0 / p.shape))
    under = _integrate(lambda xs: dist.cdf_values(model, xs), 0.0, t)
    return max(mean - t + under, 0.0), under


def _integrate(f, a: float, b: float, depth: int = 14) -> float:
    if b <= a:
        return 0.0
    whole = _gl_panel(f, a, b)
    return _refine(f, a, b, whole, depth, abs(whole) + 1e-12)


def _gl_panel(f, a: float, b: float) -> float:
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    return half * float(np.dot(_GL_WEIGHTS, f(mid + half * _GL_NODES)))


def _refine(f, a: float, b: float, whole: float, depth: int, scale: float) -> float:
    mid = 0.5 * (a + b)
    left = _gl_panel(f, a, mid)
    right = _gl_panel(f, mid, b)
    if depth <= 0 or abs(left + right - whole) <= 1e-12 * scale:
        return left + right
    return (
        _refine(f, a, mid, left, depth - 1, scale)
        + _refine(f, mid, b, right, depth - 1, scale)
    )


def expected_cost(model: DurationModel, t: float, costs: CostSpec) -> float:
    """c_robot E[(H - t)+] + c_human E[(t - H)+] at dispatch target t >= 0."""
    if t < 0.0:
        raise ValueError(f"dispatch target must be >= 0, got {t}")
    over, under = _partial_expectations(model, t)
    return costs.c_robot * over + costs.c_human * under


def optimal_dispatch(model: DurationModel, costs: CostSpec) -> float:
    """Exact minimizer of the expected cost: the cost-ratio quantile.

    With c_human = 0 the objective decreases forever (the robot should
    wait indefinitely), which is rejected.  With c_robot = 0 the optimum
    is to dispatch immediately.
    """
    if costs.c_human == 0.0:
        raise UnboundedOptimumError(
            "c_human = 0 makes waiting free for the robot; no finite optimum"
        )
    if costs.c_robot == 0.0:
        return 0.0
    return dist.quantile(model, costs.ratio)


def schedule_session(models: Sequence[DurationModel], costs: CostSpec,
                     robot_travel: Sequence[float] | float = 0.0) -> DispatchPlan:
    """Arrival targets and departure times for a session's orders.

    Departures are arrival minus travel, floored at zero with a flag when
    the travel time exceeds the target.
    """
    models = list(models)
    if not models:
        raise ConfigError("schedule_session needs at least one order model")
    if isinstance(robot_travel, (int, float)):
        travels = [float(robot_travel)] * len(models)
    else:
        travels = [float(v) for v in robot_travel]
        if len(travels) != len(models):
            raise ConfigError(
                f"got {len(travels)} travel times for {len(models)} orders"
            )
    if any(v < 0.0 for v in travels):
        raise ConfigError("travel times must be nonnegative")

    entries = []
    for i, (model, travel) in enumerate(zip(models, travels)):
        target = optimal_dispatch(model, costs)
        departure = target - travel
        floored = departure < 0.0
        entries.append(DispatchEntry(
            order_index=i,
            target_s=target,
            travel_s=travel,
            departure_s=max(departure, 0.0),
            floored=floored,
            expected_cost=expected_cost(model, target, costs),
            p_on_time=costs.ratio,
        ))
    return DispatchPlan(costs=costs, orders=tuple(entries))


def plan_to_dict(plan: DispatchPlan) -> dict[str, object]:
    return {
        "costs": {"c_human": plan.costs.c_human, "c_robot": plan.costs.c_robot},
        "orders": [
            {
                "order": e.order_index,
                "target_s": e.target_s,
                "travel_s": e.travel_s,
                "departure_s": e.departure_s,
                "floored": e.floored,
                "expected_cost": e.expected_cost,
                "p_on_time": e.p_on_time,
            }
            for e in plan.orders
        ],
    }


def write_plan_json(plan: DispatchPlan, path: str | Path) -> None:
    Path(path).write_text(json.dumps(plan_to_dict(plan), indent=2) + "\n")
