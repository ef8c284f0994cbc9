"""Dispatch-cost and quantile-rule tests.

Closed-form partial expectations are cross-checked against scipy
quadrature; the Weibull/Gamma quadrature path is cross-checked against
incomplete-gamma closed forms.  Both oracles are independent of the
implementation route they verify.
"""

import math

import numpy as np
import pytest
from scipy import integrate, special as sp_special, stats

from tempobench import distributions as dist
from tempobench import simulate as sim
from tempobench.errors import ConfigError, UnboundedOptimumError
from tempobench.scheduling import (
    CostSpec,
    expected_cost,
    optimal_dispatch,
    plan_to_dict,
    schedule_session,
)

LN1 = dist.lognormal(3.85, 0.62)
EVEN = CostSpec(1.0, 1.0)


def scipy_cost(model, t, costs):
    """Quadrature oracle built on scipy frozen distributions."""
    p = model.param_dict()
    frozen = {
        "normal": lambda: stats.norm(p["mu"], p["sigma"]),
        "weibull": lambda: stats.weibull_min(p["shape"], scale=p["scale"]),
        "gamma": lambda: stats.gamma(p["shape"], scale=1.0 / p["rate"]),
        "lognormal": lambda: stats.lognorm(p["sigma"], scale=math.exp(p["mu"])),
    }[model.family.value]()
    over = integrate.quad(lambda x: (x - t) * frozen.pdf(x), t, np.inf, limit=300)[0]
    lo = frozen.ppf(1e-15) if model.family.value == "normal" else 0.0
    under = integrate.quad(lambda x: (t - x) * frozen.pdf(x), lo, t, limit=300)[0] if t > lo else 0.0
    return costs.c_robot * over + costs.c_human * under


# --- expected cost --------------------------------------------------------------

def test_near_degenerate_normal_cost_at_mean():
    model = dist.normal(50.0, 0.001)
    got = expected_cost(model, 50.0, EVEN)
    assert got == pytest.approx(0.001 * 2.0 / math.sqrt(2.0 * math.pi), rel=1e-9)
    assert got < 1e-3


def test_cost_at_zero_with_only_robot_waiting_is_mean():
    got = expected_cost(LN1, 0.0, CostSpec(0.0, 1.0))
    assert got == pytest.approx(math.exp(3.85 + 0.62**2 / 2.0), rel=1e-12)


def test_lognormal_closed_form_matches_quadrature_oracle():
    for t in (0.0, 10.0, 46.99, 150.0):
        mine = expected_cost(LN1, t, EVEN)
        assert mine == pytest.approx(scipy_cost(LN1, t, EVEN), rel=1e-6)


def test_normal_closed_form_matches_quadrature_oracle():
    model = dist.normal(60.04, 59.57)
    for t in (0.0, 30.0, 60.04, 200.0):
        mine = expected_cost(model, t, EVEN)
        assert mine == pytest.approx(scipy_cost(model, t, EVEN), rel=1e-8)


def test_weibull_gamma_quadrature_matches_incomplete_gamma_closed_forms():
    wb = dist.weibull(1.30, 65.97)
    gm = dist.gamma(2.18, 0.04)
    for t in (0.0, 20.0, 54.5, 120.0, 500.0):
        c, s = 1.30, 65.97
        mean = s * math.gamma(1.0 + 1.0 / c)
        upper = mean * sp_special.gammaincc(1.0 + 1.0 / c, (t / s) ** c) if t > 0 else mean
        ft = stats.weibull_min(c, scale=s).cdf(t)
        want = (upper - t * (1 - ft)) + (t * ft - (mean - upper))
        assert expected_cost(wb, t, EVEN) == pytest.approx(want, rel=1e-9)

        a, r = 2.18, 0.04
        mean = a / r
        upper = mean * sp_special.gammaincc(a + 1.0, r * t) if t > 0 else mean
        ft = stats.gamma(a, scale=1.0 / r).cdf(t)
        want = (upper - t * (1 - ft)) + (t * ft - (mean - upper))
        assert expected_cost(gm, t, EVEN) == pytest.approx(want, rel=1e-9)


def test_expected_cost_rejects_negative_target():
    with pytest.raises(ValueError):
        expected_cost(LN1, -1.0, EVEN)


def test_expected_cost_convex_on_grid():
    for model in (LN1, dist.weibull(1.3, 65.97), dist.gamma(2.18, 0.04),
                  dist.normal(60.0, 20.0)):
        ts = np.linspace(0.0, dist.quantile(model, 0.995), 160)
        vals = np.array([expected_cost(model, t, CostSpec(1.0, 2.5)) for t in ts])
        second = vals[2:] - 2.0 * vals[1:-1] + vals[:-2]
        assert np.all(second >= -1e-8)


# --- optimal dispatch -------------------------------------------------------------

def test_equal_costs_dispatch_at_median():
    assert optimal_dispatch(LN1, EVEN) == pytest.approx(math.exp(3.85), rel=1e-12)


def test_three_to_one_costs_dispatch_at_q75():
    got = optimal_dispatch(LN1, CostSpec(1.0, 3.0))
    assert got == pytest.approx(71.3918448562, rel=1e-9)


def test_zero_human_cost_is_unbounded():
    with pytest.raises(UnboundedOptimumError):
        optimal_dispatch(LN1, CostSpec(0.0, 1.0))


def test_zero_robot_cost_dispatches_immediately():
    assert optimal_dispatch(LN1, CostSpec(1.0, 0.0)) == 0.0


def test_grid_search_attains_optimum_within_one_step():
    rng = np.random.default_rng(5)
    models = [dist.normal(60.0, 15.0), dist.weibull(1.3, 65.97),
              dist.gamma(2.18, 0.04), LN1]
    for model in models:
        costs = CostSpec(1.0, float(rng.uniform(0.2, 4.0)))
        hi = dist.quantile(model, 0.999)
        step = 1e-3 * hi
        ts = np.arange(0.0, hi + step, step)
        vals = [expected_cost(model, t, costs) for t in ts]
        t_grid = ts[int(np.argmin(vals))]
        assert abs(t_grid - optimal_dispatch(model, costs)) <= step + 1e-12


def test_cost_ratio_invariance_and_monotonicity():
    p1 = schedule_session([LN1], CostSpec(1.0, 1.0))
    p2 = schedule_session([LN1], CostSpec(2.0, 2.0))
    assert p1.orders[0].target_s == p2.orders[0].target_s
    assert p1.orders[0].p_on_time == p2.orders[0].p_on_time

    targets_robot = [optimal_dispatch(LN1, CostSpec(1.0, c)) for c in (0.5, 1.0, 2.0, 4.0)]
    assert targets_robot == sorted(targets_robot)
    targets_human = [optimal_dispatch(LN1, CostSpec(c, 1.0)) for c in (0.5, 1.0, 2.0, 4.0)]
    assert targets_human == sorted(targets_human, reverse=True)


# --- session plans ----------------------------------------------------------------

def test_schedule_session_order1_to_3_medians():
    models = [dist.lognormal(3.85, 0.62), dist.lognormal(3.47, 0.30),
              dist.lognormal(3.64, 0.26)]
    plan = schedule_session(models, EVEN)
    got = [e.target_s for e in plan.orders]
    assert got == pytest.approx([math.exp(3.85), math.exp(3.47), math.exp(3.64)], rel=1e-12)
    assert got == pytest.approx([46.99, 32.14, 38.09], abs=0.01)
    assert all(e.p_on_time == 0.5 for e in plan.orders)


def test_travel_larger_than_target_floors_departure():
    plan = schedule_session([LN1], EVEN, robot_travel=[500.0])
    entry = plan.orders[0]
    assert entry.departure_s == 0.0
    assert entry.floored is True
    assert plan_to_dict(plan)["orders"][0]["floored"] is True


def test_schedule_session_validation():
    with pytest.raises(ConfigError):
        schedule_session([], EVEN)
    with pytest.raises(ConfigError):
        schedule_session([LN1, LN1], EVEN, robot_travel=[1.0])
    with pytest.raises(ConfigError):
        schedule_session([LN1], EVEN, robot_travel=[-1.0])
    with pytest.raises(ConfigError):
        CostSpec(0.0, 0.0)
    with pytest.raises(ConfigError):
        CostSpec(-1.0, 2.0)


def test_closed_loop_dispatch_beats_mean_dispatch():
    # One bin step then a robot item: the human's readiness for the pickup
    # is the log-normal step draw.  Realized waiting costs over many
    # simulated sessions favor the quantile rule over mean dispatch.
    step = dist.lognormal(3.4, 0.5)
    costs = CostSpec(1.0, 1.0)
    t_star = optimal_dispatch(step, costs)
    t_mean = math.exp(3.4 + 0.5**2 / 2.0)

    def realized_cost(arrival_s: float, n_sessions: int = 10_000) -> float:
        orders = [sim.OrderSpec(items=(
            sim.OrderItem("a", "bin"),
            sim.OrderItem("b", "robot", depart_offset_s=arrival_s, travel_s=0.0),
        ))]
        human = sim.HumanModel(step_duration=step, pickup_delay=sim.ConstantDuration(0.0),
                               p_err=0.0, error_penalty=sim.ConstantDuration(0.0),
                               learning=(1.0,))
        total = 0.0
        for i in range(n_sessions):
            trace = sim.run_session(orders, human, sim.derive_seed(77, i))
            arrive = next(e.t_ms for e in trace.events if e.kind == "RobotArrived")
            ready = next(e.t_ms for e in trace.events if e.kind == "ItemPacked")
            gap = (ready - arrive) / 1000.0
            total += costs.c_robot * max(gap, 0.0) + costs.c_human * max(-gap, 0.0)
        return total / n_sessions

    assert realized_cost(t_star) <= realized_cost(t_mean)
