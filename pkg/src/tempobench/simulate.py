"""Discrete-event simulation of the collaborative packaging task.

A session runs a fixed list of orders back to back: the human packs each
order's items strictly in sequence, bin items cost one step duration,
robot-delivered items additionally wait on the robot's pre-set schedule
plus a pickup delay, and the single robot only departs for its next
delivery after the previous item was picked up.  Each step may be preceded
by one rejected pack attempt (Bernoulli error with an additive penalty
draw).

Every timestamp lives on an integer millisecond clock: drawn durations are
rounded to whole milliseconds up front, so the per-order durations the
simulator reports are exactly what the telemetry pipeline recomputes from
the event stream.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence, Union

import numpy as np

from . import distributions as dist
from .dataset import Dataset
from .distributions import DurationModel
from .errors import ConfigError

EVENT_ORDER_START = "OrderStart"
EVENT_ITEM_PACKED = "ItemPacked"
EVENT_PACK_REJECTED = "PackRejected"
EVENT_ROBOT_ARRIVED = "RobotArrived"
EVENT_ROBOT_PICKED_UP = "RobotPickedUp"
EVENT_ORDER_SENT = "OrderSent"
EVENT_SESSION_END = "SessionEnd"

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


@dataclass(frozen=True)
class ConstantDuration:
    """Zero-variance duration stub, allowed only in simulation configs."""

    value: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.value) and self.value >= 0.0):
            raise ConfigError(f"constant duration must be >= 0, got {self.value}")


StepModel = Union[DurationModel, ConstantDuration]


@dataclass(frozen=True)
class OrderItem:
    item_id: str
    source: str  # "bin" | "robot"
    depart_offset_s: float = 0.0
    travel_s: float = 0.0

    def __post_init__(self) -> None:
        if self.source not in ("bin", "robot"):
            raise ConfigError(f"item source must be 'bin' or 'robot', got {self.source!r}")
        if self.source == "robot":
            if self.depart_offset_s < 0.0 or self.travel_s < 0.0:
                raise ConfigError("robot delivery offsets and travel must be >= 0")


@dataclass(frozen=True)
class OrderSpec:
    items: tuple[OrderItem, ...]

    def __post_init__(self) -> None:
        if not self.items:
            raise ConfigError("an order needs at least one item")
        object.__setattr__(self, "items", tuple(self.items))


@dataclass(frozen=True)
class HumanModel:
    step_duration: StepModel
    pickup_delay: StepModel
    p_err: float
    error_penalty: StepModel
    learning: tuple[float, ...]  # one multiplier per order, applied to steps

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_err <= 1.0:
            raise ConfigError(f"p_err must lie in [0, 1], got {self.p_err}")
        object.__setattr__(self, "learning", tuple(float(v) for v in self.learning))
        if any(not (math.isfinite(v) and v > 0.0) for v in self.learning):
            raise ConfigError("learning multipliers must all be > 0")


@dataclass(frozen=True)
class TraceEvent:
    t_ms: int
    kind: str
    payload: dict


@dataclass(frozen=True)
class SessionTrace:
    session_id: str
    seed: int
    events: tuple[TraceEvent, ...]
    order_durations_s: tuple[float, ...]
    overall_s: float

    def validate(self) -> None:
        times = [e.t_ms for e in self.events]
        if any(b < a for a, b in zip(times, times[1:])):
            raise AssertionError("event times must be nondecreasing")
        starts = [e.t_ms for e in self.events if e.kind == EVENT_ORDER_START]
        sends = [e.t_ms for e in self.events if e.kind == EVENT_ORDER_SENT]
        for k, (a, b) in enumerate(zip(starts, sends)):
            if (b - a) / 1000.0 != self.order_durations_s[k]:
                raise AssertionError(f"order {k} duration mismatch")
        ends = [e.t_ms for e in self.events if e.kind == EVENT_SESSION_END]
        if (ends[-1] - starts[0]) / 1000.0 != self.overall_s:
            raise AssertionError("overall duration mismatch")


def derive_seed(seed: int, index: int) -> int:
    """Child seed for session `index`: splitmix64 output at stream position
    seed + (index + 1) * golden-ratio increment."""
    z = (seed + (index + 1) * _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _draw_block(model: StepModel, rng: np.random.Generator, n: int) -> np.ndarray:
    if n == 0:
        return np.empty(0)
    if isinstance(model, ConstantDuration):
        return np.full(n, model.value)
    return dist.sample_with(model, rng, n)


def _to_ms(seconds: float) -> int:
    return max(0, int(round(seconds * 1000.0)))


def run_session(orders: Sequence[OrderSpec], human: HumanModel, seed: int,
                session_id: str | None = None) -> SessionTrace:
    """Execute one session; deterministic given (orders, human, seed)."""
    orders = list(orders)
    if not orders:
        raise ConfigError("run_session needs at least one order")
    if len(human.learning) != len(orders):
        raise ConfigError(
            f"{len(human.learning)} learning multipliers for {len(orders)} orders"
        )

    rng = np.random.Generator(np.random.PCG64(seed))
    n_steps = sum(len(o.items) for o in orders)
    n_robot = sum(1 for o in orders for it in o.items if it.source == "robot")

    # Fixed draw layout so the stream is independent of schedule timing:
    # steps, pickups, error uniforms, penalties — penalties are drawn for
    # every step and only consumed on an error.
    steps = _draw_block(human.step_duration, rng, n_steps)
    pickups = _draw_block(human.pickup_delay, rng, n_robot)
    err_u = rng.random(n_steps)
    penalties = _draw_block(human.error_penalty, rng, n_steps)

    events: list[TraceEvent] = []
    now = 0
    robot_free = 0
    step_i = 0
    robot_i = 0
    order_durations: list[float] = []

    for k, order in enumerate(orders):
        lam = human.learning[k]
        start = now
        events.append(TraceEvent(start, EVENT_ORDER_START, {"order": k}))
        for item in order.items:
            if item.source == "robot":
                depart = robot_free + _to_ms(item.depart_offset_s)
                arrive = depart + _to_ms(item.travel_s)
                events.append(TraceEvent(arrive, EVENT_ROBOT_ARRIVED,
                                         {"order": k, "item": item.item_id}))
                picked = max(now, arrive) + _to_ms(float(pickups[robot_i]))
                robot_i += 1
                events.append(TraceEvent(picked, EVENT_ROBOT_PICKED_UP,
                                         {"order": k, "item": item.item_id}))
                robot_free = picked
                now = picked
            if err_u[step_i] < human.p_err:
                now += _to_ms(float(penalties[step_i]))
                events.append(TraceEvent(now, EVENT_PACK_REJECTED,
                                         {"order": k, "item": item.item_id}))
            now += _to_ms(lam * float(steps[step_i]))
            step_i += 1
            events.append(TraceEvent(now, EVENT_ITEM_PACKED,
                                     {"order": k, "item": item.item_id}))
        events.append(TraceEvent(now, EVENT_ORDER_SENT, {"order": k}))
        order_durations.append((now - start) / 1000.0)

    events.append(TraceEvent(now, EVENT_SESSION_END, {}))
    events.sort(key=lambda e: e.t_ms)  # stable: causal ties keep their order

    return SessionTrace(
        session_id=session_id or f"sim-{seed:016x}",
        seed=seed,
        events=tuple(events),
        order_durations_s=tuple(order_durations),
        overall_s=now / 1000.0,
    )


@dataclass(frozen=True)
class BatchResult:
    order_datasets: tuple[Dataset, ...]
    overall: Dataset
    session_ids: tuple[str, ...]
    durations: np.ndarray = field(repr=False)  # (n_sessions, n_orders)


def run_batch(orders: Sequence[OrderSpec], human: HumanModel, n_sessions: int,
              seed: int, run_id: str = "sim",
              trace_sink: Callable[[SessionTrace], None] | None = None) -> BatchResult:
    """Run independent sessions on derived child seeds.

    Produces one duration dataset per order plus the overall dataset, in
    the same shape the telemetry export emits.
    """
    if n_sessions < 1:
        raise ConfigError(f"n_sessions must be >= 1, got {n_sessions}")
    n_orders = len(list(orders))
    durations = np.empty((n_sessions, n_orders))
    overall = np.empty(n_sessions)
    ids = []
    for i in range(n_sessions):
        sid = f"{run_id}-{i:05d}"
        trace = run_session(orders, human, derive_seed(seed, i), session_id=sid)
        durations[i, :] = trace.order_durations_s
        overall[i] = trace.overall_s
        ids.append(sid)
        if trace_sink is not None:
            trace_sink(trace)
    order_datasets = tuple(
        Dataset(label=f"order{k + 1}", samples=durations[:, k]) for k in range(n_orders)
    )
    return BatchResult(
        order_datasets=order_datasets,
        overall=Dataset(label="overall", samples=overall),
        session_ids=tuple(ids),
        durations=durations,
    )


@dataclass(frozen=True)
class Summary:
    mean: float
    sd: float
    min: float
    max: float


def empirical_summary(data: Dataset) -> Summary:
    """Sample mean, n-denominator sd, min and max."""
    if data.n < 2:
        raise ValueError("empirical_summary requires n >= 2")
    xs = data.samples
    return Summary(
        mean=float(np.mean(xs)),
        sd=float(np.std(xs)),
        min=float(np.min(xs)),
        max=float(np.max(xs)),
    )


# ---------------------------------------------------------------------------
# config and trace I/O
# ---------------------------------------------------------------------------

def duration_model_from_dict(obj: dict) -> StepModel:
    """Parse a duration model, allowing the constant simulation stub."""
    if obj.get("family") == "constant":
        extra = set(obj) - {"family", "value"}
        if extra or "value" not in obj:
            raise ConfigError(f"constant model takes exactly a 'value' field: {obj!r}")
        return ConstantDuration(float(obj["value"]))
    return dist.model_from_dict(obj)


def duration_model_to_dict(model: StepModel) -> dict:
    if isinstance(model, ConstantDuration):
        return {"family": "constant", "value": model.value}
    return dist.model_to_dict(model)


@dataclass(frozen=True)
class SimConfig:
    orders: tuple[OrderSpec, ...]
    human: HumanModel
    n_sessions: int
    seed: int
    run_id: str = "sim"


def sim_config_from_dict(obj: dict) -> SimConfig:
    try:
        orders = tuple(
            OrderSpec(items=tuple(
                OrderItem(
                    item_id=str(it["id"]),
                    source=str(it["source"]),
                    depart_offset_s=float(it.get("depart_offset_s", 0.0)),
                    travel_s=float(it.get("travel_s", 0.0)),
                )
                for it in o["items"]
            ))
            for o in obj["orders"]
        )
        h = obj["human"]
        human = HumanModel(
            step_duration=duration_model_from_dict(h["step_duration"]),
            pickup_delay=duration_model_from_dict(h["pickup_delay"]),
            p_err=float(h.get("p_err", 0.0)),
            error_penalty=duration_model_from_dict(h["error_penalty"]),
            learning=tuple(h.get("learning", [1.0] * len(orders))),
        )
        return SimConfig(
            orders=orders,
            human=human,
            n_sessions=int(obj.get("n_sessions", 1)),
            seed=int(obj.get("seed", 0)),
            run_id=str(obj.get("run_id", "sim")),
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad simulation config: {exc}") from exc


def load_sim_config(path: str | Path) -> SimConfig:
    with Path(path).open() as fh:
        return sim_config_from_dict(json.load(fh))


def trace_to_jsonl(trace: SessionTrace) -> str:
    """One event per line, in the telemetry wire schema."""
    lines = [
        json.dumps({"t_ms": e.t_ms, "kind": e.kind, "payload": e.payload})
        for e in trace.events
    ]
    return "\n".join(lines) + "\n"


def trace_events(trace: SessionTrace) -> list[dict]:
    return [{"t_ms": e.t_ms, "kind": e.kind, "payload": e.payload} for e in trace.events]


def batch_to_csv(batch: BatchResult) -> str:
    """Batch durations in the telemetry export schema.

    Millisecond-grid durations print exactly at three decimals, so this
    output is byte-identical to what the service exports after ingesting
    the same traces.
    """
    n_orders = len(batch.order_datasets)
    header = ["session_id"] + [f"order{k + 1}_s" for k in range(n_orders)] + ["overall_s"]
    lines = [",".join(header)]
    for i, sid in enumerate(batch.session_ids):
        cells = [sid]
        cells += [f"{batch.durations[i, k]:.3f}" for k in range(n_orders)]
        cells.append(f"{batch.overall.samples[i]:.3f}")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def default_config(n_sessions: int = 100, seed: int = 0) -> dict:
    """Three orders with increasing robot wait; offsets are illustrative."""
    return {
        "orders": [
            {"items": [
                {"id": "tape", "source": "bin"},
                {"id": "label", "source": "bin"},
                {"id": "gadget", "source": "robot", "depart_offset_s": 6.0, "travel_s": 4.0},
            ]},
            {"items": [
                {"id": "foam", "source": "bin"},
                {"id": "widget", "source": "robot", "depart_offset_s": 10.0, "travel_s": 6.0},
                {"id": "label", "source": "bin"},
            ]},
            {"items": [
                {"id": "manual", "source": "bin"},
                {"id": "part", "source": "robot", "depart_offset_s": 16.0, "travel_s": 8.0},
                {"id": "tape", "source": "bin"},
            ]},
        ],
        "human": {
            "step_duration": {"family": "lognormal", "mu": 2.2, "sigma": 0.45},
            "pickup_delay": {"family": "lognormal", "mu": 0.2, "sigma": 0.35},
            "p_err": 0.08,
            "error_penalty": {"family": "lognormal", "mu": 0.8, "sigma": 0.4},
            "learning": [2.0, 1.0, 1.0],
        },
        "n_sessions": n_sessions,
        "seed": seed,
        "run_id": "sim",
    }
