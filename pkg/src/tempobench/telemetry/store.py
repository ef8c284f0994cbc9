"""Durable session store: append-only JSON-lines segments.

Each record occupies one line framed as ``<crc32-hex> <json>``; the
checksum covers the JSON payload bytes.  On open, the segment is scanned
and a torn or corrupt tail (a crash between append and ack) is discarded
by truncation, so a restart never surfaces a half-written record.  Appends
are serialized by a single writer lock and fsynced before the caller gets
its acknowledgment.
"""

from __future__ import annotations

import json
import os
import threading
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

SEGMENT_NAME = "sessions-000001.log"


@dataclass
class SessionRecord:
    session_id: str
    worker_id: str
    received_at: float
    client_version: str
    events: list[dict]
    survey: dict | None
    completed: bool

    @classmethod
    def from_dict(cls, obj: dict) -> "SessionRecord":
        return cls(
            session_id=obj["session_id"],
            worker_id=obj["worker_id"],
            received_at=obj["received_at"],
            client_version=obj["client_version"],
            events=obj["events"],
            survey=obj.get("survey"),
            completed=obj["completed"],
        )

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "worker_id": self.worker_id,
            "received_at": self.received_at,
            "client_version": self.client_version,
            "events": self.events,
            "survey": self.survey,
            "completed": self.completed,
        }


def completion_flag(events: list[dict]) -> bool:
    """True iff the event log holds three OrderSent and one SessionEnd."""
    sent = sum(1 for e in events if e.get("kind") == "OrderSent")
    ended = sum(1 for e in events if e.get("kind") == "SessionEnd")
    return sent == 3 and ended == 1


class SessionStore:
    """Single-segment append-only store with an in-memory id index."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.path = self.data_dir / SEGMENT_NAME
        self._lock = threading.Lock()
        self._records: dict[str, SessionRecord] = {}
        self._recover()

    def _recover(self) -> None:
        if not self.path.exists():
            self.path.touch()
            return
        good_bytes = 0
        with self.path.open("rb") as fh:
            for raw in fh:
                record = _decode_line(raw)
                if record is None:
                    break
                self._records[record.session_id] = record
                good_bytes += len(raw)
        if good_bytes < self.path.stat().st_size:
            # Torn tail from an interrupted append; drop it.
            with self.path.open("r+b") as fh:
                fh.truncate(good_bytes)

    def append(self, record: SessionRecord) -> bool:
        """Store a record durably; False when the session_id already exists."""
        with self._lock:
            if record.session_id in self._records:
                return False
            payload = json.dumps(record.to_dict(), separators=(",", ":")).encode()
            line = f"{zlib.crc32(payload):08x} ".encode() + payload + b"\n"
            with self.path.open("ab") as fh:
                fh.write(line)
                fh.flush()
                os.fsync(fh.fileno())
            self._records[record.session_id] = record
            return True

    def get(self, session_id: str) -> SessionRecord | None:
        return self._records.get(session_id)

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[SessionRecord]:
        # Insertion order == append order == received order.
        return iter(list(self._records.values()))


def _decode_line(raw: bytes) -> SessionRecord | None:
    if not raw.endswith(b"\n"):
        return None
    body = raw[:-1]
    if len(body) < 9 or body[8:9] != b" ":
        return None
    try:
        crc = int(body[:8], 16)
    except ValueError:
        return None
    payload = body[9:]
    if zlib.crc32(payload) != crc:
        return None
    try:
        return SessionRecord.from_dict(json.loads(payload))
    except (json.JSONDecodeError, KeyError, TypeError):
        return None


# ---------------------------------------------------------------------------
# exclusion filtering and export
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExclusionPolicy:
    """The study's data-cleaning rules, each individually switchable."""

    require_complete: bool = True
    drop_duplicate_workers: bool = True
    require_survey: bool = True

    @classmethod
    def parse(cls, text: str | None) -> "ExclusionPolicy":
        """Parse ``all``, ``none`` or a comma list of
        {complete, unique-worker, survey}."""
        if text is None or text == "" or text == "all":
            return cls()
        if text == "none":
            return cls(False, False, False)
        flags = {t.strip() for t in text.split(",") if t.strip()}
        known = {"complete", "unique-worker", "survey"}
        unknown = flags - known
        if unknown:
            raise ValueError(
                f"unknown policy flags {sorted(unknown)}; valid: {sorted(known)}, 'all', 'none'"
            )
        return cls(
            require_complete="complete" in flags,
            drop_duplicate_workers="unique-worker" in flags,
            require_survey="survey" in flags,
        )

    def describe(self) -> dict[str, bool]:
        return {
            "require_complete": self.require_complete,
            "drop_duplicate_workers": self.drop_duplicate_workers,
            "require_survey": self.require_survey,
        }


def apply_exclusions(store: SessionStore, policy: ExclusionPolicy) -> list[str]:
    """Retained session ids in store order.

    Duplicate workers keep their earliest-received session only.
    """
    retained: list[str] = []
    best_by_worker: dict[str, SessionRecord] = {}
    records = list(store)
    if policy.drop_duplicate_workers:
        for rec in records:
            cur = best_by_worker.get(rec.worker_id)
            if cur is None or rec.received_at < cur.received_at:
                best_by_worker[rec.worker_id] = rec
    for rec in records:
        if policy.require_complete and not rec.completed:
            continue
        if policy.require_survey and not (rec.survey and rec.survey.get("items")):
            continue
        if policy.drop_duplicate_workers and best_by_worker[rec.worker_id] is not rec:
            continue
        retained.append(rec.session_id)
    return retained


def session_durations(record: SessionRecord) -> tuple[list[float], float | None]:
    """Per-order durations and the overall duration, in seconds.

    Order k pairs the k-th OrderStart with the k-th OrderSent; overall is
    SessionEnd minus the first OrderStart.  Missing counterparts yield
    whatever pairs exist (and None overall).
    """
    starts = [e["t_ms"] for e in record.events if e["kind"] == "OrderStart"]
    sends = [e["t_ms"] for e in record.events if e["kind"] == "OrderSent"]
    ends = [e["t_ms"] for e in record.events if e["kind"] == "SessionEnd"]
    orders = [(b - a) / 1000.0 for a, b in zip(starts, sends)]
    overall = (ends[-1] - starts[0]) / 1000.0 if ends and starts else None
    return orders, overall


EXPORT_HEADER = "session_id,order1_s,order2_s,order3_s,overall_s"


def export_durations_csv(store: SessionStore, policy: ExclusionPolicy) -> str:
    """The duration CSV for retained sessions (header even when empty)."""
    lines = [EXPORT_HEADER]
    for sid in apply_exclusions(store, policy):
        rec = store.get(sid)
        orders, overall = session_durations(rec)
        cells = [sid]
        for k in range(3):
            cells.append(f"{orders[k]:.3f}" if k < len(orders) else "")
        cells.append(f"{overall:.3f}" if overall is not None else "")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
