"""HTTP surface of the telemetry service.

POST /v1/sessions ingests one game session (201 stored, 409 duplicate,
422 schema violation), GET /v1/sessions lists retained ids under an
exclusion policy, and GET /v1/export.csv streams the per-order duration
table.  Request bodies above the configured size limit get a 413.
"""

from __future__ import annotations

import time

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, Field, field_validator

from .store import (
    ExclusionPolicy,
    SessionRecord,
    SessionStore,
    apply_exclusions,
    completion_flag,
    export_durations_csv,
)

DEFAULT_MAX_BODY_BYTES = 2 * 1024 * 1024


class EventIn(BaseModel):
    t_ms: int = Field(ge=0)
    kind: str = Field(min_length=1)
    payload: dict = Field(default_factory=dict)


class SurveyItemIn(BaseModel):
    id: str = Field(min_length=1)
    score: int = Field(ge=1, le=5)


class SurveyIn(BaseModel):
    items: list[SurveyItemIn]
    free_text: str | None = None


class SessionIn(BaseModel):
    session_id: str = Field(min_length=1)
    worker_id: str = Field(min_length=1)
    client_version: str = Field(min_length=1)
    events: list[EventIn]
    survey: SurveyIn | None = None

    @field_validator("events")
    @classmethod
    def _times_nondecreasing(cls, events: list[EventIn]) -> list[EventIn]:
        times = [e.t_ms for e in events]
        if any(b < a for a, b in zip(times, times[1:])):
            raise ValueError("event times must be nondecreasing")
        return events


def create_app(store: SessionStore,
               max_body_bytes: int = DEFAULT_MAX_BODY_BYTES) -> FastAPI:
    app = FastAPI(title="tempobench telemetry", version="1")

    @app.middleware("http")
    async def limit_body(request: Request, call_next):
        length = request.headers.get("content-length")
        if length is not None and int(length) > max_body_bytes:
            return JSONResponse(
                status_code=413,
                content={"detail": f"body exceeds {max_body_bytes} bytes"},
            )
        return await call_next(request)

    @app.post("/v1/sessions", status_code=201)
    def ingest(session: SessionIn, response: Response) -> dict:
        record = SessionRecord(
            session_id=session.session_id,
            worker_id=session.worker_id,
            received_at=time.time(),
            client_version=session.client_version,
            events=[e.model_dump() for e in session.events],
            survey=session.survey.model_dump() if session.survey else None,
            completed=completion_flag([e.model_dump() for e in session.events]),
        )
        stored = store.append(record)
        if not stored:
            response.status_code = 409
            return {"session_id": session.session_id, "stored": False, "duplicate": True}
        return {"session_id": session.session_id, "stored": True,
                "completed": record.completed}

    @app.get("/v1/sessions")
    def retained(policy: str | None = None) -> dict:
        try:
            parsed = ExclusionPolicy.parse(policy)
        except ValueError as exc:
            return JSONResponse(status_code=422, content={"detail": str(exc)})
        return {"policy": parsed.describe(), "retained": apply_exclusions(store, parsed)}

    @app.get("/v1/export.csv")
    def export(policy: str | None = None):
        try:
            parsed = ExclusionPolicy.parse(policy)
        except ValueError as exc:
            return JSONResponse(status_code=422, content={"detail": str(exc)})
        return PlainTextResponse(export_durations_csv(store, parsed),
                                 media_type="text/csv")

    return app


def session_payload(session_id: str, worker_id: str, events: list[dict],
                    client_version: str = "sim-1",
                    survey: dict | None = None) -> dict:
    """Assemble a wire payload from an event list (e.g. a simulator trace)."""
    return {
        "session_id": session_id,
        "worker_id": worker_id,
        "client_version": client_version,
        "events": events,
        "survey": survey,
    }
