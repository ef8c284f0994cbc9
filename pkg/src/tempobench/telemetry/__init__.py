from .store import (
    EXPORT_HEADER,
    ExclusionPolicy,
    SessionRecord,
    SessionStore,
    apply_exclusions,
    completion_flag,
    export_durations_csv,
    session_durations,
)
from .service import create_app, session_payload

__all__ = [
    "EXPORT_HEADER",
    "ExclusionPolicy",
    "SessionRecord",
    "SessionStore",
    "apply_exclusions",
    "completion_flag",
    "export_durations_csv",
    "session_durations",
    "create_app",
    "session_payload",
]
