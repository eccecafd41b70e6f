"""Normalized response-stream events.

Every backend (direct API, browser relay, or mock) is normalized to the same
stream shape: zero or more ``Chunk`` events, each carrying the complete
response text so far, followed by exactly one terminal ``Done`` or ``Failed``.
"""

from __future__ import annotations

from dataclasses import dataclass


# Failure kinds carried by Failed events.
AUTH_FAILED = "auth-failed"
BACKEND_UNAVAILABLE = "backend-unavailable"
BUSY = "busy"
CANCELLED = "cancelled"
CONNECTION_LOST = "connection-lost"
HARD_TIMEOUT = "hard-timeout"
PROTOCOL_ERROR = "protocol-error"
SUBMIT_FAILED = "submit-failed"


@dataclass(frozen=True)
class Chunk:
    """Interim event: the complete response text observed so far."""

    text: str


@dataclass(frozen=True)
class Done:
    """Terminal event: the final response text."""

    text: str


@dataclass(frozen=True)
class Failed:
    """Terminal event: the request failed; partial text may be attached."""

    kind: str
    detail: str = ""
    partial: str = ""


ResponseEvent = Chunk | Done | Failed


def is_terminal(event: ResponseEvent) -> bool:
    return isinstance(event, (Done, Failed))


def check_stream_grammar(events: list[ResponseEvent]) -> None:
    """Assert the (Chunk)* (Done|Failed) grammar; raises AssertionError."""
    assert events, "empty stream: missing terminal event"
    *interim, last = events
    assert is_terminal(last), f"stream must end with a terminal event, got {last!r}"
    for ev in interim:
        assert isinstance(ev, Chunk), f"non-terminal event {ev!r} after start"
