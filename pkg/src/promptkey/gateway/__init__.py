"""Uniform backend interface producing normalized response-event streams.

One in-flight request per session; cancellation delivers exactly one terminal
``Failed(cancelled)`` and suppresses anything the backend produces afterwards.
Workers never share state with the caller: events go out through the ``emit``
callback (normally the service loop's queue).
"""

from __future__ import annotations

import itertools
import logging
import threading
import time
from dataclasses import dataclass
from typing import Callable

from promptkey.errors import Busy, UnknownRequest
from promptkey.events import (
    BACKEND_UNAVAILABLE,
    CANCELLED,
    Failed,
    ResponseEvent,
    is_terminal,
)
from promptkey.gateway.api import ApiBackend, ApiConfig
from promptkey.gateway.mock import MockBackend
from promptkey.gateway.quiescence import QuiescenceMonitor, QuiescenceRule
from promptkey.gateway.relay import RelayBackend

logger = logging.getLogger(__name__)

__all__ = [
    "ApiBackend",
    "ApiConfig",
    "BackendRequest",
    "Gateway",
    "MockBackend",
    "QuiescenceMonitor",
    "QuiescenceRule",
    "RelayBackend",
]

_request_counter = itertools.count(1)


def next_request_id() -> str:
    return f"req-{next(_request_counter)}"


@dataclass(frozen=True)
class BackendRequest:
    request_id: str
    session_key: str
    prompt: str
    created: float
    backend_session_ref: str | None = None
    history: tuple[tuple[str, str], ...] = ()


class _Flight:
    def __init__(self, session_key: str):
        self.session_key = session_key
        self.cancel = threading.Event()
        self.lock = threading.Lock()
        self.terminal_sent = False


class Gateway:
    def __init__(self, backend, emit: Callable[[str, ResponseEvent], None] | None = None):
        self.backend = backend
        self._emit = emit or (lambda request_id, event: None)
        self._flights: dict[str, _Flight] = {}
        self._lock = threading.Lock()

    # -- request lifecycle -------------------------------------------------

    def new_request(self, session_key: str, prompt: str,
                    backend_session_ref: str | None = None,
                    history: tuple[tuple[str, str], ...] = ()) -> BackendRequest:
        return BackendRequest(
            request_id=next_request_id(),
            session_key=session_key,
            prompt=prompt,
            created=time.time(),
            backend_session_ref=backend_session_ref,
            history=history,
        )

    def submit(self, request: BackendRequest) -> str:
        """Start streaming on a worker; events arrive via the emit callback."""
        flight = self._register(request)
        worker = threading.Thread(
            target=self._run, args=(request, flight), daemon=True,
            name=f"gateway-{request.request_id}",
        )
        worker.start()
        return request.request_id

    def collect(self, request: BackendRequest) -> list[ResponseEvent]:
        """Synchronous submit; returns the full event list (tests, tools)."""
        flight = self._register(request)
        collected: list[ResponseEvent] = []
        self._run(request, flight, extra=collected.append)
        return collected

    def cancel(self, request_id: str) -> bool:
        with self._lock:
            flight = self._flights.get(request_id)
        if flight is None:
            raise UnknownRequest(request_id)
        with flight.lock:
            flight.cancel.set()
        return True

    def preload(self, session_key: str, session_ref: str | None) -> None:
        try:
            self.backend.preload(session_key, session_ref)
        except Exception:
            logger.warning("preload failed (best effort)", exc_info=True)

    def in_flight_for_session(self, session_key: str) -> bool:
        with self._lock:
            return any(f.session_key == session_key for f in self._flights.values())

    # -- worker ------------------------------------------------------------

    def _register(self, request: BackendRequest) -> _Flight:
        with self._lock:
            for flight in self._flights.values():
                if flight.session_key == request.session_key:
                    raise Busy(f"session {request.session_key} already has a request in flight")
            flight = _Flight(request.session_key)
            self._flights[request.request_id] = flight
            return flight

    def _run(self, request: BackendRequest, flight: _Flight, extra=None) -> None:
        def deliver(event: ResponseEvent) -> None:
            self._emit(request.request_id, event)
            if extra is not None:
                extra(event)

        terminal: ResponseEvent | None = None
        try:
            for event in self.backend.stream(request, flight.cancel.is_set):
                with flight.lock:
                    if flight.cancel.is_set():
                        break
                    if is_terminal(event):
                        terminal = event
                        break
                    deliver(event)
        except Exception as exc:
            logger.exception("backend stream crashed")
            terminal = Failed(BACKEND_UNAVAILABLE, f"backend error: {exc}")
        finally:
            if flight.cancel.is_set() and terminal is None:
                terminal = Failed(CANCELLED, "cancelled by user")
            if terminal is None:
                terminal = Failed(BACKEND_UNAVAILABLE, "stream ended without terminal event")
            with self._lock:
                self._flights.pop(request.request_id, None)
            with flight.lock:
                if not flight.terminal_sent:
                    flight.terminal_sent = True
                    deliver(terminal)
