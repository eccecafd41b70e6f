"""Deterministic scripted backend for tests and headless runs.

A script is one planned response: either a list of full-content snapshots
(terminated by Done on the last one) or a failure step. Scripts are consumed
in submission order; when they run out, the backend answers with a fixed
default. Scenario files are JSON:

    {"responses": [
        {"chunks": ["The", "The quick"]},
        {"fail": "auth-failed", "detail": "bad key"},
        {"chunks": [], "final": ""}
    ],
    "default": "(mock response)"}
"""

from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Callable, Iterator

from promptkey.events import CANCELLED, Chunk, Done, Failed, ResponseEvent


class MockBackend:
    name = "mock"

    def __init__(self, scripts: list | None = None, default_response: str = "(mock response)"):
        self._scripts = list(scripts or [])
        self._default = default_response
        self._lock = threading.Lock()
        self.preload_log: list[tuple[str, str | None]] = []
        self.submitted_prompts: list[str] = []

    @classmethod
    def from_file(cls, path: str | Path) -> "MockBackend":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(data.get("responses", []), data.get("default", "(mock response)"))

    def queue_response(self, *chunks: str) -> None:
        self._scripts.append({"chunks": list(chunks)})

    def queue_failure(self, kind: str, detail: str = "") -> None:
        self._scripts.append({"fail": kind, "detail": detail})

    def preload(self, session_key: str, session_ref: str | None) -> None:
        self.preload_log.append((session_key, session_ref))

    def stream(self, request, cancelled: Callable[[], bool]) -> Iterator[ResponseEvent]:
        with self._lock:
            self.submitted_prompts.append(request.prompt)
            script = self._scripts.pop(0) if self._scripts else {"chunks": [], "final": self._default}
        if "fail" in script:
            yield Failed(script["fail"], script.get("detail", ""))
            return
        chunks = script.get("chunks", [])
        last = ""
        for text in chunks:
            if cancelled():
                yield Failed(CANCELLED, "cancelled by user", partial=last)
                return
            last = text
            yield Chunk(text)
        yield Done(script.get("final", last))
