"""Chat session store keyed by (app name, window title).

Triggering from the same window resumes the same conversation; a new title
starts a fresh one. Persistence is a versioned JSON file written atomically
(temp file + rename), so a crash mid-write leaves either the old or the new
state, never a corrupt store.
"""

from __future__ import annotations

import json
import os
import re
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

from promptkey.errors import StoreUnavailable

STORE_VERSION = 1

_WHITESPACE = re.compile(r"\s+")
_KEY_SEP = "\x1f"


def normalize_key(app_name: str, window_title: str) -> str:
    """Canonical session key: casefolded, trimmed, whitespace collapsed.

    An empty title degrades the key to the app name alone.
    """
    app = _WHITESPACE.sub(" ", app_name.strip().casefold())
    title = _WHITESPACE.sub(" ", window_title.strip().casefold())
    return f"{app}{_KEY_SEP}{title}" if title else app


@dataclass(frozen=True)
class SessionKey:
    app_name: str
    window_title: str

    @property
    def normalized(self) -> str:
        return normalize_key(self.app_name, self.window_title)


@dataclass
class ChatSession:
    key: SessionKey
    backend_session_ref: str | None = None
    exchanges: list[tuple[str, str, float]] = field(default_factory=list)
    created: float = 0.0
    last_used: float = 0.0

    def to_dict(self) -> dict:
        return {
            "app_name": self.key.app_name,
            "window_title": self.key.window_title,
            "backend_session_ref": self.backend_session_ref,
            "exchanges": [list(e) for e in self.exchanges],
            "created": self.created,
            "last_used": self.last_used,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ChatSession":
        return cls(
            key=SessionKey(data["app_name"], data["window_title"]),
            backend_session_ref=data.get("backend_session_ref"),
            exchanges=[tuple(e) for e in data.get("exchanges", [])],
            created=data.get("created", 0.0),
            last_used=data.get("last_used", 0.0),
        )


class SessionStore:
    """Single-writer store; the service event loop owns all mutations."""

    def __init__(self, path: str | Path | None = None):
        self._path = Path(path) if path is not None else None
        self._sessions: dict[str, ChatSession] = {}
        if self._path is not None and self._path.exists():
            self._load()

    def __len__(self) -> int:
        return len(self._sessions)

    def lookup_or_create(self, key: SessionKey, now: float | None = None) -> tuple[ChatSession, bool]:
        now = time.time() if now is None else now
        normalized = key.normalized
        session = self._sessions.get(normalized)
        if session is not None:
            return session, False
        session = ChatSession(key=key, created=now, last_used=now)
        self._sessions[normalized] = session
        self._persist()
        return session, True

    def append_exchange(self, session: ChatSession, prompt: str, response: str,
                        now: float | None = None) -> ChatSession:
        now = time.time() if now is None else now
        session.exchanges.append((prompt, response, now))
        session.last_used = now
        self._persist()
        return session

    def set_backend_ref(self, session: ChatSession, ref: str) -> None:
        if session.backend_session_ref is None:
            session.backend_session_ref = ref
            self._persist()

    def evict(self, before: float) -> int:
        stale = [k for k, s in self._sessions.items() if s.last_used < before]
        for k in stale:
            del self._sessions[k]
        if stale:
            self._persist()
        return len(stale)

    def snapshot(self) -> dict[str, ChatSession]:
        return dict(self._sessions)

    # -- persistence -----------------------------------------------------

    def _load(self) -> None:
        try:
            data = json.loads(self._path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise StoreUnavailable(f"cannot read session store: {exc}") from exc
        if data.get("version") != STORE_VERSION:
            raise StoreUnavailable(f"unsupported store version {data.get('version')}")
        self._sessions = {}
        for item in data.get("sessions", []):
            session = ChatSession.from_dict(item)
            self._sessions[session.key.normalized] = session

    def _persist(self) -> None:
        if self._path is None:
            return
        payload = {
            "version": STORE_VERSION,
            "sessions": [s.to_dict() for s in self._sessions.values()],
        }
        text = json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=1)
        try:
            self._path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(
                dir=self._path.parent, prefix=self._path.name, suffix=".tmp"
            )
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as handle:
                    handle.write(text)
                    handle.flush()
                    os.fsync(handle.fileno())
                os.replace(tmp, self._path)
            finally:
                if os.path.exists(tmp):
                    os.unlink(tmp)
        except OSError as exc:
            raise StoreUnavailable(f"cannot write session store: {exc}") from exc


def export_text(store: SessionStore) -> str:
    """Human-readable dump, one block per session (newlines escaped)."""
    lines = [f"# promptkey session export v{STORE_VERSION}"]
    for normalized in sorted(store.snapshot()):
        session = store.snapshot()[normalized]
        lines.append("")
        lines.append(f"session: {session.key.app_name} | {session.key.window_title}")
        lines.append(f"created: {_iso(session.created)}")
        lines.append(f"last_used: {_iso(session.last_used)}")
        lines.append(f"exchanges: {len(session.exchanges)}")
        for prompt, response, ts in session.exchanges:
            lines.append(f"  - [{_iso(ts)}] prompt: {_flat(prompt)}")
            lines.append(f"    response: {_flat(response)}")
    return "\n".join(lines) + "\n"


def _iso(ts: float) -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(ts))


def _flat(text: str) -> str:
    return text.replace("\\", "\\\\").replace("\n", "\\n")
