"""Hotkey binding parsing and OS-level exclusivity.

Exclusivity uses an advisory file lock keyed by the canonical binding: two
service instances on the same machine cannot claim the same hotkey, and the
loser gets HotkeyUnavailable. Actual key capture is a thin optional layer;
in headless mode a scripted event source replaces it entirely.
"""

from __future__ import annotations

import os
import re
import tempfile
from dataclasses import dataclass
from pathlib import Path

from promptkey.errors import ConfigInvalid, HotkeyUnavailable

_MODIFIER_ALIASES = {
    "alt": "alt",
    "ctrl": "ctrl",
    "control": "ctrl",
    "shift": "shift",
    "meta": "meta",
    "win": "meta",
    "cmd": "meta",
    "super": "meta",
}


@dataclass(frozen=True)
class HotkeyBinding:
    modifiers: frozenset[str]
    key: str

    def canonical(self) -> str:
        return "+".join([*sorted(self.modifiers), self.key])


def parse_hotkey(spec: str) -> HotkeyBinding:
    spec = (spec or "").strip().lower()
    if not spec:
        raise ConfigInvalid("hotkey binding is empty")
    parts = [p.strip() for p in spec.split("+")]
    if any(not p for p in parts):
        raise ConfigInvalid(f"malformed hotkey {spec!r}")
    *mods, key = parts
    modifiers = set()
    for mod in mods:
        if mod not in _MODIFIER_ALIASES:
            raise ConfigInvalid(f"unknown modifier {mod!r} in hotkey {spec!r}")
        modifiers.add(_MODIFIER_ALIASES[mod])
    if not re.fullmatch(r"[a-z0-9]|f[0-9]{1,2}|space|tab|enter", key):
        raise ConfigInvalid(f"unsupported key {key!r} in hotkey {spec!r}")
    return HotkeyBinding(frozenset(modifiers), key)


DEFAULT_HOTKEY = HotkeyBinding(frozenset({"alt"}), "1")


class HotkeyRegistration:
    """Machine-wide claim on a binding via an exclusive file lock."""

    def __init__(self, binding: HotkeyBinding, lock_dir: str | Path | None = None):
        directory = Path(lock_dir) if lock_dir else Path(tempfile.gettempdir())
        slug = binding.canonical().replace("+", "-")
        self.path = directory / f"promptkey-hotkey-{slug}.lock"
        self._handle = None

    def acquire(self) -> None:
        import fcntl

        self.path.parent.mkdir(parents=True, exist_ok=True)
        handle = open(self.path, "w")
        try:
            fcntl.flock(handle.fileno(), fcntl.LOCK_EX | fcntl.LOCK_NB)
        except OSError:
            handle.close()
            raise HotkeyUnavailable(
                f"hotkey already registered by another instance ({self.path.name})"
            ) from None
        handle.write(str(os.getpid()))
        handle.flush()
        self._handle = handle

    def release(self) -> None:
        if self._handle is not None:
            import fcntl

            try:
                fcntl.flock(self._handle.fileno(), fcntl.LOCK_UN)
            finally:
                self._handle.close()
                self._handle = None

    def __enter__(self):
        self.acquire()
        return self

    def __exit__(self, *exc):
        self.release()
