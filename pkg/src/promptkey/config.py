"""Service configuration: INI file plus command-line overrides.

Keys are documented in README.md. Anything structurally wrong (empty hotkey,
unknown backend kind, out-of-range quick-action slot) raises ConfigInvalid up
front, before the event loop starts.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path

from promptkey.errors import ConfigInvalid
from promptkey.gateway.api import DEFAULT_KEY_ENV
from promptkey.prompts import (
    DEFAULT_CONTEXT_CAP,
    DEFAULT_QUICK_ACTIONS,
    DEFAULT_TARGET_LANGUAGE,
    QuickAction,
)
from promptkey.hotkey import DEFAULT_HOTKEY, HotkeyBinding, parse_hotkey

BACKEND_KINDS = ("mock", "api", "relay")


@dataclass(frozen=True)
class BackendConfig:
    kind: str = "mock"
    base_url: str = ""
    model: str = "default"
    api_key_env: str = DEFAULT_KEY_ENV
    provider: str = "default"
    quiescence_window_ms: int = 1000
    hard_timeout_s: float = 120.0
    scenario: str | None = None


@dataclass(frozen=True)
class ServiceConfig:
    hotkey: HotkeyBinding = DEFAULT_HOTKEY
    quick_actions: dict[int, QuickAction] = field(default_factory=lambda: dict(DEFAULT_QUICK_ACTIONS))
    language: str = DEFAULT_TARGET_LANGUAGE
    backend: BackendConfig = field(default_factory=BackendConfig)
    sessions_path: str | None = None
    context_cap: int = DEFAULT_CONTEXT_CAP
    include_context: bool = False
    document: str | None = None
    popup_socket: str | None = None
    lock_dir: str | None = None
    log_level: str = "info"


def _get_bool(section, key, default):
    try:
        return section.getboolean(key, fallback=default)
    except ValueError as exc:
        raise ConfigInvalid(f"[{section.name}] {key}: {exc}") from None


def _get_int(section, key, default):
    try:
        return section.getint(key, fallback=default)
    except ValueError:
        raise ConfigInvalid(f"[{section.name}] {key} must be an integer") from None


def _get_float(section, key, default):
    try:
        return section.getfloat(key, fallback=default)
    except ValueError:
        raise ConfigInvalid(f"[{section.name}] {key} must be a number") from None


def load_config(path: str | Path | None = None) -> ServiceConfig:
    """Parse the key-value config file; missing file means all defaults."""
    parser = configparser.ConfigParser()
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigInvalid(f"config file not found: {path}")
        try:
            parser.read(path, encoding="utf-8")
        except configparser.Error as exc:
            raise ConfigInvalid(f"cannot parse {path}: {exc}") from exc

    config = ServiceConfig()

    if parser.has_section("service"):
        service = parser["service"]
        if "hotkey" in service:
            config = replace(config, hotkey=parse_hotkey(service.get("hotkey", "")))
        config = replace(
            config,
            language=service.get("language", config.language),
            context_cap=_get_int(service, "context_cap", config.context_cap),
            include_context=_get_bool(service, "include_context", config.include_context),
            document=service.get("document", config.document),
            sessions_path=service.get("sessions", config.sessions_path),
            popup_socket=service.get("popup_socket", config.popup_socket),
            lock_dir=service.get("lock_dir", config.lock_dir),
            log_level=service.get("log_level", config.log_level),
        )
        if config.context_cap <= 0:
            raise ConfigInvalid("[service] context_cap must be positive")

    if parser.has_section("backend"):
        backend_section = parser["backend"]
        kind = backend_section.get("kind", "mock").strip().lower()
        if kind not in BACKEND_KINDS:
            raise ConfigInvalid(f"[backend] kind must be one of {BACKEND_KINDS}, got {kind!r}")
        window_ms = _get_int(backend_section, "quiescence_window_ms", 1000)
        hard_s = _get_float(backend_section, "hard_timeout_s", 120.0)
        if not (0 < window_ms / 1000.0 < hard_s):
            raise ConfigInvalid("[backend] need 0 < quiescence window < hard timeout")
        config = replace(
            config,
            backend=BackendConfig(
                kind=kind,
                base_url=backend_section.get("base_url", ""),
                model=backend_section.get("model", "default"),
                api_key_env=backend_section.get("api_key_env", DEFAULT_KEY_ENV),
                provider=backend_section.get("provider", "default"),
                quiescence_window_ms=window_ms,
                hard_timeout_s=hard_s,
                scenario=backend_section.get("scenario", None),
            ),
        )

    actions = dict(DEFAULT_QUICK_ACTIONS)
    for name in parser.sections():
        if not name.startswith("quick_action."):
            continue
        try:
            slot = int(name.split(".", 1)[1])
        except ValueError:
            raise ConfigInvalid(f"bad quick action section [{name}]") from None
        if not 1 <= slot <= 5:
            raise ConfigInvalid(f"quick action slot must be 1..5, got {slot}")
        section = parser[name]
        template = section.get("template", "").strip()
        if not template:
            raise ConfigInvalid(f"[{name}] needs a template")
        actions[slot] = QuickAction(slot, section.get("label", f"action {slot}"), template)
    config = replace(config, quick_actions=actions)

    return config
