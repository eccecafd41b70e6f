"""Command-line entry point.

    promptkey run [--config FILE] [--backend mock|api|relay] [--headless SCRIPT]
                  [--document FIXTURE] [--log-level LEVEL]
    promptkey sessions export [--config FILE]

Exit codes: 0 clean shutdown, 1 script/runtime failure, 2 invalid config,
3 hotkey unavailable.
"""

from __future__ import annotations

import argparse
import logging
import sys
import threading
from dataclasses import replace

from promptkey.config import BACKEND_KINDS, ServiceConfig, load_config
from promptkey.errors import ConfigInvalid, HotkeyUnavailable
from promptkey.focus import SimNode, SimulatedAdapter, SimulatedDocument, load_simdoc
from promptkey.gateway import ApiBackend, ApiConfig, MockBackend, QuiescenceRule, RelayBackend
from promptkey.hotkey import HotkeyRegistration
from promptkey.service.loop import PromptService
from promptkey.service.popup import PopupSocketServer
from promptkey.service.script import load_script, run_script
from promptkey.sessions import SessionStore, export_text

logger = logging.getLogger(__name__)


def _build_adapter(config: ServiceConfig) -> SimulatedAdapter:
    if config.document:
        return SimulatedAdapter(load_simdoc(config.document))
    # No document fixture: an empty editable scratch document. Real OS
    # adapters would slot in here behind the same interface.
    body = SimNode("body", "document", text="", editable=True, focused=True)
    doc = SimulatedDocument(SimNode("root", "window", children=[body]),
                            app_name="scratch", window_title="scratch")
    return SimulatedAdapter(doc)


def _build_backend(config: ServiceConfig):
    backend = config.backend
    if backend.kind == "mock":
        if backend.scenario:
            return MockBackend.from_file(backend.scenario)
        return MockBackend()
    if backend.kind == "api":
        if not backend.base_url:
            raise ConfigInvalid("[backend] base_url is required for the api backend")
        return ApiBackend(
            ApiConfig(
                base_url=backend.base_url,
                model=backend.model,
                api_key_env=backend.api_key_env,
            )
        )
    if backend.kind == "relay":
        from promptkey.bridge import BridgeChannel, Dispatcher

        channel = BridgeChannel(sys.stdin.buffer, sys.stdout.buffer)
        dispatcher = Dispatcher(channel, role="service")
        dispatcher.start()
        rule = QuiescenceRule(
            backend.quiescence_window_ms / 1000.0, backend.hard_timeout_s
        )
        return RelayBackend(dispatcher, provider=backend.provider, rule=rule)
    raise ConfigInvalid(f"unknown backend kind {backend.kind!r}")


def run_service(config: ServiceConfig, script_path: str | None = None) -> int:
    """Wire everything and run the event loop until shutdown."""
    adapter = _build_adapter(config)
    backend = _build_backend(config)
    store = SessionStore(config.sessions_path)
    service = PromptService(config, adapter, backend, store)

    registration = None
    if script_path is None:
        # Real mode claims the hotkey machine-wide before anything else.
        registration = HotkeyRegistration(config.hotkey, config.lock_dir)
        registration.acquire()
        logger.info("registered hotkey %s", config.hotkey.canonical())

    popup_server = None
    if config.popup_socket:
        popup_server = PopupSocketServer(config.popup_socket, service)
        popup_server.start()

    script_thread = None
    if script_path is not None:
        try:
            commands = load_script(script_path)
        except (OSError, ValueError) as exc:
            raise ConfigInvalid(f"bad headless script: {exc}") from exc

        def feed():
            try:
                run_script(service, commands)
            except Exception:
                logger.exception("headless script failed")
                service.exit_code = 1
                service.shutdown()

        script_thread = threading.Thread(target=feed, daemon=True, name="script")
        script_thread.start()

    try:
        return service.run()
    except KeyboardInterrupt:
        return 0
    finally:
        if script_thread is not None:
            script_thread.join(timeout=5)
        if popup_server is not None:
            popup_server.stop()
        if registration is not None:
            registration.release()


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0].startswith("-"):
        argv.insert(0, "run")

    parser = argparse.ArgumentParser(prog="promptkey", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run the background service")
    run_p.add_argument("--config", help="path to the config file")
    run_p.add_argument("--backend", choices=BACKEND_KINDS, help="override the backend kind")
    run_p.add_argument("--headless", metavar="SCRIPT",
                       help="scripted event source instead of the OS hotkey")
    run_p.add_argument("--document", metavar="SIMDOC",
                       help="simulated document fixture to operate on")
    run_p.add_argument("--popup-socket", metavar="PATH", help="popup UI socket path")
    run_p.add_argument("--log-level", default=None)

    sessions_p = sub.add_parser("sessions", help="session store tools")
    sessions_sub = sessions_p.add_subparsers(dest="sessions_command", required=True)
    export_p = sessions_sub.add_parser("export", help="dump sessions as text")
    export_p.add_argument("--config", help="path to the config file")

    args = parser.parse_args(argv)

    try:
        config = load_config(getattr(args, "config", None))
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    if args.command == "sessions":
        store = SessionStore(config.sessions_path)
        sys.stdout.write(export_text(store))
        return 0

    if args.backend:
        config = replace(config, backend=replace(config.backend, kind=args.backend))
    if args.document:
        config = replace(config, document=args.document)
    if args.popup_socket:
        config = replace(config, popup_socket=args.popup_socket)
    level = args.log_level or config.log_level
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )

    try:
        return run_service(config, script_path=args.headless)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except HotkeyUnavailable as exc:
        print(f"hotkey error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
