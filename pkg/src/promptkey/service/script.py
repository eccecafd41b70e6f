"""Headless event scripts: a scripted event source replacing the OS hotkey.

One command per line; blank lines and ``#`` comments are skipped:

    trigger                  press the global hotkey
    quick <slot>             press a quick-action number key
    submit <text>            submit a typed query
    submit-direct <text>     submit with the direct-stream modifier held
    retype <text>            edit the query text
    accept                   TAB: insert replacing the selection
    accept-append            SHIFT+TAB: append below the selection
    escape                   ESC
    cancel                   cancel direct streaming
    wait <state>             block until the machine reaches the state kind
    sleep <seconds>          real-time pause
    shutdown                 stop the service loop
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

from promptkey.service.loop import PromptService
from promptkey.service.state import (
    AcceptInsert,
    Cancel,
    Escape,
    QuickActionPressed,
    Retype,
    SubmitQuery,
    state_kind,
)

_STATE_NAMES = {"idle", "menu_open", "query_pending", "previewing", "inserting", "direct_streaming"}


@dataclass(frozen=True)
class Command:
    verb: str
    arg: str = ""


def parse_script(text: str) -> list[Command]:
    commands = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        verb, _, arg = line.partition(" ")
        verb = verb.lower()
        arg = arg.strip()
        if verb in ("trigger", "accept", "accept-append", "escape", "cancel", "shutdown"):
            if arg:
                raise ValueError(f"line {lineno}: {verb} takes no argument")
        elif verb == "quick":
            if not arg.isdigit():
                raise ValueError(f"line {lineno}: quick needs a slot number")
        elif verb in ("submit", "submit-direct", "retype"):
            if not arg:
                raise ValueError(f"line {lineno}: {verb} needs text")
        elif verb == "wait":
            if arg not in _STATE_NAMES:
                raise ValueError(f"line {lineno}: unknown state {arg!r}")
        elif verb == "sleep":
            float(arg)
        else:
            raise ValueError(f"line {lineno}: unknown command {verb!r}")
        commands.append(Command(verb, arg))
    return commands


def load_script(path: str | Path) -> list[Command]:
    return parse_script(Path(path).read_text(encoding="utf-8"))


def run_script(service: PromptService, commands: list[Command], timeout: float = 5.0) -> None:
    """Feed commands to a running service; raises TimeoutError on a stuck wait."""
    for command in commands:
        if command.verb == "trigger":
            service.trigger()
        elif command.verb == "quick":
            service.post_action(QuickActionPressed(int(command.arg)))
        elif command.verb == "submit":
            service.post_action(SubmitQuery(command.arg))
        elif command.verb == "submit-direct":
            service.post_action(SubmitQuery(command.arg, direct=True))
        elif command.verb == "retype":
            service.post_action(Retype(command.arg))
        elif command.verb == "accept":
            service.post_action(AcceptInsert(append=False))
        elif command.verb == "accept-append":
            service.post_action(AcceptInsert(append=True))
        elif command.verb == "escape":
            service.post_action(Escape())
        elif command.verb == "cancel":
            service.post_action(Cancel())
        elif command.verb == "wait":
            _wait_for_state(service, command.arg, timeout)
        elif command.verb == "sleep":
            time.sleep(float(command.arg))
        elif command.verb == "shutdown":
            service.shutdown()
            return
    service.shutdown()


def _wait_for_state(service: PromptService, target: str, timeout: float) -> None:
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        if state_kind(service.state) == target:
            return
        time.sleep(0.002)
    raise TimeoutError(
        f"service never reached {target}; stuck in {state_kind(service.state)}"
    )
