"""Service core: hotkey, interaction state machine, and orchestration."""

from promptkey.service.state import (
    AcceptInsert,
    Cancel,
    DirectStreaming,
    Escape,
    Idle,
    InsertFinished,
    Inserting,
    MachineConfig,
    MenuOpen,
    Previewing,
    QueryPending,
    QuickActionPressed,
    ResponseArrived,
    ResponseFailedEvent,
    Retype,
    StreamFinished,
    SubmitQuery,
    TRANSITIONS,
    Transition,
    Trigger,
    action_kind,
    dispatch_action,
    state_kind,
)
from promptkey.service.loop import PromptService
from promptkey.hotkey import DEFAULT_HOTKEY, HotkeyBinding, HotkeyRegistration, parse_hotkey

__all__ = [
    "AcceptInsert",
    "Cancel",
    "DirectStreaming",
    "Escape",
    "Idle",
    "InsertFinished",
    "Inserting",
    "MachineConfig",
    "MenuOpen",
    "Previewing",
    "PromptService",
    "QueryPending",
    "QuickActionPressed",
    "ResponseArrived",
    "ResponseFailedEvent",
    "Retype",
    "StreamFinished",
    "SubmitQuery",
    "TRANSITIONS",
    "Transition",
    "Trigger",
    "action_kind",
    "dispatch_action",
    "state_kind",
    "DEFAULT_HOTKEY",
    "HotkeyBinding",
    "HotkeyRegistration",
    "parse_hotkey",
]
