"""The service event loop.

One logical loop owns the InteractionState. Hotkey triggers, popup actions,
and backend stream events all arrive as queued events; long-running work
(HTTP, typed streaming) happens on workers that only talk back through the
queue. Insertion itself runs on the loop, so a trigger-submit-accept round
trip performs exactly one adapter insertion.
"""

from __future__ import annotations

import logging
import queue
import threading
from dataclasses import replace
from typing import Callable

from promptkey.bridge import BridgeMessage, Dispatcher
from promptkey.config import ServiceConfig
from promptkey.diffing import render_preview, word_diff
from promptkey.errors import (
    AdapterFailure,
    CaptureFailed,
    ClipboardUnavailable,
    EmptyQuery,
    IllegalTransition,
    NotEditable,
    PasteRejected,
    UndoFailed,
    UnknownRequest,
    UnknownSlot,
)
from promptkey.events import Chunk, Done, Failed, is_terminal
from promptkey.focus import FocusContext, SelectionCapture
from promptkey.gateway import Gateway
from promptkey.prompts import build_prompt
from promptkey.service.state import (
    Action,
    CancelActive,
    CloseMenu,
    DirectStreaming,
    DoInsert,
    Idle,
    InsertFinished,
    MachineConfig,
    MenuOpen,
    OpenMenu,
    Preload,
    QueryPending,
    QuickActionPressed,
    ResponseArrived,
    ResponseFailedEvent,
    Retype,
    ShowError,
    ShowPreview,
    StartQuery,
    State,
    StreamFinished,
    SubmitQuery,
    AcceptInsert,
    Cancel,
    Escape,
    Transition,
    Trigger,
    dispatch_action,
    state_kind,
)
from promptkey.sessions import SessionKey, SessionStore

logger = logging.getLogger(__name__)


def action_from_message(body: dict) -> Action:
    """Translate a popup user_action message into a machine action."""
    kind = body.get("action")
    if kind == "quick":
        return QuickActionPressed(int(body.get("slot", 0)))
    if kind == "submit":
        return SubmitQuery(body.get("text", ""), bool(body.get("direct", False)))
    if kind == "accept":
        return AcceptInsert(bool(body.get("append", False)))
    if kind == "escape":
        return Escape()
    if kind == "retype":
        return Retype(body.get("text", ""))
    if kind == "cancel":
        return Cancel()
    raise ValueError(f"unknown user action {kind!r}")


class PromptService:
    def __init__(
        self,
        config: ServiceConfig,
        adapter,
        backend,
        store: SessionStore | None = None,
    ):
        self.config = config
        self.adapter = adapter
        self.store = store if store is not None else SessionStore(config.sessions_path)
        self.state: State = Idle()
        self.gateway = Gateway(backend, emit=self._on_backend_event)
        self.ui_log: list[BridgeMessage] = []
        self.exit_code = 0
        self._machine_config = MachineConfig(
            quick_actions=config.quick_actions,
            language=config.language,
            context_cap=config.context_cap,
            include_context=config.include_context,
        )
        self._events: queue.Queue = queue.Queue()
        self._ui_dispatchers: list[Dispatcher] = []
        self._ui_seq = 0
        self._ui_lock = threading.Lock()
        self._active_request: str | None = None
        self._active_prompt = None  # PromptRequest of the in-flight query
        self._direct_inbox: queue.Queue | None = None
        self._direct_cancel = threading.Event()
        self._stopped = False

    # -- inputs (thread-safe) ----------------------------------------------

    def trigger(self) -> None:
        self._events.put(("trigger",))

    def post_action(self, action: Action) -> None:
        self._events.put(("action", action))

    def shutdown(self) -> None:
        self._events.put(("shutdown",))

    def _on_backend_event(self, request_id: str, event) -> None:
        self._events.put(("backend", request_id, event))

    # -- popup channel ---------------------------------------------------------

    def attach_ui(self, dispatcher: Dispatcher) -> None:
        dispatcher.register(
            "user_action",
            lambda msg: (self.post_action(action_from_message(msg.body)), None)[1],
        )
        self._ui_dispatchers.append(dispatcher)

    def _ui_send(self, msg_type: str, body: dict) -> None:
        with self._ui_lock:
            self._ui_seq += 1
            msg = BridgeMessage(msg_type, self._ui_seq, body)
        self.ui_log.append(msg)
        for dispatcher in list(self._ui_dispatchers):
            try:
                dispatcher.send(msg)
            except Exception:
                logger.warning("popup channel lost", exc_info=True)
                self._ui_dispatchers.remove(dispatcher)

    # -- loop ------------------------------------------------------------------

    def run(self) -> int:
        """Consume events until shutdown; returns the exit status."""
        while not self._stopped:
            item = self._events.get()
            try:
                self._process(item)
            except Exception:
                logger.exception("event processing failed; state preserved")
        return self.exit_code

    def _process(self, item: tuple) -> None:
        tag = item[0]
        if tag == "shutdown":
            self._stopped = True
            self._apply_effect(CancelActive())
            return
        if tag == "trigger":
            self._handle_trigger()
            return
        if tag == "action":
            action = item[1]
            ok = self._dispatch(action)
            # Typing that ended early (failed/cancelled) abandons the rest of
            # the still-streaming response.
            if ok and isinstance(action, StreamFinished) and self._active_request:
                self._effect_cancel_active()
            return
        if tag == "backend":
            self._handle_backend(item[1], item[2])
            return
        logger.warning("unknown event %r", tag)

    # -- trigger --------------------------------------------------------------

    def _handle_trigger(self) -> None:
        try:
            focus = self.adapter.capture_focus()
            selection = self.adapter.extract_selection(
                focus, want_context=self.config.include_context
            )
            action = Trigger(focus, selection)
        except (CaptureFailed, AdapterFailure, ClipboardUnavailable, UndoFailed) as exc:
            logger.warning("capture failed, opening degraded menu: %s", exc)
            focus = FocusContext("", "", 0, editable=False, adapter_id="none")
            action = Trigger(focus, SelectionCapture(""), warning=str(exc))
        self._dispatch(action)

    # -- machine dispatch ---------------------------------------------------------

    def _dispatch(self, action: Action) -> bool:
        try:
            transition = dispatch_action(self.state, action, self._machine_config)
        except IllegalTransition as exc:
            logger.info("rejected action: %s", exc)
            return False
        except (EmptyQuery, UnknownSlot) as exc:
            logger.info("rejected action: %s", exc)
            return False
        self.state = transition.state
        for effect in transition.effects:
            self._apply_effect(effect)
        return True

    def _apply_effect(self, effect) -> None:
        if isinstance(effect, OpenMenu):
            self._effect_open_menu()
        elif isinstance(effect, CloseMenu):
            self._ui_send("menu_close", {})
        elif isinstance(effect, Preload):
            self._effect_preload()
        elif isinstance(effect, StartQuery):
            self._effect_start_query(effect)
        elif isinstance(effect, CancelActive):
            self._effect_cancel_active()
        elif isinstance(effect, DoInsert):
            self._effect_insert(effect)
        elif isinstance(effect, ShowPreview):
            self._effect_show_preview(effect)
        elif isinstance(effect, ShowError):
            self._ui_send(
                "preview_update",
                {"runs": [], "streaming": False, "error": f"{effect.kind}: {effect.detail}"},
            )
        else:
            raise AssertionError(f"unhandled effect {effect!r}")

    # -- effects ---------------------------------------------------------------

    def _effect_open_menu(self) -> None:
        state = self.state
        assert isinstance(state, MenuOpen)
        self._ui_send(
            "menu_open",
            {
                "selection": state.selection.selected_text,
                "editable": state.focus.editable,
                "warning": state.warning or state.error_banner,
                "quick_actions": [
                    self.config.quick_actions[slot].label
                    for slot in sorted(self.config.quick_actions)
                ],
                "app_name": state.focus.app_name,
            },
        )

    def _session_for(self, focus: FocusContext):
        key = SessionKey(focus.app_name, focus.window_title)
        session, _created = self.store.lookup_or_create(key)
        return session

    def _effect_preload(self) -> None:
        state = self.state
        assert isinstance(state, MenuOpen)
        session = self._session_for(state.focus)
        self.gateway.preload(session.key.normalized, session.backend_session_ref)

    def _effect_start_query(self, effect: StartQuery) -> None:
        state = self.state
        session = self._session_for(state.focus)
        prompt_text = build_prompt(effect.request)
        request = self.gateway.new_request(
            session_key=session.key.normalized,
            prompt=prompt_text,
            backend_session_ref=session.backend_session_ref,
            history=tuple((p, r) for p, r, _ts in session.exchanges),
        )
        self._active_prompt = prompt_text
        if effect.direct:
            self._start_direct_worker(state.focus)
        self._active_request = request.request_id
        if isinstance(state, (QueryPending, DirectStreaming)):
            self.state = replace(state, request_id=request.request_id)
        self._ui_send("preview_update", {"runs": [], "streaming": True, "error": None})
        self.gateway.submit(request)

    def _effect_cancel_active(self) -> None:
        self._direct_cancel.set()
        if self._active_request is not None:
            try:
                self.gateway.cancel(self._active_request)
            except UnknownRequest:
                pass
            self._active_request = None

    def _effect_insert(self, effect: DoInsert) -> None:
        state = self.state
        chars = 0
        try:
            report = self.adapter.insert_response(state.focus, effect.text, effect.mode)
            chars = report.chars_written
        except (NotEditable, PasteRejected, ClipboardUnavailable) as exc:
            logger.error("insertion failed: %s", exc)
            self._ui_send(
                "preview_update",
                {"runs": [], "streaming": False, "error": f"insert failed: {exc}"},
            )
        self._dispatch(InsertFinished(chars))

    def _effect_show_preview(self, effect: ShowPreview) -> None:
        if effect.original:
            runs = render_preview(word_diff(effect.original, effect.response))
        else:
            runs = [{"style": "added", "text": effect.response}]
        self._ui_send("preview_update", {"runs": runs, "streaming": False, "error": None})

    # -- backend events -------------------------------------------------------

    def _handle_backend(self, request_id: str, event) -> None:
        if request_id != self._active_request:
            logger.debug("dropping stale backend event for %s", request_id)
            return
        state = self.state
        if isinstance(state, DirectStreaming):
            if self._direct_inbox is not None:
                self._direct_inbox.put(event)
            if is_terminal(event):
                if isinstance(event, Done):
                    session = self._session_for(state.focus)
                    self.store.append_exchange(session, self._active_prompt or "", event.text)
                self._active_request = None
            return
        if not isinstance(state, QueryPending):
            logger.debug("backend event in %s dropped", state_kind(state))
            return
        if isinstance(event, Chunk):
            self._ui_send(
                "preview_update",
                {
                    "runs": [{"style": "added", "text": event.text}],
                    "streaming": True,
                    "error": None,
                },
            )
            return
        self._active_request = None
        if isinstance(event, Done):
            session = self._session_for(state.focus)
            self.store.append_exchange(session, self._active_prompt or "", event.text)
            self._dispatch(ResponseArrived(event.text))
        elif isinstance(event, Failed):
            self._dispatch(ResponseFailedEvent(event.kind, event.detail))

    # -- direct streaming worker ----------------------------------------------------

    def _start_direct_worker(self, focus: FocusContext) -> None:
        inbox: queue.Queue = queue.Queue()
        self._direct_inbox = inbox
        self._direct_cancel = threading.Event()
        cancelled = self._direct_cancel.is_set
        adapter = self.adapter

        def consume():
            while True:
                event = inbox.get()
                yield event
                if is_terminal(event):
                    return

        def work():
            try:
                report = adapter.stream_typed(focus, consume(), cancelled=cancelled)
                self.post_action(StreamFinished(report.chars_written, report.status))
            except NotEditable as exc:
                logger.error("direct stream target not editable: %s", exc)
                self.post_action(StreamFinished(0, "failed"))

        threading.Thread(target=work, daemon=True, name="direct-typing").start()
