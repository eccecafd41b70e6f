"""The interaction state machine.

Exactly one state is active at any instant, and every legal (state, action)
pair is declared in TRANSITIONS below; anything else raises IllegalTransition
and leaves the state untouched. ``dispatch_action`` is pure: it returns the
next state plus a list of effects for the service loop to interpret, and does
no I/O itself.

States: idle, menu_open, query_pending, previewing, inserting,
direct_streaming. User actions: trigger, quick_action, submit_query,
accept_insert, escape, retype, cancel. Loop-internal events: response_done,
response_failed, insert_finished, stream_finished.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from promptkey.errors import EmptyQuery, IllegalTransition
from promptkey.focus import APPEND_BELOW, REPLACE, FocusContext, SelectionCapture
from promptkey.prompts import (
    DEFAULT_QUICK_ACTIONS,
    DEFAULT_TARGET_LANGUAGE,
    PromptRequest,
    QuickAction,
    cap_context,
    expand_quick_action,
)

# -- states ------------------------------------------------------------------


@dataclass(frozen=True)
class Idle:
    pass


@dataclass(frozen=True)
class MenuOpen:
    focus: FocusContext
    selection: SelectionCapture
    warning: str | None = None
    error_banner: str | None = None


@dataclass(frozen=True)
class QueryPending:
    request: PromptRequest
    session_key: str
    focus: FocusContext
    selection: SelectionCapture
    prior: "Previewing | None" = None
    request_id: str | None = None


@dataclass(frozen=True)
class Previewing:
    original: str
    response: str
    editable: bool
    focus: FocusContext
    session_key: str
    error_banner: str | None = None


@dataclass(frozen=True)
class Inserting:
    mode: str
    text: str
    focus: FocusContext


@dataclass(frozen=True)
class DirectStreaming:
    focus: FocusContext
    session_key: str
    request_id: str | None = None


State = Idle | MenuOpen | QueryPending | Previewing | Inserting | DirectStreaming

# -- actions -----------------------------------------------------------------


@dataclass(frozen=True)
class Trigger:
    focus: FocusContext
    selection: SelectionCapture
    warning: str | None = None


@dataclass(frozen=True)
class QuickActionPressed:
    slot: int


@dataclass(frozen=True)
class SubmitQuery:
    text: str
    direct: bool = False


@dataclass(frozen=True)
class AcceptInsert:
    append: bool = False


@dataclass(frozen=True)
class Escape:
    pass


@dataclass(frozen=True)
class Retype:
    text: str


@dataclass(frozen=True)
class Cancel:
    pass


@dataclass(frozen=True)
class ResponseArrived:
    final: str


@dataclass(frozen=True)
class ResponseFailedEvent:
    kind: str
    detail: str = ""


@dataclass(frozen=True)
class InsertFinished:
    chars_written: int = 0


@dataclass(frozen=True)
class StreamFinished:
    chars_written: int = 0
    status: str = "ok"


Action = (
    Trigger | QuickActionPressed | SubmitQuery | AcceptInsert | Escape | Retype
    | Cancel | ResponseArrived | ResponseFailedEvent | InsertFinished | StreamFinished
)

_STATE_KINDS = {
    Idle: "idle",
    MenuOpen: "menu_open",
    QueryPending: "query_pending",
    Previewing: "previewing",
    Inserting: "inserting",
    DirectStreaming: "direct_streaming",
}
_ACTION_KINDS = {
    Trigger: "trigger",
    QuickActionPressed: "quick_action",
    SubmitQuery: "submit_query",
    AcceptInsert: "accept_insert",
    Escape: "escape",
    Retype: "retype",
    Cancel: "cancel",
    ResponseArrived: "response_done",
    ResponseFailedEvent: "response_failed",
    InsertFinished: "insert_finished",
    StreamFinished: "stream_finished",
}


def state_kind(state: State) -> str:
    return _STATE_KINDS[type(state)]


def action_kind(action: Action) -> str:
    return _ACTION_KINDS[type(action)]


# -- declared transition table ------------------------------------------------

# (state kind, action kind) -> possible target kinds. Pairs absent here are
# rejected with IllegalTransition. The one guard: previewing + accept_insert
# requires Previewing.editable (a read-only target has no path to inserting).
TRANSITIONS: dict[tuple[str, str], frozenset[str]] = {
    ("idle", "trigger"): frozenset({"menu_open"}),
    ("idle", "escape"): frozenset({"idle"}),
    ("menu_open", "trigger"): frozenset({"menu_open"}),
    ("menu_open", "quick_action"): frozenset({"query_pending"}),
    ("menu_open", "submit_query"): frozenset({"query_pending", "direct_streaming"}),
    ("menu_open", "retype"): frozenset({"menu_open"}),
    ("menu_open", "escape"): frozenset({"idle"}),
    ("query_pending", "response_done"): frozenset({"previewing"}),
    ("query_pending", "response_failed"): frozenset({"menu_open", "previewing"}),
    ("query_pending", "retype"): frozenset({"query_pending"}),
    ("query_pending", "escape"): frozenset({"idle"}),
    ("previewing", "accept_insert"): frozenset({"inserting"}),
    ("previewing", "submit_query"): frozenset({"query_pending", "direct_streaming"}),
    ("previewing", "retype"): frozenset({"previewing"}),
    ("previewing", "escape"): frozenset({"idle"}),
    ("inserting", "insert_finished"): frozenset({"idle"}),
    ("inserting", "escape"): frozenset({"idle"}),
    ("direct_streaming", "stream_finished"): frozenset({"idle"}),
    ("direct_streaming", "response_failed"): frozenset({"idle"}),
    ("direct_streaming", "cancel"): frozenset({"idle"}),
    ("direct_streaming", "escape"): frozenset({"idle"}),
}

GUARDED: dict[tuple[str, str], str] = {
    ("previewing", "accept_insert"): "editable",
}

# -- effects ----------------------------------------------------------------


@dataclass(frozen=True)
class OpenMenu:
    refresh: bool = False


@dataclass(frozen=True)
class CloseMenu:
    pass


@dataclass(frozen=True)
class Preload:
    pass


@dataclass(frozen=True)
class StartQuery:
    request: "PromptRequest"
    direct: bool = False
    refine: bool = False


@dataclass(frozen=True)
class CancelActive:
    pass


@dataclass(frozen=True)
class DoInsert:
    mode: str
    text: str


@dataclass(frozen=True)
class ShowPreview:
    original: str
    response: str


@dataclass(frozen=True)
class ShowError:
    kind: str
    detail: str


Effect = OpenMenu | CloseMenu | Preload | StartQuery | CancelActive | DoInsert | ShowPreview | ShowError


@dataclass(frozen=True)
class Transition:
    state: State
    effects: tuple[Effect, ...] = ()


@dataclass(frozen=True)
class MachineConfig:
    quick_actions: dict[int, QuickAction] = field(default_factory=lambda: dict(DEFAULT_QUICK_ACTIONS))
    language: str = DEFAULT_TARGET_LANGUAGE
    context_cap: int = 8000
    include_context: bool = False


# -- dispatch ----------------------------------------------------------------


def dispatch_action(state: State, action: Action, config: MachineConfig | None = None) -> Transition:
    """Apply one action; undeclared pairs raise IllegalTransition."""
    config = config or MachineConfig()
    pair = (state_kind(state), action_kind(action))
    handler = _HANDLERS.get(pair)
    if handler is None:
        raise IllegalTransition(*pair)
    transition = handler(state, action, config)
    assert state_kind(transition.state) in TRANSITIONS[pair], (
        f"handler for {pair} produced undeclared target {state_kind(transition.state)}"
    )
    return transition


def _build_request(query: str, focus: FocusContext, selection: SelectionCapture,
                   config: MachineConfig) -> PromptRequest:
    query = query.strip()
    if not query:
        raise EmptyQuery("query is empty")
    context = None
    if config.include_context and selection.surrounding_text:
        context = cap_context(
            selection.surrounding_text, config.context_cap, selection.selected_text
        )
    return PromptRequest(
        user_query=query,
        selection=selection.selected_text,
        app_name=focus.app_name,
        window_title=focus.window_title,
        context=context,
    )


def _menu_from(action: Trigger) -> MenuOpen:
    return MenuOpen(focus=action.focus, selection=action.selection, warning=action.warning)


def _h_idle_trigger(state, action, config):
    return Transition(_menu_from(action), (OpenMenu(), Preload()))


def _h_idle_escape(state, action, config):
    return Transition(state)


def _h_menu_trigger(state, action, config):
    # Re-trigger refreshes the capture; never a second menu.
    return Transition(_menu_from(action), (OpenMenu(refresh=True), Preload()))


def _h_menu_quick(state, action, config):
    query = expand_quick_action(action.slot, config.quick_actions, config.language)
    request = replace(
        _build_request(query, state.focus, state.selection, config), quick_slot=action.slot
    )
    pending = QueryPending(
        request=request,
        session_key=_session_key(state.focus),
        focus=state.focus,
        selection=state.selection,
    )
    return Transition(pending, (StartQuery(request),))


def _h_menu_submit(state, action, config):
    request = _build_request(action.text, state.focus, state.selection, config)
    key = _session_key(state.focus)
    if action.direct:
        streaming = DirectStreaming(focus=state.focus, session_key=key)
        return Transition(streaming, (CloseMenu(), StartQuery(request, direct=True)))
    pending = QueryPending(
        request=request, session_key=key, focus=state.focus, selection=state.selection
    )
    return Transition(pending, (StartQuery(request),))


def _h_menu_retype(state, action, config):
    # The popup owns the query buffer; nothing changes service-side.
    return Transition(state)


def _h_menu_escape(state, action, config):
    return Transition(Idle(), (CloseMenu(),))


def _h_pending_done(state, action, config):
    preview = Previewing(
        original=state.selection.selected_text,
        response=action.final,
        editable=state.focus.editable,
        focus=state.focus,
        session_key=state.session_key,
    )
    return Transition(preview, (ShowPreview(preview.original, preview.response),))


def _h_pending_failed(state, action, config):
    banner = f"{action.kind}: {action.detail}" if action.detail else action.kind
    if state.prior is not None:
        # Refinement failed: keep the previous preview, flag the error.
        preview = replace(state.prior, error_banner=banner)
        return Transition(preview, (ShowError(action.kind, action.detail),))
    menu = MenuOpen(focus=state.focus, selection=state.selection, error_banner=banner)
    return Transition(menu, (ShowError(action.kind, action.detail),))


def _h_pending_retype(state, action, config):
    return Transition(state)


def _h_pending_escape(state, action, config):
    return Transition(Idle(), (CancelActive(), CloseMenu()))


def _h_preview_accept(state, action, config):
    if not state.editable:
        raise IllegalTransition("previewing[read-only]", "accept_insert")
    mode = APPEND_BELOW if action.append else REPLACE
    inserting = Inserting(mode=mode, text=state.response, focus=state.focus)
    return Transition(inserting, (DoInsert(mode, state.response), CloseMenu()))


def _h_preview_submit(state, action, config):
    # Refinement: same session, the original selection stays the subject.
    selection = SelectionCapture(selected_text=state.original)
    request = _build_request(action.text, state.focus, selection, config)
    if action.direct:
        streaming = DirectStreaming(focus=state.focus, session_key=state.session_key)
        return Transition(streaming, (CloseMenu(), StartQuery(request, direct=True, refine=True)))
    pending = QueryPending(
        request=request,
        session_key=state.session_key,
        focus=state.focus,
        selection=selection,
        prior=replace(state, error_banner=None),
    )
    return Transition(pending, (StartQuery(request, refine=True),))


def _h_preview_retype(state, action, config):
    return Transition(state)


def _h_preview_escape(state, action, config):
    return Transition(Idle(), (CloseMenu(),))


def _h_inserting_finished(state, action, config):
    return Transition(Idle())


def _h_inserting_escape(state, action, config):
    # The insert already happened (or is atomic); escape just abandons the
    # confirmation wait. It never performs or reverts an insertion.
    return Transition(Idle(), (CloseMenu(),))


def _h_streaming_finished(state, action, config):
    return Transition(Idle())


def _h_streaming_failed(state, action, config):
    return Transition(Idle(), (ShowError(action.kind, action.detail),))


def _h_streaming_cancel(state, action, config):
    return Transition(Idle(), (CancelActive(),))


_HANDLERS = {
    ("idle", "trigger"): _h_idle_trigger,
    ("idle", "escape"): _h_idle_escape,
    ("menu_open", "trigger"): _h_menu_trigger,
    ("menu_open", "quick_action"): _h_menu_quick,
    ("menu_open", "submit_query"): _h_menu_submit,
    ("menu_open", "retype"): _h_menu_retype,
    ("menu_open", "escape"): _h_menu_escape,
    ("query_pending", "response_done"): _h_pending_done,
    ("query_pending", "response_failed"): _h_pending_failed,
    ("query_pending", "retype"): _h_pending_retype,
    ("query_pending", "escape"): _h_pending_escape,
    ("previewing", "accept_insert"): _h_preview_accept,
    ("previewing", "submit_query"): _h_preview_submit,
    ("previewing", "retype"): _h_preview_retype,
    ("previewing", "escape"): _h_preview_escape,
    ("inserting", "insert_finished"): _h_inserting_finished,
    ("inserting", "escape"): _h_inserting_escape,
    ("direct_streaming", "stream_finished"): _h_streaming_finished,
    ("direct_streaming", "response_failed"): _h_streaming_failed,
    ("direct_streaming", "cancel"): _h_streaming_cancel,
    ("direct_streaming", "escape"): _h_streaming_cancel,
}


def _session_key(focus: FocusContext) -> str:
    from promptkey.sessions import normalize_key

    return normalize_key(focus.app_name, focus.window_title)
