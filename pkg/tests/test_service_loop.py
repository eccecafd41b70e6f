"""Service loop integration tests over the simulated adapter and mock backends."""

from __future__ import annotations

import threading
import time
from pathlib import Path

import pytest

from promptkey.config import ServiceConfig
from promptkey.events import Chunk, Done
from promptkey.focus import SimulatedAdapter, load_simdoc
from promptkey.gateway import ApiBackend, ApiConfig, MockBackend
from promptkey.gateway.mockserver import MockChatServer
from promptkey.service.loop import PromptService
from promptkey.service.script import parse_script, run_script
from promptkey.service.state import (
    AcceptInsert,
    Cancel,
    Escape,
    QuickActionPressed,
    SubmitQuery,
    Trigger,
    state_kind,
)
from promptkey.sessions import SessionStore

DOCS = Path(__file__).parent.parent / "fixtures" / "docs"


class ServiceHarness:
    def __init__(self, doc="word_essay", backend=None, config=None, store=None):
        self.adapter = SimulatedAdapter(load_simdoc(DOCS / f"{doc}.simdoc"))
        self.backend = backend if backend is not None else MockBackend()
        self.config = config or ServiceConfig()
        self.service = PromptService(self.config, self.adapter, self.backend,
                                     store if store is not None else SessionStore(None))
        self.thread = threading.Thread(target=self.service.run, daemon=True)
        self.thread.start()

    def wait_state(self, kind, timeout=5.0):
        self.wait(lambda s: state_kind(s) == kind, timeout, f"state {kind}")

    def wait(self, predicate, timeout=5.0, what="condition"):
        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            if predicate(self.service.state):
                return
            time.sleep(0.002)
        raise TimeoutError(f"never reached {what}, at {state_kind(self.service.state)}")

    def stop(self):
        self.service.shutdown()
        self.thread.join(timeout=5)
        assert not self.thread.is_alive()


@pytest.fixture()
def harness():
    active = []

    def make(**kwargs):
        h = ServiceHarness(**kwargs)
        active.append(h)
        return h

    yield make
    for h in active:
        h.stop()


def test_round_trip_replace_via_script(harness):
    backend = MockBackend([{"chunks": ["The", "The quick"]}])
    h = harness(backend=backend)
    doc = h.adapter.doc
    script = parse_script(
        "trigger\nquick 1\nwait previewing\naccept\nwait idle\nshutdown\n"
    )
    run_script(h.service, script)
    h.thread.join(timeout=5)
    assert doc.node("body").text == "The quick brown fox jumps over the lazy dog."
    assert h.adapter.insert_count == 1
    assert doc.clipboard == "xyz"
    types = [m.type for m in h.service.ui_log]
    assert "menu_open" in types and "menu_close" in types
    # The quick action compiled into the padded prompt.
    assert backend.submitted_prompts and "Teh quick" in backend.submitted_prompts[0]
    assert backend.submitted_prompts[0].startswith("Your task is to answer")


def test_menu_open_message_lists_quick_actions(harness):
    h = harness(doc="empty_body")
    h.service.trigger()
    h.wait_state("menu_open")
    menu_msg = next(m for m in h.service.ui_log if m.type == "menu_open")
    assert len(menu_msg.body["quick_actions"]) == 5
    assert menu_msg.body["selection"] == ""


def test_retrigger_refreshes_selection(harness):
    h = harness()
    h.service.trigger()
    h.wait_state("menu_open")
    assert h.service.state.selection.selected_text == "Teh quick"
    h.adapter.doc.selection = ("body", 10, 15)
    h.service.trigger()
    time.sleep(0.05)
    assert state_kind(h.service.state) == "menu_open"
    assert h.service.state.selection.selected_text == "brown"


def test_trigger_rejected_while_query_pending(harness):
    release = threading.Event()

    class SlowBackend:
        name = "slow"

        def preload(self, *a):
            pass

        def stream(self, request, cancelled):
            release.wait(timeout=10)
            yield Done("late response")

    h = harness(backend=SlowBackend())
    h.service.trigger()
    h.wait_state("menu_open")
    h.service.post_action(SubmitQuery("fix it"))
    h.wait_state("query_pending")
    h.service.trigger()  # rejected: a query is in flight
    time.sleep(0.05)
    assert state_kind(h.service.state) == "query_pending"
    release.set()
    h.wait_state("previewing")


def test_capture_failure_degrades_to_warning_menu(harness):
    h = harness(doc="no_focus")
    h.service.trigger()
    h.wait_state("menu_open")
    assert h.service.state.warning
    menu_msg = next(m for m in h.service.ui_log if m.type == "menu_open")
    assert menu_msg.body["warning"]


def test_escape_has_no_document_side_effect(harness):
    backend = MockBackend([{"chunks": ["resp"]}, {"chunks": ["resp2"]}])
    h = harness(backend=backend)
    doc = h.adapter.doc
    before = doc.text_snapshot()

    h.service.trigger()
    h.wait_state("menu_open")
    h.service.post_action(Escape())
    h.wait_state("idle")
    assert doc.text_snapshot() == before

    h.service.trigger()
    h.wait_state("menu_open")
    h.service.post_action(SubmitQuery("fix"))
    h.wait_state("previewing")
    h.service.post_action(Escape())
    h.wait_state("idle")
    assert doc.text_snapshot() == before


def test_refinement_appends_to_same_session(harness):
    backend = MockBackend([{"chunks": ["first answer"]}, {"chunks": ["shorter"]}])
    store = SessionStore(None)
    h = harness(backend=backend, store=store)
    h.service.trigger()
    h.wait_state("menu_open")
    h.service.post_action(SubmitQuery("fix spelling"))
    h.wait_state("previewing")
    assert h.service.state.response == "first answer"
    h.service.post_action(SubmitQuery("make it shorter"))
    h.wait(lambda s: state_kind(s) == "previewing" and s.response == "shorter",
           what="refined preview")
    sessions = list(store.snapshot().values())
    assert len(sessions) == 1
    assert len(sessions[0].exchanges) == 2
    # Second exchange carried the first as history to the backend.
    assert "make it shorter" in backend.submitted_prompts[1]


def test_refinement_failure_keeps_previous_preview(harness):
    backend = MockBackend([
        {"chunks": ["good answer"]},
        {"fail": "backend-unavailable", "detail": "relay down"},
    ])
    h = harness(backend=backend)
    h.service.trigger()
    h.wait_state("menu_open")
    h.service.post_action(SubmitQuery("first"))
    h.wait_state("previewing")
    h.service.post_action(SubmitQuery("refine me"))
    h.wait(lambda s: state_kind(s) == "previewing" and s.error_banner,
           what="preview with error banner")
    state = h.service.state
    assert state.response == "good answer"  # previous preview intact
    assert state.error_banner and "backend-unavailable" in state.error_banner


def test_direct_streaming_types_response(harness):
    backend = MockBackend([{"chunks": ["Hel", "Hello"]}])
    h = harness(doc="word_essay", backend=backend)
    doc = h.adapter.doc
    h.service.trigger()
    h.wait_state("menu_open")
    h.service.post_action(SubmitQuery("write hello", direct=True))
    h.wait_state("idle", timeout=5)
    assert "".join(doc.key_log) == "Hello"
    types = [m.type for m in h.service.ui_log]
    assert "menu_close" in types


def test_direct_streaming_cancel_stops_typing(harness):
    class DribbleBackend:
        name = "dribble"

        def preload(self, *a):
            pass

        def stream(self, request, cancelled):
            text = ""
            for ch in "abcdefghijklmnopqrstuvwxyz":
                if cancelled():
                    return
                text += ch
                yield Chunk(text)
                time.sleep(0.02)
            yield Done(text)

    h = harness(backend=DribbleBackend())
    doc = h.adapter.doc
    h.service.trigger()
    h.wait_state("menu_open")
    h.service.post_action(SubmitQuery("stream it", direct=True))
    deadline = time.monotonic() + 5
    while not doc.key_log and time.monotonic() < deadline:
        time.sleep(0.005)
    h.service.post_action(Cancel())
    h.wait_state("idle")
    time.sleep(0.1)
    typed = len(doc.key_log)
    assert 0 < typed < 26
    time.sleep(0.1)
    assert len(doc.key_log) == typed  # typing actually stopped


def test_read_only_target_blocks_insert(harness):
    backend = MockBackend([{"chunks": ["translated text"]}])
    h = harness(doc="pdf_viewer", backend=backend)
    h.service.trigger()
    h.wait_state("menu_open")
    menu_msg = next(m for m in h.service.ui_log if m.type == "menu_open")
    assert menu_msg.body["editable"] is False
    h.service.post_action(QuickActionPressed(5))
    h.wait_state("previewing")
    assert h.service.state.editable is False
    before = h.adapter.doc.text_snapshot()
    h.service.post_action(AcceptInsert(False))
    time.sleep(0.05)
    assert state_kind(h.service.state) == "previewing"  # rejected
    assert h.adapter.doc.text_snapshot() == before
    assert h.adapter.insert_count == 0


def test_preview_shows_diff_runs_when_selection_exists(harness):
    backend = MockBackend([{"chunks": ["The quick"]}])
    h = harness(backend=backend)
    h.service.trigger()
    h.wait_state("menu_open")
    h.service.post_action(SubmitQuery("fix"))
    h.wait_state("previewing")
    previews = [m for m in h.service.ui_log if m.type == "preview_update"]
    final = previews[-1].body
    assert final["streaming"] is False
    styles = {run["style"] for run in final["runs"]}
    assert "removed" in styles and "added" in styles


def _run_round_trip(backend):
    h = ServiceHarness(backend=backend)
    try:
        script = parse_script(
            "trigger\nsubmit fix the first words\nwait previewing\naccept\nwait idle\nshutdown\n"
        )
        run_script(h.service, script)
        h.thread.join(timeout=5)
        return h.adapter.doc.node("body").text
    finally:
        if h.thread.is_alive():
            h.stop()


def test_backend_substitutability_mock_vs_api_mock_server():
    mock_text = _run_round_trip(MockBackend([{"chunks": ["The quick"]}]))

    server = MockChatServer()
    base = server.start()
    server.script(deltas=["The", " quick"])
    try:
        api_text = _run_round_trip(ApiBackend(ApiConfig(base_url=base)))
    finally:
        server.stop()
    assert mock_text == api_text == "The quick brown fox jumps over the lazy dog."


def test_context_inclusion_flows_into_prompt(harness):
    backend = MockBackend([{"chunks": ["ok"]}])
    from dataclasses import replace as dc_replace

    config = ServiceConfig()
    config = dc_replace(config, include_context=True)
    h = harness(backend=backend, config=config)
    h.service.trigger()
    h.wait_state("menu_open")
    h.service.post_action(SubmitQuery("fix"))
    h.wait_state("previewing")
    prompt = backend.submitted_prompts[0]
    assert "additional context" in prompt
    assert "lazy dog" in prompt  # surrounding text made it into the context block
