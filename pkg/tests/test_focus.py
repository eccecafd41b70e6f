"""Simulated adapter tests: capture, extraction, fallback, insertion, typing."""

from __future__ import annotations

import json
import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from promptkey.errors import CaptureFailed, ClipboardUnavailable, NotEditable, UndoFailed
from promptkey.events import Chunk, Done
from promptkey.focus import (
    ACCESSIBILITY,
    APPEND_BELOW,
    CLIPBOARD_FALLBACK,
    REPLACE,
    SimNode,
    SimulatedAdapter,
    SimulatedDocument,
    load_simdoc,
    parse_simdoc,
)
from promptkey.focus.editability import native_editable

FIXTURES = Path(__file__).parent.parent / "fixtures"
DOCS = FIXTURES / "docs"


def adapter_for(name: str) -> SimulatedAdapter:
    return SimulatedAdapter(load_simdoc(DOCS / f"{name}.simdoc"))


def simple_doc(text: str, sel: tuple[int, int] | None, clipboard: str = "clip",
               editable: bool = True, role: str = "document") -> SimulatedDocument:
    body = SimNode("body", role, text=text, editable=editable, focused=True)
    root = SimNode("root", "window", children=[body])
    doc = SimulatedDocument(root, app_name="App", window_title="T", clipboard=clipboard)
    if sel is not None:
        doc.selection = ("body", sel[0], sel[1])
    return doc


class TestCaptureFocus:
    def test_fixture_identity(self):
        ctx = adapter_for("word_essay").capture_focus()
        assert ctx.app_name == "WINWORD"
        assert ctx.window_title == "Essay.docx - Word"
        assert ctx.process_id == 4242
        assert ctx.editable is True
        assert ctx.adapter_id == "sim"

    def test_no_focused_node_fails(self):
        with pytest.raises(CaptureFailed):
            adapter_for("no_focus").capture_focus()

    def test_browser_app_routes_to_web(self):
        assert adapter_for("browser_overleaf").capture_focus().adapter_id == "web"

    def test_slow_capture_times_out(self):
        doc = simple_doc("x", None)
        doc.capture_latency_ms = 500
        with pytest.raises(CaptureFailed):
            SimulatedAdapter(doc).capture_focus()


class TestExtractSelection:
    def test_focused_node_is_text_capable(self):
        cap = adapter_for("word_essay").extract_selection(None)
        assert cap.selected_text == "Teh quick"
        assert cap.method == ACCESSIBILITY
        assert cap.selection_recoverable

    def test_subtree_search_two_levels_down(self):
        cap = adapter_for("deep_tree").extract_selection(None)
        assert cap.selected_text == "def f():"
        assert cap.method == ACCESSIBILITY

    def test_no_text_node_uses_clipboard_fallback(self):
        adapter = adapter_for("legacy_canvas")
        cap = adapter.extract_selection(None)
        assert cap.selected_text == "world"
        assert cap.method == CLIPBOARD_FALLBACK
        assert adapter.doc.clipboard == "keep me safe"

    def test_want_context_returns_node_body(self):
        cap = adapter_for("word_essay").extract_selection(None, want_context=True)
        assert cap.surrounding_text == "Teh quick brown fox jumps over the lazy dog."
        assert cap.selected_text in cap.surrounding_text
        assert not cap.context_disjoint

    def test_fallback_context_marks_selection_unrecoverable(self):
        adapter = adapter_for("legacy_canvas")
        before = adapter.doc.text_snapshot()
        cap = adapter.extract_selection(None, want_context=True)
        assert cap.surrounding_text == "hello world"
        assert cap.selection_recoverable is False
        assert adapter.doc.text_snapshot() == before

    def test_empty_selection_is_empty_text_not_error(self):
        doc = simple_doc("no selection here", None)
        cap = SimulatedAdapter(doc).extract_selection(None)
        assert cap.selected_text == ""


class TestFallbackCopy:
    def test_copy_selection_restores_clipboard(self):
        adapter = adapter_for("legacy_canvas")
        assert adapter.fallback_copy_selection() == "world"
        assert adapter.doc.clipboard == "keep me safe"

    def test_copy_empty_selection_returns_empty(self):
        adapter = adapter_for("empty_body")
        assert adapter.fallback_copy_selection() == ""
        assert adapter.doc.clipboard == "old clip"

    def test_locked_clipboard_raises(self):
        with pytest.raises(ClipboardUnavailable):
            adapter_for("locked_clipboard").fallback_copy_selection()

    def test_copy_all_roundtrip(self):
        adapter = adapter_for("legacy_canvas")
        doc = adapter.doc
        before = doc.text_snapshot()
        body = adapter.fallback_copy_all()
        assert body == "hello world"
        assert doc.text_snapshot() == before
        assert doc.clipboard == "keep me safe"
        # Caret parks at the bottom of the former selection.
        assert doc.cursor == ("surface", 11)

    def test_copy_all_empty_document(self):
        adapter = adapter_for("empty_body")
        depth_before = adapter.doc.undo_depth
        assert adapter.fallback_copy_all() == ""
        assert adapter.doc.undo_depth == depth_before
        assert adapter.doc.node("surface").text == ""

    def test_copy_all_undo_disabled_reports_dirty(self):
        adapter = adapter_for("undo_disabled")
        with pytest.raises(UndoFailed) as excinfo:
            adapter.fallback_copy_all()
        assert excinfo.value.document_dirty
        # Honest failure: the probe space is still in the document...
        assert " " in adapter.doc.node("surface").text[len("permanent text"):] or \
            adapter.doc.node("surface").text != "permanent text"
        # ...but the clipboard was still restored.
        assert adapter.doc.clipboard == ""


class TestInsertResponse:
    def test_replace(self):
        adapter = adapter_for("word_essay")
        report = adapter.insert_response(None, "The quick", REPLACE)
        assert adapter.doc.node("body").text == "The quick brown fox jumps over the lazy dog."
        assert report.chars_written == 9
        assert adapter.doc.clipboard == "xyz"
        assert adapter.insert_count == 1

    def test_append_below_keeps_selection_text(self):
        adapter = adapter_for("deep_tree")
        adapter.insert_response(None, "return 1", APPEND_BELOW)
        assert adapter.doc.node("editor").text == "def f():return 1"

    def test_undo_restores_pre_insertion_text(self):
        adapter = adapter_for("word_essay")
        original = adapter.doc.node("body").text
        adapter.insert_response(None, "The quick", REPLACE)
        adapter.doc.press_undo()
        assert adapter.doc.node("body").text == original

    def test_not_editable_rejected(self):
        with pytest.raises(NotEditable):
            adapter_for("pdf_viewer").insert_response(None, "text", REPLACE)

    def test_empty_text_rejected(self):
        with pytest.raises(ValueError):
            adapter_for("word_essay").insert_response(None, "", REPLACE)


class TestStreamTyped:
    def test_suffix_typing(self):
        doc = simple_doc("", None)
        adapter = SimulatedAdapter(doc)
        report = adapter.stream_typed(None, [Chunk("Hel"), Chunk("Hello"), Done("Hello")])
        assert doc.key_log == list("Hello")
        assert report.chars_written == 5
        assert report.status == "ok"
        assert doc.node("body").text == "Hello"

    def test_empty_stream_immediate_done(self):
        doc = simple_doc("stay", None)
        report = SimulatedAdapter(doc).stream_typed(None, [Done("")])
        assert doc.key_log == []
        assert report.chars_written == 0

    def test_cancel_mid_stream(self):
        doc = simple_doc("", None)
        adapter = SimulatedAdapter(doc)
        report = adapter.stream_typed(
            None,
            [Chunk("Hel"), Chunk("Hello"), Done("Hello")],
            cancelled=lambda: len(doc.key_log) >= 3,
        )
        assert report.status == "cancelled"
        assert report.chars_written == 3
        assert doc.node("body").text == "Hel"

    def test_chunking_invariance_small(self):
        final = "The quick brown fox jumps over the lazy dog. " * 20
        rng = random.Random(8)
        for _ in range(20):
            cuts = sorted(rng.sample(range(1, len(final)), rng.randrange(0, 12)))
            chunks = [Chunk(final[:c]) for c in cuts] + [Done(final)]
            doc = simple_doc("", None)
            SimulatedAdapter(doc).stream_typed(None, chunks)
            assert "".join(doc.key_log) == final
            assert doc.node("body").text == final

    def test_not_editable(self):
        doc = simple_doc("x", None, editable=False)
        with pytest.raises(NotEditable):
            SimulatedAdapter(doc).stream_typed(None, [Done("y")])


class TestEditability:
    def test_shared_rule_table_native_cases(self):
        cases = json.loads((FIXTURES / "editability_cases.json").read_text())
        for case in cases["native"]:
            got = native_editable(case["role"], case["editable_flag"])
            assert got is case["expected"], case
            doc = simple_doc("t", None, editable=case["editable_flag"], role=case["role"])
            assert SimulatedAdapter(doc).is_editable(None) is case["expected"], case

    def test_read_only_viewer_not_editable(self):
        assert adapter_for("pdf_viewer").is_editable(None) is False

    def test_editable_text_node(self):
        assert adapter_for("word_essay").is_editable(None) is True


class TestSimdocFormat:
    def test_multiline_escapes(self):
        doc = load_simdoc(DOCS / "multiline_notes.simdoc")
        assert doc.node("surface").text == "first line\nsecond line\tend\nthird one"
        assert doc.selected_text() == "second line"

    def test_rejects_bad_version(self):
        with pytest.raises(ValueError, match="simdoc v1"):
            parse_simdoc("simdoc v9\nnode: id=a role=window\n")

    def test_rejects_unknown_key(self):
        with pytest.raises(ValueError, match="unknown key"):
            parse_simdoc("simdoc v1\nwhat: ever\n")

    def test_rejects_selection_out_of_bounds(self):
        bad = "simdoc v1\nnode: id=a role=document focused\ntext: a | hi\nselect: a 0 5\n"
        with pytest.raises(ValueError, match="bounds"):
            parse_simdoc(bad)

    def test_rejects_duplicate_node(self):
        bad = "simdoc v1\nnode: id=a role=window\nnode: id=a role=pane parent=a\n"
        with pytest.raises(ValueError, match="duplicate"):
            parse_simdoc(bad)


# -- properties ------------------------------------------------------------

texts = st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=80)


@given(text=texts, data=st.data())
@settings(max_examples=200)
def test_roundtrip_extract_then_replace_is_identity(text, data):
    if not text:
        return
    start = data.draw(st.integers(0, len(text) - 1))
    end = data.draw(st.integers(start + 1, len(text)))
    doc = simple_doc(text, (start, end))
    adapter = SimulatedAdapter(doc)
    before = doc.text_snapshot()
    cap = adapter.extract_selection(None)
    assert cap.selected_text == text[start:end]
    adapter.insert_response(None, cap.selected_text, REPLACE)
    assert doc.text_snapshot() == before


@given(text=texts, clipboard=texts, data=st.data())
@settings(max_examples=200)
def test_fallback_copy_all_preserves_text_and_clipboard(text, clipboard, data):
    sel = None
    if text:
        start = data.draw(st.integers(0, len(text) - 1))
        end = data.draw(st.integers(start, len(text)))
        sel = (start, end)
    doc = simple_doc(text, sel, clipboard=clipboard, role="canvas")
    adapter = SimulatedAdapter(doc)
    before = doc.text_snapshot()
    body = adapter.fallback_copy_all()
    assert body == text
    assert doc.text_snapshot() == before
    assert doc.clipboard == clipboard


@given(text=texts, insert=st.text(min_size=1, max_size=30), data=st.data())
@settings(max_examples=200)
def test_append_below_never_deletes_characters(text, insert, data):
    sel = None
    if text:
        start = data.draw(st.integers(0, len(text) - 1))
        end = data.draw(st.integers(start, len(text)))
        sel = (start, end)
    doc = simple_doc(text, sel)
    SimulatedAdapter(doc).insert_response(None, insert, APPEND_BELOW)
    after = doc.node("body").text
    # The paste lands at exactly one point; everything else survives.
    pos = doc.cursor[1] - len(insert)
    assert after == text[:pos] + insert + text[pos:]
