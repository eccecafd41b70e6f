"""Adapter over a SimulatedDocument: the accessibility view plus key injection.

Operations are serialized (one in flight); the clipboard is saved and
restored around every copy/paste simulation so user clipboard content
survives any promptkey interaction, including failures.
"""

from __future__ import annotations

import threading
from typing import Callable, Iterable

from promptkey.errors import (
    CaptureFailed,
    ClipboardUnavailable,
    NotEditable,
    PasteRejected,
)
from promptkey.events import Chunk, Done, Failed, ResponseEvent
from promptkey.focus import (
    ACCESSIBILITY,
    APPEND_BELOW,
    CAPTURE_TIMEOUT_MS,
    CLIPBOARD_FALLBACK,
    DIRECT_STREAM,
    REPLACE,
    FocusContext,
    InsertionReport,
    SelectionCapture,
    route_for_app,
)
from promptkey.focus.editability import is_text_capable
from promptkey.focus.simdoc import SimNode, SimulatedDocument

# Distinctive probe value: lets the copy simulation tell "copied empty
# selection" (clipboard untouched) from "copied this text".
_PROBE = "\x00promptkey-copy-probe\x00"


class SimulatedAdapter:
    adapter_id = "sim"

    def __init__(self, doc: SimulatedDocument, capture_timeout_ms: int = CAPTURE_TIMEOUT_MS):
        self.doc = doc
        self.capture_timeout_ms = capture_timeout_ms
        self.insert_count = 0
        self._lock = threading.RLock()

    # -- identity ----------------------------------------------------------

    def capture_focus(self) -> FocusContext:
        with self._lock:
            if self.doc.capture_latency_ms > self.capture_timeout_ms:
                raise CaptureFailed(
                    f"focus capture exceeded {self.capture_timeout_ms} ms"
                )
            focused = self.doc.focused_node()
            if focused is None or not self.doc.app_name:
                raise CaptureFailed("no focused element reachable")
            return FocusContext(
                app_name=self.doc.app_name,
                window_title=self.doc.window_title,
                process_id=self.doc.process_id,
                editable=self.is_editable(None),
                adapter_id=route_for_app(self.doc.app_name, self.adapter_id),
            )

    def is_editable(self, focus: FocusContext | None) -> bool:
        with self._lock:
            node = self._find_text_node()
            return bool(node is not None and node.editable)

    # -- extraction ----------------------------------------------------------

    def extract_selection(self, focus: FocusContext | None, want_context: bool = False) -> SelectionCapture:
        with self._lock:
            node = self._find_text_node()
            if node is not None:
                selected = ""
                if self.doc.selection and self.doc.selection[0] == node.node_id:
                    selected = self.doc.selected_text()
                surrounding = node.text if want_context else None
                return SelectionCapture(
                    selected_text=selected,
                    surrounding_text=surrounding,
                    method=ACCESSIBILITY,
                    selection_recoverable=True,
                    context_disjoint=False,
                )
            # No text pattern anywhere in the subtree: drive the app itself.
            selected = self.fallback_copy_selection()
            surrounding = None
            recoverable = True
            if want_context:
                surrounding = self.fallback_copy_all()
                recoverable = False  # select-all destroyed the selection
            disjoint = bool(
                surrounding is not None and selected and selected not in surrounding
            )
            return SelectionCapture(
                selected_text=selected,
                surrounding_text=surrounding,
                method=CLIPBOARD_FALLBACK,
                selection_recoverable=recoverable,
                context_disjoint=disjoint,
            )

    def fallback_copy_selection(self) -> str:
        """Selection text via an injected copy shortcut; clipboard restored."""
        with self._lock:
            doc = self.doc
            if doc.clipboard_locked:
                raise ClipboardUnavailable("clipboard is locked")
            saved = doc.clipboard
            doc.clipboard = _PROBE
            try:
                doc.press_copy()
                copied = doc.clipboard
            finally:
                doc.clipboard = saved
            return "" if copied == _PROBE else copied

    def fallback_copy_all(self) -> str:
        """Full body text via cursor-right, space, select-all, copy, undo.

        The probe space puts a known no-op edit on the app's undo stack; the
        final undo removes it and parks the caret at the bottom of the former
        selection. The captured text still contains that space, so it is
        stripped at the recorded offset. Document text is identical before
        and after; the selection itself is not restored.
        """
        with self._lock:
            doc = self.doc
            if doc.clipboard_locked:
                raise ClipboardUnavailable("clipboard is locked")
            saved = doc.clipboard
            try:
                doc.press_cursor_right()
                probe_pos = doc.type_text(" ")
                doc.press_select_all()
                doc.press_copy()
                captured = doc.clipboard
                doc.press_undo()  # UndoFailed propagates: document left dirty
            finally:
                doc.clipboard = saved
            return captured[:probe_pos] + captured[probe_pos + 1:]

    # -- write-back ------------------------------------------------------------

    def insert_response(self, focus: FocusContext | None, text: str, mode: str) -> InsertionReport:
        if not text:
            raise ValueError("refusing to insert empty text")
        if mode not in (REPLACE, APPEND_BELOW):
            raise ValueError(f"unknown insert mode {mode!r}")
        with self._lock:
            if not self.is_editable(focus):
                raise NotEditable("target does not accept text input")
            doc = self.doc
            if doc.clipboard_locked:
                raise PasteRejected("clipboard is locked")
            saved = doc.clipboard
            try:
                doc.clipboard = text
                if mode == APPEND_BELOW:
                    doc.press_cursor_right()
                doc.press_paste()
            finally:
                doc.clipboard = saved
            self.insert_count += 1
            return InsertionReport(
                mode=mode, chars_written=len(text), undo_token=doc.undo_depth
            )

    def stream_typed(
        self,
        focus: FocusContext | None,
        events: Iterable[ResponseEvent],
        cancelled: Callable[[], bool] | None = None,
    ) -> InsertionReport:
        """Type each new suffix of the accumulated response as key presses.

        The cancel flag is checked between key events; on cancel, typing
        stops after the current character.
        """
        with self._lock:
            if not self.is_editable(focus):
                raise NotEditable("target does not accept text input")
            doc = self.doc
            typed = 0
            seen = ""
            failed = False
            for event in events:
                if isinstance(event, Failed):
                    failed = True
                    break
                text = event.text
                # Type only the extension past the common prefix; a chat UI
                # rewriting earlier output cannot be un-typed.
                common = 0
                limit = min(len(seen), len(text))
                while common < limit and seen[common] == text[common]:
                    common += 1
                suffix = text[common:]
                pending = []
                hit_cancel = False
                for ch in suffix:
                    if cancelled is not None and cancelled():
                        hit_cancel = True
                        break
                    pending.append(ch)
                    doc.key_log.append(ch)
                batch = "".join(pending)
                if batch:
                    doc.type_text(batch)
                typed += len(batch)
                seen = text[: common + len(batch)]
                if hit_cancel:
                    self.insert_count += 1
                    return InsertionReport(
                        mode=DIRECT_STREAM,
                        chars_written=typed,
                        undo_token=doc.undo_depth,
                        status="cancelled",
                    )
                if isinstance(event, Done):
                    break
            self.insert_count += 1
            return InsertionReport(
                mode=DIRECT_STREAM,
                chars_written=typed,
                undo_token=doc.undo_depth,
                status="failed" if failed else "ok",
            )

    # -- internals -------------------------------------------------------

    def _find_text_node(self) -> SimNode | None:
        """Depth-first search from the focused node for the first node with a
        text pattern; deterministic first match."""
        focused = self.doc.focused_node()
        if focused is None:
            return None
        for node in focused.walk():
            if is_text_capable(node.role):
                return node
        return None
