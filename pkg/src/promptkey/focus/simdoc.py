"""Simulated application document: node tree, clipboard, undo stack, key ops.

This is the test double for the foreground app. Its public ``press_*``
methods model what injected keyboard shortcuts do at the application level;
the accessibility view of the same document lives in the adapter.

Fixture file format (``.simdoc``, line-oriented, versioned):

    simdoc v1
    app: WINWORD
    title: Essay.docx - Word
    pid: 4242
    clipboard: previous clipboard content
    flag: undo_disabled          # also: clipboard_locked, no_typing, no_focus
    latency: 500                 # capture latency in ms (fault injection)
    node: id=root role=window
    node: id=body parent=root role=document editable focused
    text: body | Teh quick brown fox.
    select: body 0 3
    cursor: body 10

``text:`` payloads use backslash escapes for newline, tab, and backslash.
At most one node is focused, at most one carries a selection or cursor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from promptkey.errors import ClipboardUnavailable, PasteRejected, UndoFailed


@dataclass
class SimNode:
    node_id: str
    role: str
    text: str | None = None
    editable: bool = False
    focused: bool = False
    children: list["SimNode"] = field(default_factory=list)

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass
class _Edit:
    node_id: str
    pos: int
    removed: str
    inserted: str


class SimulatedDocument:
    def __init__(
        self,
        root: SimNode,
        app_name: str = "app",
        window_title: str = "",
        process_id: int = 1,
        clipboard: str = "",
    ):
        self.root = root
        self.app_name = app_name
        self.window_title = window_title
        self.process_id = process_id
        self.clipboard = clipboard
        self.clipboard_locked = False
        self.undo_enabled = True
        self.app_accepts_typing = True
        self.capture_latency_ms = 0
        self.selection: tuple[str, int, int] | None = None
        self.cursor: tuple[str, int] | None = None
        self.key_log: list[str] = []
        self._undo_stack: list[_Edit] = []

    # -- tree access -----------------------------------------------------

    def node(self, node_id: str) -> SimNode:
        for node in self.root.walk():
            if node.node_id == node_id:
                return node
        raise KeyError(node_id)

    def focused_node(self) -> SimNode | None:
        for node in self.root.walk():
            if node.focused:
                return node
        return None

    def content_node(self) -> SimNode | None:
        """The node app-level key presses act on."""
        if self.selection:
            return self.node(self.selection[0])
        if self.cursor:
            return self.node(self.cursor[0])
        for node in self.root.walk():
            if node.text is not None:
                return node
        return None

    def selected_text(self) -> str:
        if not self.selection:
            return ""
        node_id, start, end = self.selection
        return (self.node(node_id).text or "")[start:end]

    def text_snapshot(self) -> str:
        """All node text, tree order; the byte-identity oracle for tests."""
        return "\x00".join(n.text or "" for n in self.root.walk())

    @property
    def undo_depth(self) -> int:
        return len(self._undo_stack)

    # -- app-level key operations ------------------------------------------

    def press_copy(self) -> None:
        if self.clipboard_locked:
            raise ClipboardUnavailable("clipboard is locked")
        text = self.selected_text()
        if text:
            self.clipboard = text

    def press_select_all(self) -> None:
        node = self.content_node()
        if node is None:
            return
        self.selection = (node.node_id, 0, len(node.text or ""))
        self.cursor = None

    def press_cursor_right(self) -> None:
        if self.selection:
            node_id, _start, end = self.selection
            self.selection = None
            self.cursor = (node_id, end)
            return
        node = self.content_node()
        if node is None:
            return
        if self.cursor:
            node_id, pos = self.cursor
            self.cursor = (node_id, min(pos + 1, len(self.node(node_id).text or "")))
        else:
            self.cursor = (node.node_id, len(node.text or ""))

    def type_text(self, inserted: str) -> int:
        """Insert at the caret (replacing any selection); one undo entry.

        Returns the offset the text was inserted at.
        """
        if not self.app_accepts_typing:
            raise PasteRejected("application rejects synthetic input")
        node, pos, removed = self._edit_target()
        node.text = (node.text or "")[:pos] + inserted + (node.text or "")[pos + len(removed):]
        self._undo_stack.append(_Edit(node.node_id, pos, removed, inserted))
        self.selection = None
        self.cursor = (node.node_id, pos + len(inserted))
        return pos

    def press_paste(self) -> int:
        if self.clipboard_locked:
            raise ClipboardUnavailable("clipboard is locked")
        return self.type_text(self.clipboard)

    def press_undo(self) -> None:
        if not self.undo_enabled:
            raise UndoFailed("application undo is disabled")
        if not self._undo_stack:
            return
        edit = self._undo_stack.pop()
        node = self.node(edit.node_id)
        text = node.text or ""
        node.text = text[: edit.pos] + edit.removed + text[edit.pos + len(edit.inserted):]
        self.selection = None
        self.cursor = (edit.node_id, edit.pos + len(edit.removed))

    def _edit_target(self) -> tuple[SimNode, int, str]:
        if self.selection:
            node_id, start, end = self.selection
            node = self.node(node_id)
            return node, start, (node.text or "")[start:end]
        if self.cursor:
            node_id, pos = self.cursor
            return self.node(node_id), pos, ""
        node = self.content_node()
        if node is None:
            raise PasteRejected("document has no text content to edit")
        return node, len(node.text or ""), ""


# -- fixture format --------------------------------------------------------

_ESCAPES = {"n": "\n", "t": "\t", "\\": "\\"}


def _unescape(value: str) -> str:
    out = []
    i = 0
    while i < len(value):
        ch = value[i]
        if ch == "\\" and i + 1 < len(value) and value[i + 1] in _ESCAPES:
            out.append(_ESCAPES[value[i + 1]])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def parse_simdoc(text: str) -> SimulatedDocument:
    lines = text.splitlines()
    if not lines or lines[0].strip() != "simdoc v1":
        raise ValueError("not a simdoc v1 fixture")
    nodes: dict[str, SimNode] = {}
    parents: dict[str, str] = {}
    root: SimNode | None = None
    doc_kwargs = {"app_name": "app", "window_title": "", "process_id": 1, "clipboard": ""}
    flags: list[str] = []
    latency = 0
    selection: tuple[str, int, int] | None = None
    cursor: tuple[str, int] | None = None

    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            key, rest = line.split(":", 1)
        except ValueError:
            raise ValueError(f"line {lineno}: expected 'key: value'") from None
        key = key.strip()
        rest = rest.strip() if key != "text" else rest
        if key == "app":
            doc_kwargs["app_name"] = rest
        elif key == "title":
            doc_kwargs["window_title"] = rest
        elif key == "pid":
            doc_kwargs["process_id"] = int(rest)
        elif key == "clipboard":
            doc_kwargs["clipboard"] = _unescape(rest)
        elif key == "flag":
            flags.append(rest)
        elif key == "latency":
            latency = int(rest)
        elif key == "node":
            attrs = rest.split()
            node_id = role = parent = None
            editable = focused = False
            for attr in attrs:
                if attr == "editable":
                    editable = True
                elif attr == "focused":
                    focused = True
                elif "=" in attr:
                    name, value = attr.split("=", 1)
                    if name == "id":
                        node_id = value
                    elif name == "parent":
                        parent = value
                    elif name == "role":
                        role = value
                    else:
                        raise ValueError(f"line {lineno}: unknown node attribute {name!r}")
                else:
                    raise ValueError(f"line {lineno}: bad node attribute {attr!r}")
            if not node_id or not role:
                raise ValueError(f"line {lineno}: node needs id= and role=")
            if node_id in nodes:
                raise ValueError(f"line {lineno}: duplicate node id {node_id!r}")
            node = SimNode(node_id, role, editable=editable, focused=focused)
            nodes[node_id] = node
            if parent is None:
                if root is not None:
                    raise ValueError(f"line {lineno}: second root node {node_id!r}")
                root = node
            else:
                parents[node_id] = parent
        elif key == "text":
            node_id, _, payload = rest.partition("|")
            node_id = node_id.strip()
            if node_id not in nodes:
                raise ValueError(f"line {lineno}: text for unknown node {node_id!r}")
            payload = payload[1:] if payload.startswith(" ") else payload
            nodes[node_id].text = _unescape(payload)
        elif key == "select":
            node_id, start, end = rest.split()
            selection = (node_id, int(start), int(end))
        elif key == "cursor":
            node_id, pos = rest.split()
            cursor = (node_id, int(pos))
        else:
            raise ValueError(f"line {lineno}: unknown key {key!r}")

    if root is None:
        raise ValueError("fixture has no root node")
    for child_id, parent_id in parents.items():
        if parent_id not in nodes:
            raise ValueError(f"node {child_id!r} has unknown parent {parent_id!r}")
        nodes[parent_id].children.append(nodes[child_id])

    doc = SimulatedDocument(root, **doc_kwargs)
    doc.capture_latency_ms = latency
    for flag in flags:
        if flag == "undo_disabled":
            doc.undo_enabled = False
        elif flag == "clipboard_locked":
            doc.clipboard_locked = True
        elif flag == "no_typing":
            doc.app_accepts_typing = False
        elif flag == "no_focus":
            for node in doc.root.walk():
                node.focused = False
        else:
            raise ValueError(f"unknown flag {flag!r}")
    if selection:
        node = doc.node(selection[0])
        if not (0 <= selection[1] <= selection[2] <= len(node.text or "")):
            raise ValueError("selection out of node text bounds")
        doc.selection = selection
    if cursor:
        node = doc.node(cursor[0])
        if not (0 <= cursor[1] <= len(node.text or "")):
            raise ValueError("cursor out of node text bounds")
        doc.cursor = cursor
    return doc


def load_simdoc(path: str | Path) -> SimulatedDocument:
    return parse_simdoc(Path(path).read_text(encoding="utf-8"))
