"""Focus adapter: read and write text in the foreground application.

The contract is identity (who has focus), extraction (selection plus optional
surrounding text, with a clipboard fallback when no accessibility text node
exists), editability, and write-back (paste-replace, append-below, or typed
streaming). Correctness claims attach to the simulated adapter; a real OS
adapter is a thin optional layer behind the same interface.
"""

from __future__ import annotations

from dataclasses import dataclass

# Insertion modes (the service's accept action maps onto these).
REPLACE = "replace"
APPEND_BELOW = "append_below"
DIRECT_STREAM = "direct_stream"

# Capture methods.
ACCESSIBILITY = "accessibility"
CLIPBOARD_FALLBACK = "clipboard_fallback"

# Focused apps whose windows are handled by the browser extension instead of
# the native accessibility path.
BROWSER_APP_NAMES = frozenset({"chrome", "msedge", "edge", "firefox", "safari", "chromium"})

ROUTE_WEB = "web"

CAPTURE_TIMEOUT_MS = 200


def route_for_app(app_name: str, native_adapter_id: str) -> str:
    """Which adapter path owns this app's window."""
    return ROUTE_WEB if app_name.strip().lower() in BROWSER_APP_NAMES else native_adapter_id


@dataclass(frozen=True)
class FocusContext:
    app_name: str
    window_title: str
    process_id: int
    editable: bool
    adapter_id: str


@dataclass(frozen=True)
class SelectionCapture:
    selected_text: str
    surrounding_text: str | None = None
    method: str = ACCESSIBILITY
    selection_recoverable: bool = True
    context_disjoint: bool = False


@dataclass(frozen=True)
class InsertionReport:
    mode: str
    chars_written: int
    undo_token: int | None = None
    status: str = "ok"  # ok | cancelled | failed


from promptkey.focus.simdoc import SimNode, SimulatedDocument, load_simdoc, parse_simdoc  # noqa: E402
from promptkey.focus.simulated import SimulatedAdapter  # noqa: E402

__all__ = [
    "REPLACE",
    "APPEND_BELOW",
    "DIRECT_STREAM",
    "ACCESSIBILITY",
    "CLIPBOARD_FALLBACK",
    "BROWSER_APP_NAMES",
    "ROUTE_WEB",
    "CAPTURE_TIMEOUT_MS",
    "route_for_app",
    "FocusContext",
    "SelectionCapture",
    "InsertionReport",
    "SimNode",
    "SimulatedDocument",
    "load_simdoc",
    "parse_simdoc",
    "SimulatedAdapter",
]
