"""Prompt compilation: quick actions, context capping, and the padded prompt.

``build_prompt`` is a pure function; the same request always produces byte-
identical output. Sections appear in a fixed order and empty optional
sections are omitted entirely rather than sent as bare headers.
"""

from __future__ import annotations

from dataclasses import dataclass

from promptkey.errors import EmptyQuery, UnknownSlot

HEADER = (
    "Your task is to answer the following query from the user. "
    "Do not express approval or your own judgment of the query. "
    "Just respond with a clear answer. If prompted for code, just output "
    "the code, no explanation, just one response of code and nothing else."
)
QUERY_LABEL = "User query: "
SELECTION_LABEL = "The user's query refers to this specific text:"
APP_LABEL = "The user issued the query while working with "
CONTEXT_PREAMBLE = (
    "The user has provided additional context for their query. "
    "Do not directly quote this context, but use it to formulate a response."
)
CONTEXT_LABEL = "Context: "

TRUNCATION_MARKER = "[...]"

DEFAULT_CONTEXT_CAP = 8000


@dataclass(frozen=True)
class QuickAction:
    slot: int
    label: str
    query_template: str


# Slots 4 (explain) and 5 (translate) are fixed; 1-3 cover the everyday
# summarize/edit/compose workload and can be overridden in the config file.
DEFAULT_QUICK_ACTIONS: dict[int, QuickAction] = {
    1: QuickAction(1, "fix spelling & grammar",
                   "Fix all spelling and grammar mistakes in the selected text. "
                   "Keep the original wording where it is already correct."),
    2: QuickAction(2, "summarize", "Summarize the selected text concisely."),
    3: QuickAction(3, "rewrite formally",
                   "Rewrite the selected text in a more formal style."),
    4: QuickAction(4, "explain", "Explain the selected text."),
    5: QuickAction(5, "translate", "Translate the selected text to {language}."),
}
DEFAULT_TARGET_LANGUAGE = "English"


@dataclass(frozen=True)
class PromptRequest:
    user_query: str
    selection: str = ""
    app_name: str = ""
    window_title: str = ""
    context: str | None = None
    quick_slot: int | None = None


def expand_quick_action(
    slot: int,
    actions: dict[int, QuickAction] | None = None,
    language: str = DEFAULT_TARGET_LANGUAGE,
) -> str:
    """The query text behind a numbered menu slot."""
    actions = actions if actions is not None else DEFAULT_QUICK_ACTIONS
    action = actions.get(slot)
    if action is None:
        raise UnknownSlot(f"no quick action in slot {slot}")
    return action.query_template.replace("{language}", language)


def build_prompt(req: PromptRequest) -> str:
    """Compile a request into the padded prompt sent to the backend."""
    query = req.user_query.strip()
    if not query:
        raise EmptyQuery("prompt request has no query text")
    parts = [HEADER, QUERY_LABEL + query]
    if req.selection:
        parts.append(f"{SELECTION_LABEL}\n\n{req.selection}")
    if req.app_name or req.window_title:
        title = f" ({req.window_title})" if req.window_title else ""
        parts.append(f"{APP_LABEL}{req.app_name}{title}.")
    if req.context:
        parts.append(CONTEXT_PREAMBLE)
        parts.append(CONTEXT_LABEL + req.context)
    return "\n\n".join(parts)


def cap_context(context: str, limit: int, selection: str = "") -> str:
    """Clamp oversize context to a window around the selection.

    When the selection occurs in the context, the window is centered on it
    (and always contains it, even if the selection alone exceeds the limit);
    otherwise the window is a plain prefix. Markers flag each truncated edge.
    """
    if limit <= 0:
        raise ValueError("limit must be positive")
    if len(context) <= limit:
        return context
    pos = context.find(selection) if selection else -1
    if pos < 0:
        return context[:limit] + TRUNCATION_MARKER
    sel_end = pos + len(selection)
    spare = max(limit - len(selection), 0)
    start = max(0, pos - spare // 2)
    end = min(len(context), max(sel_end, start + limit))
    start = min(start, max(0, end - limit))
    start = min(start, pos)  # never cut into the selection
    end = max(end, sel_end)
    prefix = TRUNCATION_MARKER if start > 0 else ""
    suffix = TRUNCATION_MARKER if end < len(context) else ""
    return prefix + context[start:end] + suffix
