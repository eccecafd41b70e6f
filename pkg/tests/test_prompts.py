"""Prompt engine tests: goldens, section ordering, quick actions, capping."""

from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from promptkey.errors import EmptyQuery, UnknownSlot
from promptkey.prompts import (
    CONTEXT_PREAMBLE,
    DEFAULT_QUICK_ACTIONS,
    TRUNCATION_MARKER,
    PromptRequest,
    build_prompt,
    cap_context,
    expand_quick_action,
)

GOLDEN_DIR = Path(__file__).parent / "data" / "prompts"

SELECTION = "Teh quick brown fox jumps ovr the lazy dog."
CONTEXT = (
    "Intro paragraph about foxes. Teh quick brown fox jumps ovr the lazy dog. "
    "Closing remarks about dogs."
)
APP, TITLE = "Overleaf", "Essay Draft - Overleaf"

GOLDEN_CASES = {
    "typed_query_only": PromptRequest("fix spelling mistakes", "", APP, TITLE),
    "typed_selection": PromptRequest("fix spelling mistakes", SELECTION, APP, TITLE),
    "typed_selection_context": PromptRequest(
        "fix spelling mistakes", SELECTION, APP, TITLE, CONTEXT
    ),
    "quick_query_only": PromptRequest(expand_quick_action(4), "", APP, TITLE, None, 4),
    "quick_selection": PromptRequest(expand_quick_action(4), SELECTION, APP, TITLE, None, 4),
    "quick_selection_context": PromptRequest(
        expand_quick_action(4), SELECTION, APP, TITLE, CONTEXT, 4
    ),
}


@pytest.mark.parametrize("name", sorted(GOLDEN_CASES))
def test_prompt_matches_golden_byte_exact(name):
    expected = (GOLDEN_DIR / f"{name}.txt").read_bytes()
    assert build_prompt(GOLDEN_CASES[name]).encode("utf-8") == expected


def test_empty_query_rejected():
    with pytest.raises(EmptyQuery):
        build_prompt(PromptRequest("", "sel", "App", "Title"))
    with pytest.raises(EmptyQuery):
        build_prompt(PromptRequest("   ", "sel", "App", "Title"))


def test_quick_action_labels_and_slots():
    assert DEFAULT_QUICK_ACTIONS[4].label == "explain"
    assert DEFAULT_QUICK_ACTIONS[5].label == "translate"
    assert expand_quick_action(4) == "Explain the selected text."
    assert expand_quick_action(5) == "Translate the selected text to English."
    assert expand_quick_action(5, language="German") == (
        "Translate the selected text to German."
    )
    with pytest.raises(UnknownSlot):
        expand_quick_action(9)


def test_section_order_is_fixed():
    text = build_prompt(GOLDEN_CASES["typed_selection_context"])
    markers = [
        "Your task is to answer the following query",
        "User query:",
        "The user's query refers to this specific text:",
        "The user issued the query while working with",
        "The user has provided additional context",
        "Context:",
    ]
    positions = [text.index(m) for m in markers]
    assert positions == sorted(positions)


def test_selection_appears_exactly_once_and_context_after_preamble():
    marker_sel = "UNIQUE-SELECTION-MARKER-9313"
    marker_ctx = "UNIQUE-CONTEXT-MARKER-4177"
    text = build_prompt(PromptRequest("do a thing", marker_sel, "App", "T", marker_ctx))
    assert text.count(marker_sel) == 1
    assert text.count(marker_ctx) == 1
    assert text.index(CONTEXT_PREAMBLE) < text.index(marker_ctx)


def test_prompt_is_pure():
    req = GOLDEN_CASES["typed_selection_context"]
    assert build_prompt(req) == build_prompt(req)


@given(
    query=st.text(min_size=1, max_size=40).filter(lambda s: s.strip()),
    selection=st.text(max_size=60),
    context=st.one_of(st.none(), st.text(min_size=1, max_size=60)),
)
@settings(max_examples=200)
def test_section_order_property(query, selection, context):
    text = build_prompt(PromptRequest(query, selection, "App", "Title", context))
    assert text.startswith("Your task is to answer the following query")
    if selection:
        assert "refers to this specific text:" in text
    else:
        assert "refers to this specific text:" not in text
    if context:
        assert text.index(CONTEXT_PREAMBLE) > text.index("User query:")
    else:
        assert CONTEXT_PREAMBLE not in text


def test_cap_context_under_limit_unchanged():
    assert cap_context("x" * 100, 4096, "x") == "x" * 100


def test_cap_context_window_covers_selection():
    # Selection near offset 9000 of a 10000-char context, limit 2000.
    context = ("a" * 9000) + "NEEDLE-SELECTION" + ("b" * 984)
    capped = cap_context(context, 2000, "NEEDLE-SELECTION")
    assert "NEEDLE-SELECTION" in capped
    assert len(capped) <= 2000 + 2 * len(TRUNCATION_MARKER)
    assert capped.startswith(TRUNCATION_MARKER)


def test_cap_context_unknown_position_prefix():
    context = "y" * 10000
    capped = cap_context(context, 2000, "not-there")
    assert capped == "y" * 2000 + TRUNCATION_MARKER


def test_cap_context_always_contains_known_selection():
    import random

    rng = random.Random(5)
    for _ in range(200):
        total = rng.randrange(50, 3000)
        sel_len = rng.randrange(1, min(total, 100))
        pos = rng.randrange(0, total - sel_len + 1)
        context = "".join(rng.choice("abcdef") for _ in range(total))
        selection = "X" * sel_len
        context = context[:pos] + selection + context[pos + sel_len :]
        limit = rng.randrange(10, 500)
        capped = cap_context(context, limit, selection)
        assert selection in capped
