"""Acceptance suite: one test per primary criterion, at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one pass/fail line
per criterion.
"""

from __future__ import annotations

import random
import threading
import time
from pathlib import Path

import pytest

from promptkey.bridge import FrameDecoder, encode_frame, message_from_payload, message_to_payload
from promptkey.bridge.loopback import random_message
from promptkey.config import ServiceConfig
from promptkey.diffing import equal_token_count, tokenize, word_diff
from promptkey.errors import IllegalTransition, ProtocolError, TooLarge
from promptkey.events import Chunk, Done, Failed
from promptkey.focus import SimNode, SimulatedAdapter, SimulatedDocument, load_simdoc
from promptkey.gateway import MockBackend, QuiescenceMonitor, QuiescenceRule
from promptkey.prompts import build_prompt
from promptkey.service.loop import PromptService
from promptkey.service.script import parse_script, run_script
from promptkey.service.state import TRANSITIONS, dispatch_action, state_kind
from promptkey.sessions import SessionStore

FIXTURES = Path(__file__).parent.parent / "fixtures"
GOLDEN_DIR = Path(__file__).parent / "data" / "prompts"


def report(criterion: str) -> None:
    print(f"[ACCEPTANCE] {criterion}: PASS")


# -- 1. end-to-end headless flow -------------------------------------------------


def test_end_to_end_headless_flow():
    adapter = SimulatedAdapter(load_simdoc(FIXTURES / "docs" / "word_essay.simdoc"))
    backend = MockBackend([{"chunks": ["The", "The quick"]}])
    service = PromptService(ServiceConfig(), adapter, backend, SessionStore(None))
    thread = threading.Thread(target=service.run, daemon=True)
    thread.start()

    script = parse_script("trigger\nquick 1\nwait previewing\naccept\nwait idle\nshutdown\n")
    started = time.monotonic()
    run_script(service, script)
    thread.join(timeout=5)
    elapsed = time.monotonic() - started

    assert not thread.is_alive()
    assert adapter.doc.node("body").text == "The quick brown fox jumps over the lazy dog."
    assert elapsed < 1.0, f"round trip took {elapsed:.3f}s"
    assert adapter.insert_count == 1
    assert adapter.doc.clipboard == "xyz"
    report("end-to-end headless flow (byte-exact, <1s, one insertion, clipboard restored)")


# -- 2. state machine enumeration ----------------------------------------------


def test_state_machine_enumeration():
    from test_state_machine import ACTION_INSTANCES, STATE_INSTANCES

    panics = 0
    for skind, states in STATE_INSTANCES.items():
        for akind, actions in ACTION_INSTANCES.items():
            for state in states:
                for action in actions:
                    declared = TRANSITIONS.get((skind, akind))
                    guard_blocked = (
                        skind == "previewing" and akind == "accept_insert" and not state.editable
                    )
                    try:
                        transition = dispatch_action(state, action)
                        assert declared is not None and not guard_blocked
                        assert state_kind(transition.state) in declared
                    except IllegalTransition:
                        assert declared is None or guard_blocked
                    except Exception:
                        panics += 1
                        raise
    assert panics == 0
    report("state machine exhaustive enumeration matches declared table")


# -- 3. prompt goldens ---------------------------------------------------------


def test_prompt_goldens():
    from test_prompts import GOLDEN_CASES

    anchor = "Your task is to answer the following query"
    assert len(GOLDEN_CASES) == 6
    for name, request in GOLDEN_CASES.items():
        expected = (GOLDEN_DIR / f"{name}.txt").read_bytes()
        assert anchor.encode() in expected
        assert build_prompt(request).encode("utf-8") == expected, name
    report("prompt goldens byte-exact for 6 section combinations")


# -- 4. diff oracle -------------------------------------------------------------


def _lcs_length(a, b):
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(cur[-1], prev[j + 1]))
        prev = cur
    return prev[-1]


def test_diff_oracle_and_reconstruction():
    started = time.monotonic()
    words = ["the", "cat", "sat", "dog", "ran", "on", "mats", "fast", "red", "blue"]
    rng = random.Random(24601)

    for _ in range(10_000):
        a = " ".join(rng.choice(words) for _ in range(rng.randrange(13)))
        b = " ".join(rng.choice(words) for _ in range(rng.randrange(13)))
        spans = word_diff(a, b)
        assert equal_token_count(spans) == _lcs_length(tokenize(a), tokenize(b)), (a, b)

    def random_text(max_bytes):
        out = []
        size = 0
        while size < max_bytes:
            token = rng.choice(words) + rng.choice([" ", " ", " ", "\n"])
            out.append(token)
            size += len(token)
        return "".join(out)

    for i in range(10_000):
        target = rng.randrange(0, 5000)
        a = random_text(target)
        if i % 10 < 7:
            # Mutation pair: edit a few places (the preview's common case).
            tokens = tokenize(a)
            for _ in range(rng.randrange(1, 8)):
                if not tokens:
                    break
                op = rng.randrange(3)
                pos = rng.randrange(len(tokens))
                if op == 0:
                    tokens[pos] = rng.choice(words)
                elif op == 1:
                    del tokens[pos]
                else:
                    tokens.insert(pos, rng.choice(words) + " ")
            b = "".join(tokens)
        elif i % 10 < 9:
            b = random_text(rng.randrange(0, 5000))
        else:
            tokens = tokenize(a)
            rng.shuffle(tokens)
            b = "".join(tokens)
        spans = word_diff(a, b)
        original = "".join(s.text for s in spans if s.kind in ("equal", "delete"))
        revised = "".join(s.text for s in spans if s.kind in ("equal", "insert"))
        assert original == a and revised == b

    elapsed = time.monotonic() - started
    assert elapsed < 60.0, f"diff criterion took {elapsed:.1f}s"
    report(f"diff oracle (10k LCS-equivalence + 10k reconstruction in {elapsed:.1f}s)")


# -- 5. bridge fuzz ---------------------------------------------------------------


def test_bridge_fuzz():
    rng = random.Random(31337)
    stream = bytearray()
    sent = []
    for _ in range(10_000):
        msg = random_message(rng)
        sent.append(msg)
        payload = message_to_payload(msg)
        assert message_from_payload(payload) == msg
        stream.extend(encode_frame(payload, limit=1 << 31))

    decoder = FrameDecoder(limit=1 << 31)
    received = []
    pos = 0
    while pos < len(stream):
        step = rng.randrange(1, 8192)
        received.extend(decoder.feed(bytes(stream[pos:pos + step])))
        pos += step
    assert len(received) == len(sent)
    for payload, msg in zip(received, sent):
        assert message_from_payload(payload) == msg

    with pytest.raises(TooLarge):
        encode_frame(b"x" * (2 * 1024 * 1024))
    bad = FrameDecoder()
    with pytest.raises(ProtocolError):
        bad.feed((64 * 1024 * 1024).to_bytes(4, "little") + b"garbage")
    with pytest.raises(ProtocolError):
        message_from_payload(b"\xff\xfe not json")
    report("bridge fuzz: 10k messages, chunked identity, oversize/garbage safe")


# -- 6. quiescence timing ---------------------------------------------------------


def test_quiescence_timing_simulated_clock():
    # The simulated clock advances in whole ticks (exact in float arithmetic),
    # so "done at last change + window, within one tick" is checkable exactly.
    rng = random.Random(4242)
    for _ in range(100):
        window = rng.choice([20, 50, 80, 100])  # ticks
        rule = QuiescenceRule(float(window), 3000.0)
        changes = sorted(rng.randrange(0, 200) for _ in range(rng.randrange(1, 10)))
        expected = None
        for i, t in enumerate(changes):
            candidate = t + window
            if i + 1 == len(changes) or changes[i + 1] > candidate:
                expected = candidate
                break
        monitor = QuiescenceMonitor(rule, start=0.0)
        idx, content, done_at = 0, "", None
        for now in range(0, 4000):
            while idx < len(changes) and changes[idx] <= now:
                content += "y"
                monitor.on_content(float(changes[idx]), content)
                idx += 1
            event = monitor.due(float(now))
            if event is not None:
                assert isinstance(event, Done)
                done_at = now
                break
        assert done_at is not None and abs(done_at - expected) <= 1, (changes, window)

    # Hard timeout: content that never goes quiet still terminates.
    rule = QuiescenceRule(0.5, 3.0)
    monitor = QuiescenceMonitor(rule, start=0.0)
    now, content, terminal = 0.0, "", None
    while terminal is None and now < 10.0:
        content += "z"
        monitor.on_content(now, content)
        terminal = monitor.due(now)
        now = round(now + 0.3, 10)
    assert isinstance(terminal, Failed)
    report("quiescence: done at last change + window (±1 tick), hard timeout terminal")


# -- 7. fallback path -------------------------------------------------------------


def _fallback_doc(text, sel, clipboard):
    body = SimNode("surface", "canvas", text=text, focused=True)
    doc = SimulatedDocument(SimNode("root", "window", children=[body]),
                            app_name="LegacyApp", window_title="t", clipboard=clipboard)
    body.focused = True
    if sel is not None:
        doc.selection = ("surface", sel[0], sel[1])
    return doc


def test_fallback_full_body_extraction_corpus():
    rng = random.Random(99)
    corpus = []
    committed = ["legacy_canvas", "empty_body", "multiline_notes"]
    for name in committed:
        corpus.append(SimulatedAdapter(load_simdoc(FIXTURES / "docs" / f"{name}.simdoc")))
    # Generated documents: varied sizes, selections, clipboards.
    for i in range(16):
        size = rng.choice([0, 1, 10, 100, 1000, 40_000])
        text = "".join(rng.choice("abcdef ghij\nklmno") for _ in range(size))
        sel = None
        if text and i % 3:
            start = rng.randrange(len(text))
            sel = (start, rng.randrange(start, len(text) + 1))
        corpus.append(SimulatedAdapter(_fallback_doc(text, sel, f"clip-{i}")))
    # The 1 MB body.
    big = ("lorem ipsum dolor sit amet " * 40_000)[: 1024 * 1024]
    corpus.append(SimulatedAdapter(_fallback_doc(big, (500_000, 500_100), "big-clip")))

    assert len(corpus) >= 20
    for adapter in corpus:
        doc = adapter.doc
        before_text = doc.text_snapshot()
        before_clip = doc.clipboard
        body = adapter.fallback_copy_all()
        content = doc.content_node()
        assert body == (content.text or "")
        assert doc.text_snapshot() == before_text  # byte-identical
        assert doc.clipboard == before_clip
    report(f"fallback copy-all: {len(corpus)} documents byte-identical, clipboard restored")


# -- 8. typed streaming chunking invariance ------------------------------------------


def test_typed_streaming_chunking_invariance():
    rng = random.Random(7331)
    words = "streaming keyboard insertion latency window focus".split()
    final = " ".join(rng.choice(words) for _ in range(1800))[:10_000]
    final = final.ljust(10_000, "x")
    assert len(final) == 10_000

    for _ in range(100):
        n_cuts = rng.randrange(0, 60)
        cuts = sorted(rng.sample(range(1, len(final)), n_cuts))
        events = [Chunk(final[:cut]) for cut in cuts] + [Done(final)]
        body = SimNode("body", "edit", text="", editable=True, focused=True)
        doc = SimulatedDocument(SimNode("root", "window", children=[body]))
        adapter = SimulatedAdapter(doc)
        adapter.stream_typed(None, events)
        assert "".join(doc.key_log) == final
        assert doc.node("body").text == final
    report("typed streaming: 100 chunkings of a 10 kB response, transcript == final text")
