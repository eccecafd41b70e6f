"""Loopback harness: randomized request/response schedules over a socket pair.

Run as ``python -m promptkey.bridge.loopback [--rounds N] [--seed S]``. One
side fires random requests, the other answers after random delays; the
harness verifies that every request id receives exactly one terminal
response. The random message generator here is also used by the fuzz tests.
"""

from __future__ import annotations

import argparse
import random
import string
import threading
import time

from promptkey.bridge.channel import Dispatcher, LoopbackPair
from promptkey.bridge.schema import FIELD_SPECS, REQUEST_RESPONSE, BridgeMessage

_STYLES = ("kept", "removed", "added")


def _random_text(rng: random.Random, max_len: int = 40) -> str:
    # Mix ASCII with a few multibyte characters so UTF-8 lengths get exercised.
    alphabet = string.ascii_letters + string.digits + " \n\t\"\\{}[]:," + "äöŭ€漢"
    return "".join(rng.choice(alphabet) for _ in range(rng.randrange(max_len)))


def _random_value(tag: str, rng: random.Random):
    if tag == "str":
        return _random_text(rng)
    if tag == "int":
        return rng.randrange(0, 1 << 31)
    if tag == "bool":
        return rng.random() < 0.5
    if tag == "str|null":
        return None if rng.random() < 0.3 else _random_text(rng)
    if tag == "list[str]":
        return [_random_text(rng, 12) for _ in range(rng.randrange(4))]
    if tag == "list[runs]":
        return [
            {"style": rng.choice(_STYLES), "text": _random_text(rng, 16)}
            for _ in range(rng.randrange(4))
        ]
    if tag == "dict":
        return {_random_text(rng, 8) or "k": _random_text(rng, 8) for _ in range(rng.randrange(3))}
    raise ValueError(tag)


def random_message(rng: random.Random, msg_type: str | None = None) -> BridgeMessage:
    """A schema-valid message with random field values."""
    if msg_type is None:
        msg_type = rng.choice(sorted(FIELD_SPECS))
    body = {}
    for name, tag in FIELD_SPECS[msg_type].items():
        optional = tag.endswith("?")
        if optional and rng.random() < 0.5:
            continue
        body[name] = _random_value(tag.rstrip("?"), rng)
    return BridgeMessage(msg_type, rng.randrange(1, 1 << 30), body)


def _responder(msg: BridgeMessage, rng: random.Random, jitter: float):
    """Scripted peer: answer any request with a valid terminal response."""
    if jitter:
        time.sleep(rng.uniform(0, jitter))
    terminal = sorted(REQUEST_RESPONSE[msg.type])[0]
    reply = random_message(rng, terminal)
    replies = []
    if msg.type == "submit_query":
        for _ in range(rng.randrange(3)):
            replies.append(random_message(rng, "response_chunk"))
        replies = [BridgeMessage(m.type, msg.id, m.body) for m in replies]
    replies.append(BridgeMessage(reply.type, msg.id, reply.body))
    return replies


def run_schedule(rounds: int, seed: int, jitter: float = 0.0) -> dict:
    """Fire ``rounds`` random requests; return per-request terminal counts."""
    rng = random.Random(seed)
    pair = LoopbackPair()
    left = Dispatcher(pair.left, role="service")
    right = Dispatcher(pair.right, role="extension")
    responder_rng = random.Random(seed + 1)
    for req_type in REQUEST_RESPONSE:
        right.register(req_type, lambda m, r=responder_rng: _responder(m, r, jitter))
    left.start()
    right.start()
    left.hello()

    request_types = sorted(set(REQUEST_RESPONSE) - {"hello"})
    inboxes = []
    for _ in range(rounds):
        req_type = rng.choice(request_types)
        msg = random_message(rng, req_type)
        msg = BridgeMessage(msg.type, left.next_id(), msg.body)
        inboxes.append((msg, left.request(msg)))

    terminal_counts: dict[int, int] = {}
    for msg, inbox in inboxes:
        terminals = 0
        while terminals == 0:
            reply = inbox.get(timeout=10)
            if reply.type in REQUEST_RESPONSE[msg.type] or reply.type == "error":
                terminals += 1
        # Drain anything late (there must be nothing).
        time.sleep(0)
        while not inbox.empty():
            extra = inbox.get_nowait()
            if extra.type in REQUEST_RESPONSE[msg.type] or extra.type == "error":
                terminals += 1
        terminal_counts[msg.id] = terminals

    left.stop()
    right.stop()
    pair.close()
    return terminal_counts


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rounds", type=int, default=200)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--jitter", type=float, default=0.002)
    args = parser.parse_args(argv)

    counts = run_schedule(args.rounds, args.seed, args.jitter)
    bad = {k: v for k, v in counts.items() if v != 1}
    print(f"requests: {len(counts)}, terminal responses per request: "
          f"{'all 1' if not bad else bad}")
    return 0 if not bad else 1


if __name__ == "__main__":
    raise SystemExit(main())
