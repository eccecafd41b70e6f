"""Bridge message schema and JSON codec.

A message is ``{"type": <name>, "id": <correlation id>, ...body}``. The field
table below is the single source of truth for both sides of the channel; the
TypeScript frontend mirrors it (see docs/bridge-protocol.md for the field-by-
field description).

Envelope problems (not JSON, not an object, missing type/id) poison the
channel with ProtocolError. An unknown type or a known type with a bad body
is survivable: dispatch answers with an ``error`` message and keeps the
channel open.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from promptkey.bridge.framing import OUTBOUND_LIMIT, encode_frame
from promptkey.errors import ProtocolError

PROTOCOL_VERSION = 1

# Field specs: name -> type tag. A trailing "?" marks the field optional.
# Tags: str, int, bool, str|null, list[str], list[runs] (styled preview runs),
# dict.
FIELD_SPECS: dict[str, dict[str, str]] = {
    # Handshake; both sides send one, versions must match.
    "hello": {"version": "int", "role": "str", "features": "list[str]?"},
    # Service -> extension requests.
    "extract_selection": {"want_context": "bool"},
    "insert_text": {"text": "str", "mode": "str"},
    "submit_query": {"provider": "str", "prompt": "str", "session_ref": "str|null"},
    "pick_elements": {"provider": "str"},
    # Extension -> service responses.
    "selection_result": {
        "ok": "bool",
        "selected_text": "str?",
        "context_text": "str|null?",
        "editable": "bool?",
        "disjoint": "bool?",
        "error": "str?",
    },
    "insert_ack": {"ok": "bool", "chars": "int?", "error": "str?"},
    "response_chunk": {"content": "str", "append": "bool?"},
    "response_done": {"content": "str|null", "session_ref": "str?"},
    "response_failed": {"kind": "str", "detail": "str"},
    "selectors_updated": {
        "ok": "bool",
        "input": "dict?",
        "output": "dict?",
        "error": "str?",
    },
    # One-way notifications.
    "open_chat": {"provider": "str", "session_ref": "str|null"},
    "editability_result": {"editable": "bool"},
    "rediscovery_failed": {"provider": "str", "missing": "str"},
    "error": {"code": "str", "detail": "str"},
    # Popup channel (same codec over a local socket).
    "menu_open": {
        "selection": "str",
        "editable": "bool",
        "warning": "str|null",
        "quick_actions": "list[str]",
        "app_name": "str",
    },
    "menu_close": {},
    "preview_update": {"runs": "list[runs]", "streaming": "bool", "error": "str|null"},
    "user_action": {
        "action": "str",
        "slot": "int?",
        "text": "str?",
        "direct": "bool?",
        "append": "bool?",
    },
}

# Every request type has exactly one terminal response type. submit_query's
# terminal is response_done or response_failed; response_chunk is interim.
REQUEST_RESPONSE: dict[str, frozenset[str]] = {
    "hello": frozenset({"hello"}),
    "extract_selection": frozenset({"selection_result"}),
    "insert_text": frozenset({"insert_ack"}),
    "submit_query": frozenset({"response_done", "response_failed"}),
    "pick_elements": frozenset({"selectors_updated"}),
}

INTERIM_RESPONSES: dict[str, frozenset[str]] = {
    "submit_query": frozenset({"response_chunk"}),
}


@dataclass(frozen=True)
class BridgeMessage:
    type: str
    id: int
    body: dict = field(default_factory=dict)


def _check_value(tag: str, value) -> bool:
    if tag == "str":
        return isinstance(value, str)
    if tag == "int":
        return isinstance(value, int) and not isinstance(value, bool)
    if tag == "bool":
        return isinstance(value, bool)
    if tag == "str|null":
        return value is None or isinstance(value, str)
    if tag == "list[str]":
        return isinstance(value, list) and all(isinstance(x, str) for x in value)
    if tag == "list[runs]":
        return isinstance(value, list) and all(
            isinstance(x, dict)
            and isinstance(x.get("style"), str)
            and isinstance(x.get("text"), str)
            for x in value
        )
    if tag == "dict":
        return isinstance(value, dict)
    raise ValueError(f"unknown field tag {tag!r}")


def body_problems(msg_type: str, body: dict) -> list[str]:
    """Return schema violations for a known message type (empty list = valid)."""
    spec = FIELD_SPECS[msg_type]
    problems = []
    for name, tag in spec.items():
        optional = tag.endswith("?")
        tag = tag.rstrip("?")
        if name not in body:
            if not optional:
                problems.append(f"missing field {name!r}")
            continue
        if not _check_value(tag, body[name]):
            problems.append(f"field {name!r} is not {tag}")
    for name in body:
        if name not in spec:
            problems.append(f"unexpected field {name!r}")
    return problems


def message_to_payload(msg: BridgeMessage) -> bytes:
    """Canonical JSON bytes (sorted keys, no whitespace) for a message."""
    obj = {"type": msg.type, "id": msg.id, **msg.body}
    return json.dumps(
        obj, ensure_ascii=False, separators=(",", ":"), sort_keys=True
    ).encode("utf-8")


def message_from_payload(payload: bytes) -> BridgeMessage:
    """Parse one payload; envelope violations raise ProtocolError."""
    try:
        obj = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ProtocolError(f"unparsable payload: {exc}") from exc
    if not isinstance(obj, dict):
        raise ProtocolError("payload is not an object")
    msg_type = obj.pop("type", None)
    msg_id = obj.pop("id", None)
    if not isinstance(msg_type, str) or not msg_type:
        raise ProtocolError("missing message type")
    if not isinstance(msg_id, int) or isinstance(msg_id, bool) or msg_id < 0:
        raise ProtocolError("missing or invalid correlation id")
    return BridgeMessage(type=msg_type, id=msg_id, body=obj)


def encode_message(msg: BridgeMessage, limit: int = OUTBOUND_LIMIT) -> bytes:
    return encode_frame(message_to_payload(msg), limit=limit)


def decode_message(payload: bytes) -> BridgeMessage:
    return message_from_payload(payload)


def split_oversize_content(
    msg_id: int, content: str, limit: int = OUTBOUND_LIMIT
) -> list[BridgeMessage]:
    """Chunk an oversize final response at the schema level.

    A response too large for one frame goes out as append-mode response_chunk
    segments followed by ``response_done`` with ``content: null`` ("concatenate
    what you received"). Frames themselves are never split.
    """
    done = BridgeMessage("response_done", msg_id, {"content": content})
    if len(message_to_payload(done)) <= limit:
        return [done]
    # Leave generous headroom for the JSON envelope and UTF-8 expansion.
    step = max(1, limit // 8)
    parts = [
        BridgeMessage(
            "response_chunk",
            msg_id,
            {"content": content[i : i + step], "append": True},
        )
        for i in range(0, len(content), step)
    ]
    parts.append(BridgeMessage("response_done", msg_id, {"content": None}))
    return parts
