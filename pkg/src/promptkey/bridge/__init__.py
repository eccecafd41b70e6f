"""Framed message channel between the service, the browser extension, and the popup.

Wire format: a 32-bit little-endian length header followed by a UTF-8 JSON
payload (the browser native-messaging convention). The same codec is reused
over a local socket for the popup UI.
"""

from promptkey.bridge.framing import (
    INBOUND_LIMIT,
    OUTBOUND_LIMIT,
    FrameDecoder,
    encode_frame,
)
from promptkey.bridge.schema import (
    PROTOCOL_VERSION,
    BridgeMessage,
    decode_message,
    encode_message,
    message_from_payload,
    message_to_payload,
)
from promptkey.bridge.channel import BridgeChannel, Dispatcher, LoopbackPair

__all__ = [
    "INBOUND_LIMIT",
    "OUTBOUND_LIMIT",
    "FrameDecoder",
    "encode_frame",
    "PROTOCOL_VERSION",
    "BridgeMessage",
    "decode_message",
    "encode_message",
    "message_from_payload",
    "message_to_payload",
    "BridgeChannel",
    "Dispatcher",
    "LoopbackPair",
]
