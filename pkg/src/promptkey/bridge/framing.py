"""Length-prefixed framing.

Frames are ``<u32 little-endian length><payload bytes>``. Encoding enforces the
1 MiB outbound cap of the browser native-messaging regime; decoding tolerates
up to 4 MiB inbound. A length header beyond the inbound limit is unrecoverable
(we can no longer find frame boundaries), so the decoder poisons itself.
"""

from __future__ import annotations

import struct

from promptkey.errors import ProtocolError, TooLarge

OUTBOUND_LIMIT = 1 * 1024 * 1024
INBOUND_LIMIT = 4 * 1024 * 1024

_HEADER = struct.Struct("<I")


def encode_frame(payload: bytes, limit: int = OUTBOUND_LIMIT) -> bytes:
    """Prefix ``payload`` with its little-endian length."""
    if len(payload) > limit:
        raise TooLarge(f"payload is {len(payload)} bytes, limit {limit}")
    return _HEADER.pack(len(payload)) + payload


class FrameDecoder:
    """Incremental frame splitter.

    Feed arbitrary byte chunks; complete payloads come out in order. Partial
    frames are buffered across calls, so any chunking of the same byte stream
    yields the same payload sequence.
    """

    def __init__(self, limit: int = INBOUND_LIMIT):
        self._limit = limit
        self._buffer = bytearray()
        self._dead = False

    @property
    def dead(self) -> bool:
        """True once a protocol violation was seen; the channel must close."""
        return self._dead

    def feed(self, data: bytes) -> list[bytes]:
        if self._dead:
            raise ProtocolError("decoder already poisoned")
        self._buffer.extend(data)
        payloads: list[bytes] = []
        while True:
            if len(self._buffer) < _HEADER.size:
                return payloads
            (length,) = _HEADER.unpack_from(self._buffer)
            if length > self._limit:
                self._dead = True
                raise ProtocolError(
                    f"frame length {length} exceeds inbound limit {self._limit}"
                )
            end = _HEADER.size + length
            if len(self._buffer) < end:
                return payloads
            payloads.append(bytes(self._buffer[_HEADER.size:end]))
            del self._buffer[:end]
