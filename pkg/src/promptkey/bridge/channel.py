"""Channel plumbing and message dispatch.

One reader and one writer per channel; writes are serialized by a lock. The
dispatcher routes inbound messages either to the pending request that owns
their correlation id or to a registered handler; unknown types get an
``error`` reply and the channel stays open.
"""

from __future__ import annotations

import logging
import queue
import socket
import threading
from typing import BinaryIO, Callable

from promptkey.bridge.framing import (
    INBOUND_LIMIT,
    OUTBOUND_LIMIT,
    FrameDecoder,
    encode_frame,
)
from promptkey.bridge.schema import (
    FIELD_SPECS,
    INTERIM_RESPONSES,
    PROTOCOL_VERSION,
    REQUEST_RESPONSE,
    BridgeMessage,
    body_problems,
    message_from_payload,
    message_to_payload,
)
from promptkey.errors import ProtocolError, VersionMismatch

logger = logging.getLogger(__name__)

Handler = Callable[[BridgeMessage], "list[BridgeMessage] | BridgeMessage | None"]


class BridgeChannel:
    """A framed message pipe over a pair of binary streams.

    ``interrupt`` is called first on close to wake a reader blocked in a
    stream read (e.g. ``socket.shutdown``); closing a buffered reader from
    another thread would deadlock on its internal lock.
    """

    def __init__(
        self,
        reader: BinaryIO,
        writer: BinaryIO,
        in_limit: int = INBOUND_LIMIT,
        out_limit: int = OUTBOUND_LIMIT,
        interrupt: Callable[[], None] | None = None,
    ):
        self._reader = reader
        self._writer = writer
        self._decoder = FrameDecoder(limit=in_limit)
        self._out_limit = out_limit
        self._interrupt = interrupt
        self._write_lock = threading.Lock()
        self._decoded: list[bytes] = []
        self._closed = False

    @property
    def closed(self) -> bool:
        return self._closed

    def send(self, msg: BridgeMessage) -> None:
        data = encode_frame(message_to_payload(msg), limit=self._out_limit)
        with self._write_lock:
            if self._closed:
                raise ProtocolError("channel closed")
            self._writer.write(data)
            self._writer.flush()

    def recv(self) -> BridgeMessage | None:
        """Read the next message; None on clean end-of-stream."""
        while not self._decoded:
            if hasattr(self._reader, "read1"):
                data = self._reader.read1(65536)
            else:
                data = self._reader.read(65536)
            if not data:
                return None
            self._decoded.extend(self._decoder.feed(data))
        return message_from_payload(self._decoded.pop(0))

    def close(self) -> None:
        self._closed = True
        if self._interrupt is not None:
            try:
                self._interrupt()
            except OSError:
                pass
        try:
            self._writer.close()
        except OSError:
            pass
        # The reader stream is left for GC: the interrupt (or the peer
        # closing) delivers EOF, which ends the read loop.


class LoopbackPair:
    """Two connected channels over a real socket pair (byte-exact framing)."""

    def __init__(self):
        a, b = socket.socketpair()
        self._sockets = (a, b)
        self.left = BridgeChannel(
            a.makefile("rb"), a.makefile("wb"), interrupt=lambda: a.shutdown(socket.SHUT_RDWR)
        )
        self.right = BridgeChannel(
            b.makefile("rb"), b.makefile("wb"), interrupt=lambda: b.shutdown(socket.SHUT_RDWR)
        )

    def close(self) -> None:
        self.left.close()
        self.right.close()
        for s in self._sockets:
            try:
                s.close()
            except OSError:
                pass


class Dispatcher:
    """Routes messages on one channel end.

    Handlers are registered per message type and return zero or more reply
    messages. ``request()`` sends a request and hands back a queue that will
    receive its correlated interim and terminal responses.
    """

    def __init__(self, channel: BridgeChannel, role: str, version: int = PROTOCOL_VERSION):
        self.channel = channel
        self.role = role
        self.version = version
        self.peer_hello: BridgeMessage | None = None
        self._handlers: dict[str, Handler] = {}
        self._pending: dict[int, tuple[str, queue.Queue]] = {}
        self._lock = threading.Lock()
        self._next_id = 1
        self._thread: threading.Thread | None = None
        self._stopped = threading.Event()

    def register(self, msg_type: str, handler: Handler) -> None:
        self._handlers[msg_type] = handler

    def next_id(self) -> int:
        with self._lock:
            value = self._next_id
            self._next_id += 1
        return value

    # -- handshake -------------------------------------------------------

    def hello(self, timeout: float = 5.0) -> BridgeMessage:
        """Initiator side: send hello, wait for the peer's hello."""
        inbox = self.request(
            BridgeMessage("hello", self.next_id(), {"version": self.version, "role": self.role})
        )
        try:
            reply = inbox.get(timeout=timeout)
        except queue.Empty:
            raise ProtocolError("no hello reply") from None
        if reply.type == "error":
            raise VersionMismatch(reply.body.get("detail", "version mismatch"))
        if reply.body.get("version") != self.version:
            raise VersionMismatch(
                f"peer version {reply.body.get('version')} != {self.version}"
            )
        self.peer_hello = reply
        return reply

    def _answer_hello(self, msg: BridgeMessage) -> None:
        if msg.body.get("version") != self.version:
            # No common dialect: error out, then shut the channel.
            self.channel.send(
                BridgeMessage(
                    "error",
                    msg.id,
                    {"code": "version-mismatch", "detail": f"host speaks {self.version}"},
                )
            )
            self._stopped.set()
            self.channel.close()
            raise VersionMismatch(f"peer offered version {msg.body.get('version')}")
        self.peer_hello = msg
        self.channel.send(
            BridgeMessage("hello", msg.id, {"version": self.version, "role": self.role})
        )

    # -- requests ----------------------------------------------------------

    def request(self, msg: BridgeMessage) -> queue.Queue:
        """Send a request; the returned queue yields its response messages."""
        if msg.type not in REQUEST_RESPONSE:
            raise ValueError(f"{msg.type} is not a request type")
        inbox: queue.Queue = queue.Queue()
        with self._lock:
            self._pending[msg.id] = (msg.type, inbox)
        self.channel.send(msg)
        return inbox

    def send(self, msg: BridgeMessage) -> None:
        self.channel.send(msg)

    def forget(self, msg_id: int) -> None:
        """Drop a pending request that was resolved out of band."""
        with self._lock:
            self._pending.pop(msg_id, None)

    # -- inbound loop --------------------------------------------------------

    def start(self) -> None:
        self._thread = threading.Thread(target=self.run, daemon=True, name=f"bridge-{self.role}")
        self._thread.start()

    def run(self) -> None:
        try:
            while not self._stopped.is_set():
                msg = self.channel.recv()
                if msg is None:
                    break
                self._route(msg)
        except VersionMismatch:
            pass
        except ProtocolError as exc:
            logger.warning("bridge channel poisoned: %s", exc)
            self.channel.close()
        except (OSError, ValueError):
            pass
        finally:
            self._fail_pending()

    def stop(self) -> None:
        self._stopped.set()
        self.channel.close()
        if self._thread and self._thread is not threading.current_thread():
            self._thread.join(timeout=2)

    def _fail_pending(self) -> None:
        """In-flight requests on a lost channel fail, they never hang."""
        with self._lock:
            pending = list(self._pending.values())
            self._pending.clear()
        for _req_type, inbox in pending:
            inbox.put(
                BridgeMessage(
                    "response_failed", 0, {"kind": "backend-unavailable", "detail": "channel lost"}
                )
            )

    def _route(self, msg: BridgeMessage) -> None:
        with self._lock:
            pending = self._pending.get(msg.id)
        if pending is not None:
            req_type, inbox = pending
            terminal = msg.type in REQUEST_RESPONSE[req_type] or msg.type == "error"
            interim = msg.type in INTERIM_RESPONSES.get(req_type, frozenset())
            if terminal or interim:
                if terminal:
                    with self._lock:
                        self._pending.pop(msg.id, None)
                inbox.put(msg)
                return
        if msg.type == "hello":
            self._answer_hello(msg)
            return
        handler = self._handlers.get(msg.type)
        if handler is None:
            if msg.type != "error":  # never error-reply to an error: no loops
                self.channel.send(
                    BridgeMessage("error", msg.id, {"code": "unknown-type", "detail": msg.type})
                )
            return
        if msg.type in FIELD_SPECS:
            problems = body_problems(msg.type, msg.body)
            if problems:
                self.channel.send(
                    BridgeMessage(
                        "error", msg.id, {"code": "bad-payload", "detail": "; ".join(problems)}
                    )
                )
                return
        replies = handler(msg)
        if replies is None:
            return
        if isinstance(replies, BridgeMessage):
            replies = [replies]
        for reply in replies:
            self.channel.send(reply)
