"""Browser relay backend: drive a provider's chat page through the extension.

Submitting sends a submit_query over the bridge; the extension types the
prompt into the page and forwards the output element's full content whenever
it changes. Completion comes either from the extension's response_done or
from this side's quiescence monitor, whichever fires first; the hard timeout
guarantees a terminal event no matter what.
"""

from __future__ import annotations

import queue
import time
from typing import Callable, Iterator

from promptkey.bridge import BridgeMessage, Dispatcher
from promptkey.events import SUBMIT_FAILED, Chunk, Done, Failed, ResponseEvent
from promptkey.gateway.quiescence import QuiescenceMonitor, QuiescenceRule

# Upper bound on one inbox wait so cancellation stays responsive.
_POLL_S = 0.05


class RelayBackend:
    name = "relay"

    def __init__(
        self,
        dispatcher: Dispatcher,
        provider: str = "default",
        rule: QuiescenceRule | None = None,
        clock: Callable[[], float] = time.monotonic,
    ):
        self.dispatcher = dispatcher
        self.provider = provider
        self.rule = rule or QuiescenceRule()
        self.clock = clock

    def preload(self, session_key: str, session_ref: str | None) -> None:
        """Ask the extension to open/background-load the provider page."""
        self.dispatcher.send(
            BridgeMessage(
                "open_chat",
                self.dispatcher.next_id(),
                {"provider": self.provider, "session_ref": session_ref},
            )
        )

    def stream(self, request, cancelled: Callable[[], bool]) -> Iterator[ResponseEvent]:
        msg = BridgeMessage(
            "submit_query",
            self.dispatcher.next_id(),
            {
                "provider": self.provider,
                "prompt": request.prompt,
                "session_ref": request.backend_session_ref,
            },
        )
        try:
            inbox = self.dispatcher.request(msg)
        except Exception as exc:
            yield Failed(SUBMIT_FAILED, f"bridge send failed: {exc}")
            return

        monitor = QuiescenceMonitor(self.rule, start=self.clock())
        content = ""
        try:
            while True:
                if cancelled():
                    return  # gateway emits the cancel terminal
                wait = max(0.0, monitor.next_deadline() - self.clock())
                try:
                    reply = inbox.get(timeout=min(wait, _POLL_S) if wait else _POLL_S)
                except queue.Empty:
                    reply = None
                now = self.clock()
                if reply is not None:
                    if reply.type == "response_chunk":
                        if reply.body.get("append"):
                            content += reply.body["content"]
                        else:
                            content = reply.body["content"]
                        if monitor.on_content(now, content):
                            yield Chunk(content)
                        continue
                    if reply.type == "response_done":
                        final = reply.body.get("content")
                        yield Done(content if final is None else final)
                        return
                    if reply.type == "response_failed":
                        yield Failed(
                            reply.body.get("kind", SUBMIT_FAILED),
                            reply.body.get("detail", ""),
                            partial=content,
                        )
                        return
                    if reply.type == "error":
                        yield Failed(SUBMIT_FAILED, str(reply.body), partial=content)
                        return
                    continue
                terminal = monitor.due(now)
                if terminal is not None:
                    yield terminal
                    return
        finally:
            self.dispatcher.forget(msg.id)
