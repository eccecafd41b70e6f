"""Bundled mock chat-completions server (the test stand-in for a provider API).

Speaks the minimal streaming contract documented in docs/llm-api.md: POST
/v1/chat/completions with a messages list returns ``data: {"delta": ...}``
lines followed by ``data: [DONE]``. Behaviors are scriptable per request:
custom deltas, an HTTP status, or an abrupt connection drop after N deltas
(end-of-stream without the DONE sentinel).
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


@dataclass
class Behavior:
    deltas: list[str] | None = None
    status: int = 200
    drop_after: int | None = None
    extra_lines: list[str] = field(default_factory=list)


class MockChatServer:
    def __init__(self, require_key: str | None = None):
        self.require_key = require_key
        self.behaviors: list[Behavior] = []
        self.request_log: list[dict] = []
        self._lock = threading.Lock()
        self._httpd: ThreadingHTTPServer | None = None
        self._thread: threading.Thread | None = None

    # -- scripting -----------------------------------------------------

    def script(self, deltas: list[str] | None = None, status: int = 200,
               drop_after: int | None = None, extra_lines: list[str] | None = None) -> None:
        with self._lock:
            self.behaviors.append(Behavior(deltas, status, drop_after, extra_lines or []))

    def _next_behavior(self) -> Behavior:
        with self._lock:
            if self.behaviors:
                return self.behaviors.pop(0)
        return Behavior()

    # -- lifecycle -----------------------------------------------------

    def start(self) -> str:
        server = self

        class Handler(BaseHTTPRequestHandler):
            protocol_version = "HTTP/1.1"

            def log_message(self, *args):  # quiet
                pass

            def do_POST(self):
                if self.path != "/v1/chat/completions":
                    self.send_error(404)
                    return
                length = int(self.headers.get("Content-Length", "0"))
                try:
                    payload = json.loads(self.rfile.read(length) or b"{}")
                except json.JSONDecodeError:
                    payload = {}
                server.request_log.append(payload)

                if server.require_key is not None:
                    auth = self.headers.get("Authorization", "")
                    if auth != f"Bearer {server.require_key}":
                        body = b'{"error": "invalid api key"}'
                        self.send_response(401)
                        self.send_header("Content-Length", str(len(body)))
                        self.end_headers()
                        self.wfile.write(body)
                        return

                behavior = server._next_behavior()
                if behavior.status != 200:
                    body = b'{"error": "scripted failure"}'
                    self.send_response(behavior.status)
                    self.send_header("Content-Length", str(len(body)))
                    self.end_headers()
                    self.wfile.write(body)
                    return

                deltas = behavior.deltas
                if deltas is None:
                    last = ""
                    for message in payload.get("messages", []):
                        if message.get("role") == "user":
                            last = message.get("content", "")
                    deltas = ["echo: ", last]

                self.send_response(200)
                self.send_header("Content-Type", "text/event-stream")
                self.send_header("Connection", "close")
                self.end_headers()
                sent = 0
                for line in behavior.extra_lines:
                    self.wfile.write((line + "\n").encode("utf-8"))
                    self.wfile.flush()
                for delta in deltas:
                    if behavior.drop_after is not None and sent >= behavior.drop_after:
                        # Abrupt drop: EOF with no DONE sentinel.
                        self.wfile.flush()
                        self.connection.close()
                        return
                    frame = json.dumps({"delta": delta}, ensure_ascii=False)
                    self.wfile.write(f"data: {frame}\n\n".encode("utf-8"))
                    self.wfile.flush()
                    sent += 1
                if behavior.drop_after is not None and sent >= behavior.drop_after:
                    self.wfile.flush()
                    self.connection.close()
                    return
                self.wfile.write(b"data: [DONE]\n\n")
                self.wfile.flush()
                self.connection.close()

        self._httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}"

    def stop(self) -> None:
        if self._httpd is not None:
            self._httpd.shutdown()
            self._httpd.server_close()
