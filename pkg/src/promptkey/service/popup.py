"""Local-socket channel for the popup UI (same codec as the extension bridge)."""

from __future__ import annotations

import logging
import os
import socket
import threading

from promptkey.bridge import BridgeChannel, Dispatcher

logger = logging.getLogger(__name__)


class PopupSocketServer:
    """Accepts popup connections on a unix socket and wires them to the service."""

    def __init__(self, path: str, service):
        self.path = path
        self.service = service
        self._sock: socket.socket | None = None
        self._dispatchers: list[Dispatcher] = []
        self._thread: threading.Thread | None = None
        self._stopped = threading.Event()

    def start(self) -> None:
        if os.path.exists(self.path):
            os.unlink(self.path)
        self._sock = socket.socket(socket.AF_UNIX, socket.SOCK_STREAM)
        self._sock.bind(self.path)
        self._sock.listen(4)
        self._thread = threading.Thread(target=self._accept_loop, daemon=True, name="popup-accept")
        self._thread.start()

    def _accept_loop(self) -> None:
        while not self._stopped.is_set():
            try:
                conn, _addr = self._sock.accept()
            except OSError:
                return
            channel = BridgeChannel(
                conn.makefile("rb"),
                conn.makefile("wb"),
                interrupt=lambda c=conn: c.shutdown(socket.SHUT_RDWR),
            )
            dispatcher = Dispatcher(channel, role="service")
            self.service.attach_ui(dispatcher)
            dispatcher.start()
            self._dispatchers.append(dispatcher)
            logger.info("popup connected")

    def stop(self) -> None:
        self._stopped.set()
        if self._sock is not None:
            try:
                self._sock.close()
            except OSError:
                pass
        for dispatcher in self._dispatchers:
            dispatcher.stop()
        if os.path.exists(self.path):
            try:
                os.unlink(self.path)
            except OSError:
                pass
