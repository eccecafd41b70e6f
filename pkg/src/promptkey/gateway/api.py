"""Direct provider API backend: streaming chat completions over HTTP.

Provider deltas are accumulated and re-emitted as full-content chunks, so
downstream consumers see the same event shape as the browser relay. The
credential comes from an environment variable only, never from the config
file.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Callable, Iterator

import requests

from promptkey.events import (
    AUTH_FAILED,
    BACKEND_UNAVAILABLE,
    CONNECTION_LOST,
    PROTOCOL_ERROR,
    Chunk,
    Done,
    Failed,
    ResponseEvent,
)

DEFAULT_KEY_ENV = "PROMPTKEY_API_KEY"


@dataclass(frozen=True)
class ApiConfig:
    base_url: str
    model: str = "default"
    api_key_env: str = DEFAULT_KEY_ENV
    connect_timeout: float = 10.0
    read_timeout: float = 300.0


class ApiBackend:
    name = "api"

    def __init__(self, config: ApiConfig):
        self.config = config

    def preload(self, session_key: str, session_ref: str | None) -> None:
        """Nothing to warm up: the API has no page to load."""

    def stream(self, request, cancelled: Callable[[], bool]) -> Iterator[ResponseEvent]:
        messages = []
        for prompt, response in request.history:
            messages.append({"role": "user", "content": prompt})
            messages.append({"role": "assistant", "content": response})
        messages.append({"role": "user", "content": request.prompt})

        headers = {}
        key = os.environ.get(self.config.api_key_env, "")
        if key:
            headers["Authorization"] = f"Bearer {key}"

        url = self.config.base_url.rstrip("/") + "/v1/chat/completions"
        try:
            response = requests.post(
                url,
                json={"model": self.config.model, "messages": messages, "stream": True},
                headers=headers,
                stream=True,
                timeout=(self.config.connect_timeout, self.config.read_timeout),
            )
        except requests.RequestException as exc:
            yield Failed(BACKEND_UNAVAILABLE, f"cannot reach provider: {exc}")
            return

        with response:
            if response.status_code == 401:
                yield Failed(AUTH_FAILED, "provider rejected the API key")
                return
            if response.status_code != 200:
                yield Failed(BACKEND_UNAVAILABLE, f"provider returned HTTP {response.status_code}")
                return

            accumulated = ""
            done_seen = False
            try:
                for line in response.iter_lines(decode_unicode=True):
                    if cancelled():
                        return  # the gateway owns the cancel terminal
                    if not line or not line.startswith("data:"):
                        continue  # SSE comments / keepalives
                    payload = line[len("data:"):].strip()
                    if payload == "[DONE]":
                        done_seen = True
                        break
                    try:
                        frame = json.loads(payload)
                    except json.JSONDecodeError:
                        yield Failed(PROTOCOL_ERROR, f"malformed frame: {payload[:80]}",
                                     partial=accumulated)
                        return
                    delta = frame.get("delta")
                    if not isinstance(delta, str):
                        yield Failed(PROTOCOL_ERROR, "frame missing text delta",
                                     partial=accumulated)
                        return
                    if delta:
                        accumulated += delta
                        yield Chunk(accumulated)
            except requests.RequestException as exc:
                yield Failed(CONNECTION_LOST, str(exc), partial=accumulated)
                return

        if done_seen:
            yield Done(accumulated)
        else:
            yield Failed(CONNECTION_LOST, "stream ended without completion marker",
                         partial=accumulated)
