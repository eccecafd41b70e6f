"""Completion detection for polled chat output.

A chat page gives no explicit end-of-response signal, so the relay declares a
response complete once its content has stopped changing for a configured
window. The monitor is pure over an injected clock, which is what makes the
timing testable on a simulated clock.

The window counts from the last observed change; before any content appears
only the hard timeout applies (a slow page must not complete as empty).
"""

from __future__ import annotations

from dataclasses import dataclass

from promptkey.events import HARD_TIMEOUT, Done, Failed

DEFAULT_WINDOW_S = 1.0
DEFAULT_HARD_TIMEOUT_S = 120.0


@dataclass(frozen=True)
class QuiescenceRule:
    window: float = DEFAULT_WINDOW_S
    hard_timeout: float = DEFAULT_HARD_TIMEOUT_S

    def __post_init__(self):
        if not (0 < self.window < self.hard_timeout):
            raise ValueError("need 0 < window < hard_timeout")


class QuiescenceMonitor:
    def __init__(self, rule: QuiescenceRule, start: float):
        self.rule = rule
        self.start = start
        self.last_change: float | None = None
        self.content = ""

    def on_content(self, now: float, text: str) -> bool:
        """Record an observation; returns True when it changed the content."""
        if text == self.content and self.last_change is not None:
            return False
        changed = text != self.content or self.last_change is None
        self.content = text
        self.last_change = now
        return changed

    def next_deadline(self) -> float:
        hard = self.start + self.rule.hard_timeout
        if self.last_change is None:
            return hard
        return min(self.last_change + self.rule.window, hard)

    def due(self, now: float) -> Done | Failed | None:
        """The terminal event owed at ``now``, if any."""
        if now >= self.start + self.rule.hard_timeout:
            if self.last_change is not None and now >= self.last_change + self.rule.window:
                return Done(self.content)
            return Failed(HARD_TIMEOUT, detail="response never went quiet", partial=self.content)
        if self.last_change is not None and now >= self.last_change + self.rule.window:
            return Done(self.content)
        return None
