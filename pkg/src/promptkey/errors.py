"""Exception types shared across the package."""

from __future__ import annotations


class PromptKeyError(Exception):
    """Base class for all promptkey errors."""


class ConfigInvalid(PromptKeyError):
    pass


class HotkeyUnavailable(PromptKeyError):
    pass


class CaptureFailed(PromptKeyError):
    pass


class AdapterFailure(PromptKeyError):
    pass


class ClipboardUnavailable(PromptKeyError):
    pass


class UndoFailed(PromptKeyError):
    """Undo of the probe edit failed; the document was left dirty.

    Never swallowed: callers must surface this, the target document no longer
    matches what the user last saw.
    """

    def __init__(self, message: str, document_dirty: bool = True):
        super().__init__(message)
        self.document_dirty = document_dirty


class NotEditable(PromptKeyError):
    pass


class PasteRejected(PromptKeyError):
    pass


class IllegalTransition(PromptKeyError):
    """A (state, action) pair outside the declared transition table."""

    def __init__(self, state_kind: str, action_kind: str):
        super().__init__(f"no transition for {state_kind} + {action_kind}")
        self.state_kind = state_kind
        self.action_kind = action_kind


class EmptyQuery(PromptKeyError):
    pass


class UnknownSlot(PromptKeyError):
    pass


class StoreUnavailable(PromptKeyError):
    pass


class Busy(PromptKeyError):
    """A request is already in flight for this session."""


class BackendUnavailable(PromptKeyError):
    pass


class AuthFailed(PromptKeyError):
    pass


class UnknownRequest(PromptKeyError):
    pass


class TooLarge(PromptKeyError):
    """Outbound bridge frame exceeds the channel limit."""


class ProtocolError(PromptKeyError):
    """Inbound bridge bytes violate the framing or schema rules."""


class VersionMismatch(PromptKeyError):
    pass
