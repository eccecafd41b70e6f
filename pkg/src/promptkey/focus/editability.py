"""Editability rules, conservative by default: unknown means not editable.

The native side keys on accessibility roles; the web side (browser extension)
keys on tag names and attributes. Both are pinned by the shared fixture table
in fixtures/editability_cases.json so the two components cannot drift apart.
"""

from __future__ import annotations

# Roles whose nodes expose a text pattern (searchable for selection/insert).
TEXT_CAPABLE_ROLES = frozenset({"document", "edit", "text"})


def is_text_capable(role: str) -> bool:
    return role in TEXT_CAPABLE_ROLES


def native_editable(role: str, editable_flag: bool) -> bool:
    """A node accepts text input only if its role is text-capable AND the
    node itself reports editable; anything unknown is read-only."""
    return is_text_capable(role) and editable_flag
