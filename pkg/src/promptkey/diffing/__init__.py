"""Word-level diff between the original selection and the LLM response.

Tokens are runs of non-whitespace, runs of non-newline whitespace, and
newlines (each newline is its own token), so concatenating the token list
reproduces the input exactly. The diff maximizes the number of equal tokens
(true LCS via Myers' algorithm); within each changed region deletions are
emitted before insertions.

The inner loop runs in a compiled kernel when available; set
``PROMPTKEY_PURE_DIFF=1`` to force the pure-Python fallback. Both kernels
implement the same algorithm and return identical results.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from time import monotonic

from promptkey.diffing._myers_py import DiffDeadline
from promptkey.diffing import _myers_py

if os.environ.get("PROMPTKEY_PURE_DIFF", "") not in ("", "0"):
    _kernel = _myers_py
    KERNEL = "pure"
else:
    try:
        from promptkey.diffing import _myers as _kernel  # type: ignore[no-redef]

        KERNEL = "compiled"
    except ImportError:
        _kernel = _myers_py
        KERNEL = "pure"

EQUAL = "equal"
DELETE = "delete"
INSERT = "insert"

_STYLE_FOR_KIND = {EQUAL: "kept", DELETE: "removed", INSERT: "added"}

_TOKEN_RE = re.compile(r"\n|[^\S\n]+|\S+")


@dataclass(frozen=True)
class DiffSpan:
    kind: str
    text: str


def tokenize(text: str) -> list[str]:
    """Split into diff tokens; ``"".join(tokenize(t)) == t`` always."""
    return _TOKEN_RE.findall(text)


def word_diff(original: str, revised: str, timeout: float = 2.0) -> list[DiffSpan]:
    """Token-level diff spans from ``original`` to ``revised``.

    Concatenating equal+delete spans reproduces ``original``; equal+insert
    spans reproduce ``revised``. If the computation exceeds ``timeout``
    seconds (adversarial inputs), the result degrades to one delete plus one
    insert span, which still satisfies both reconstructions.
    """
    tokens_a = tokenize(original)
    tokens_b = tokenize(revised)
    if original == revised:
        return [DiffSpan(EQUAL, original)] if original else []
    try:
        blocks = _block_diff(tokens_a, tokens_b, timeout)
    except DiffDeadline:
        blocks = []
    spans = _spans_from_blocks(tokens_a, tokens_b, blocks)
    return spans


def render_preview(spans: list[DiffSpan]) -> list[dict]:
    """Styled runs for the popup preview: kept / removed / added."""
    return [{"style": _STYLE_FOR_KIND[span.kind], "text": span.text} for span in spans]


def equal_token_count(spans: list[DiffSpan]) -> int:
    """Number of equal tokens in a span list (re-tokenization is stable)."""
    return sum(len(tokenize(span.text)) for span in spans if span.kind == EQUAL)


def _block_diff(tokens_a: list[str], tokens_b: list[str], timeout: float):
    """Matching blocks over token lists, via interning plus the Myers kernel.

    Tokens that occur in only one input can never match; dropping them before
    the O(ND) search leaves the LCS unchanged and collapses the worst case for
    unrelated texts.
    """
    if not tokens_a or not tokens_b:
        return []
    ids: dict[str, int] = {}
    ids_a = [ids.setdefault(t, len(ids)) for t in tokens_a]
    ids_b = [ids.setdefault(t, len(ids)) for t in tokens_b]

    common = set(ids_a) & set(ids_b)
    map_a = [i for i, t in enumerate(ids_a) if t in common]
    map_b = [i for i, t in enumerate(ids_b) if t in common]
    reduced_a = [ids_a[i] for i in map_a]
    reduced_b = [ids_b[i] for i in map_b]
    if not reduced_a or not reduced_b:
        return []

    deadline = monotonic() + timeout if timeout else 0.0
    reduced_blocks = _kernel.match_blocks(reduced_a, reduced_b, deadline)

    # Blocks over the reduced sequences correspond to per-token matches at
    # original indices; adjacent pairs re-merge into maximal original blocks.
    blocks: list[tuple[int, int, int]] = []
    for ri, rj, rn in reduced_blocks:
        for t in range(rn):
            oi, oj = map_a[ri + t], map_b[rj + t]
            if blocks and blocks[-1][0] + blocks[-1][2] == oi and blocks[-1][1] + blocks[-1][2] == oj:
                blocks[-1] = (blocks[-1][0], blocks[-1][1], blocks[-1][2] + 1)
            else:
                blocks.append((oi, oj, 1))
    return blocks


def _spans_from_blocks(tokens_a, tokens_b, blocks) -> list[DiffSpan]:
    spans: list[DiffSpan] = []
    ia = ib = 0
    for i, j, n in [*blocks, (len(tokens_a), len(tokens_b), 0)]:
        if ia < i:
            spans.append(DiffSpan(DELETE, "".join(tokens_a[ia:i])))
        if ib < j:
            spans.append(DiffSpan(INSERT, "".join(tokens_b[ib:j])))
        if n:
            text = "".join(tokens_a[i : i + n])
            if spans and spans[-1].kind == EQUAL:
                spans[-1] = DiffSpan(EQUAL, spans[-1].text + text)
            else:
                spans.append(DiffSpan(EQUAL, text))
        ia, ib = i + n, j + n
    return spans
