"""Pure-Python Myers diff kernel (linear-space middle-snake variant).

``match_blocks(a, b)`` returns the matching blocks ``(i, j, n)`` between two
int sequences, in order; the sum of the ``n`` values is the length of the
longest common subsequence. The compiled kernel in ``_myers.pyx`` implements
the identical algorithm; both must produce identical blocks for the same
input.
"""

from __future__ import annotations

from time import monotonic


class DiffDeadline(Exception):
    """Raised when the diff exceeds its time budget."""


def match_blocks(a, b, deadline: float = 0.0) -> list[tuple[int, int, int]]:
    """Matching blocks between int sequences ``a`` and ``b``.

    ``deadline`` is an absolute ``time.monotonic()`` instant (0 disables it);
    DiffDeadline is raised when it passes.
    """
    out: list[tuple[int, int, int]] = []
    n, m = len(a), len(b)
    size = 2 * ((n + m + 2) // 2) + 3
    vf = [0] * size
    vb = [0] * size
    _recurse(a, b, 0, n, 0, m, vf, vb, out, deadline)
    return out


def _recurse(a, b, a0, a1, b0, b1, vf, vb, out, deadline) -> None:
    # Common prefix and suffix are matches for free.
    p = 0
    while a0 + p < a1 and b0 + p < b1 and a[a0 + p] == b[b0 + p]:
        p += 1
    if p:
        out.append((a0, b0, p))
        a0 += p
        b0 += p
    s = 0
    while a1 - 1 - s >= a0 and b1 - 1 - s >= b0 and a[a1 - 1 - s] == b[b1 - 1 - s]:
        s += 1
    if s:
        a1 -= s
        b1 -= s

    if a0 == a1 or b0 == b1:
        if s:
            out.append((a1, b1, s))
        return

    x0, y0, x1, y1 = _middle_snake(a, b, a0, a1, b0, b1, vf, vb, deadline)
    _recurse(a, b, a0, x0, b0, y0, vf, vb, out, deadline)
    if x1 > x0:
        out.append((x0, y0, x1 - x0))
    _recurse(a, b, x1, a1, y1, b1, vf, vb, out, deadline)
    if s:
        out.append((a1, b1, s))


def _middle_snake(a, b, a0, a1, b0, b1, vf, vb, deadline):
    """Find a middle snake of an optimal edit path (global coordinates)."""
    n = a1 - a0
    m = b1 - b0
    delta = n - m
    odd = delta & 1
    dmax = (n + m + 2) // 2
    off = dmax + 1
    vf[off + 1] = 0
    vb[off + 1] = 0
    for d in range(dmax + 1):
        if deadline and monotonic() > deadline:
            raise DiffDeadline
        for k in range(-d, d + 1, 2):
            if k == -d or (k != d and vf[off + k - 1] < vf[off + k + 1]):
                x = vf[off + k + 1]
            else:
                x = vf[off + k - 1] + 1
            y = x - k
            sx, sy = x, y
            while x < n and y < m and a[a0 + x] == b[b0 + y]:
                x += 1
                y += 1
            vf[off + k] = x
            if odd and -(d - 1) <= k - delta <= d - 1 and vf[off + k] + vb[off + delta - k] >= n:
                return (a0 + sx, b0 + sy, a0 + x, b0 + y)
        for k in range(-d, d + 1, 2):
            if k == -d or (k != d and vb[off + k - 1] < vb[off + k + 1]):
                x = vb[off + k + 1]
            else:
                x = vb[off + k - 1] + 1
            y = x - k
            sx = x
            while x < n and y < m and a[a1 - 1 - x] == b[b1 - 1 - y]:
                x += 1
                y += 1
            vb[off + k] = x
            if not odd and -d <= k - delta <= d and vb[off + k] + vf[off + delta - k] >= n:
                sy = sx - k
                return (a0 + n - x, b0 + m - y, a0 + n - sx, b0 + m - sy)
    raise AssertionError("middle snake search failed to converge")
