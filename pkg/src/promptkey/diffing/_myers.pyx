# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled Myers diff kernel; mirrors _myers_py block for block.

Both kernels must return identical matching blocks for the same input — the
selection at import time is a pure speed choice.
"""

from cpython.mem cimport PyMem_Free, PyMem_Malloc

from time import monotonic

from promptkey.diffing._myers_py import DiffDeadline


cdef struct Snake:
    Py_ssize_t x0
    Py_ssize_t y0
    Py_ssize_t x1
    Py_ssize_t y1


def match_blocks(a, b, double deadline=0.0):
    """Matching blocks (i, j, n) between two int sequences."""
    cdef Py_ssize_t n = len(a)
    cdef Py_ssize_t m = len(b)
    cdef Py_ssize_t i
    cdef int *ca = <int *> PyMem_Malloc((n if n else 1) * sizeof(int))
    cdef int *cb = <int *> PyMem_Malloc((m if m else 1) * sizeof(int))
    cdef Py_ssize_t size = 2 * ((n + m + 2) // 2) + 3
    cdef Py_ssize_t *vf = <Py_ssize_t *> PyMem_Malloc(size * sizeof(Py_ssize_t))
    cdef Py_ssize_t *vb = <Py_ssize_t *> PyMem_Malloc(size * sizeof(Py_ssize_t))
    if ca == NULL or cb == NULL or vf == NULL or vb == NULL:
        PyMem_Free(ca); PyMem_Free(cb); PyMem_Free(vf); PyMem_Free(vb)
        raise MemoryError
    out = []
    try:
        for i in range(n):
            ca[i] = a[i]
        for i in range(m):
            cb[i] = b[i]
        _recurse(ca, cb, 0, n, 0, m, vf, vb, out, deadline)
    finally:
        PyMem_Free(ca)
        PyMem_Free(cb)
        PyMem_Free(vf)
        PyMem_Free(vb)
    return out


cdef int _recurse(const int *a, const int *b,
                  Py_ssize_t a0, Py_ssize_t a1, Py_ssize_t b0, Py_ssize_t b1,
                  Py_ssize_t *vf, Py_ssize_t *vb, list out,
                  double deadline) except -1:
    cdef Py_ssize_t p = 0
    cdef Py_ssize_t s = 0
    cdef Snake snake
    while a0 + p < a1 and b0 + p < b1 and a[a0 + p] == b[b0 + p]:
        p += 1
    if p:
        out.append((a0, b0, p))
        a0 += p
        b0 += p
    while a1 - 1 - s >= a0 and b1 - 1 - s >= b0 and a[a1 - 1 - s] == b[b1 - 1 - s]:
        s += 1
    if s:
        a1 -= s
        b1 -= s

    if a0 == a1 or b0 == b1:
        if s:
            out.append((a1, b1, s))
        return 0

    _middle_snake(a, b, a0, a1, b0, b1, vf, vb, deadline, &snake)
    _recurse(a, b, a0, snake.x0, b0, snake.y0, vf, vb, out, deadline)
    if snake.x1 > snake.x0:
        out.append((snake.x0, snake.y0, snake.x1 - snake.x0))
    _recurse(a, b, snake.x1, a1, snake.y1, b1, vf, vb, out, deadline)
    if s:
        out.append((a1, b1, s))
    return 0


cdef int _middle_snake(const int *a, const int *b,
                       Py_ssize_t a0, Py_ssize_t a1, Py_ssize_t b0, Py_ssize_t b1,
                       Py_ssize_t *vf, Py_ssize_t *vb, double deadline,
                       Snake *result) except -1:
    cdef Py_ssize_t n = a1 - a0
    cdef Py_ssize_t m = b1 - b0
    cdef Py_ssize_t delta = n - m
    cdef bint odd = delta & 1
    cdef Py_ssize_t dmax = (n + m + 2) // 2
    cdef Py_ssize_t off = dmax + 1
    cdef Py_ssize_t d, k, x, y, sx, sy
    vf[off + 1] = 0
    vb[off + 1] = 0
    for d in range(dmax + 1):
        if deadline != 0.0 and monotonic() > deadline:
            raise DiffDeadline
        k = -d
        while k <= d:
            if k == -d or (k != d and vf[off + k - 1] < vf[off + k + 1]):
                x = vf[off + k + 1]
            else:
                x = vf[off + k - 1] + 1
            y = x - k
            sx = x
            sy = y
            while x < n and y < m and a[a0 + x] == b[b0 + y]:
                x += 1
                y += 1
            vf[off + k] = x
            if odd and -(d - 1) <= k - delta <= d - 1 and vf[off + k] + vb[off + delta - k] >= n:
                result.x0 = a0 + sx
                result.y0 = b0 + sy
                result.x1 = a0 + x
                result.y1 = b0 + y
                return 0
            k += 2
        k = -d
        while k <= d:
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
            if (not odd) and -d <= k - delta <= d and vb[off + k] + vf[off + delta - k] >= n:
                sy = sx - k
                result.x0 = a0 + n - x
                result.y0 = b0 + m - y
                result.x1 = a0 + n - sx
                result.y1 = b0 + m - sy
                return 0
            k += 2
    raise AssertionError("middle snake search failed to converge")
