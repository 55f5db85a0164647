# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled backtracking kernel for rainbow-matching search.

Mirrors ``_purekernel.search`` exactly: identical candidate order, identical
node accounting, identical statuses.  The recursion runs without the GIL so
callers may shard independent searches across threads.
"""

import numpy as np

from libc.stdint cimport int64_t, uint8_t
from posix.time cimport CLOCK_MONOTONIC, clock_gettime, timespec

FOUND, NONE, BUDGET, TIMEOUT = 0, 1, 2, 3

cdef enum:
    ST_FOUND = 0
    ST_NONE = 1
    ST_BUDGET = 2
    ST_TIMEOUT = 3
    TIME_CHECK_MASK = 1023


cdef double _now() noexcept nogil:
    cdef timespec ts
    clock_gettime(CLOCK_MONOTONIC, &ts)
    return ts.tv_sec + ts.tv_nsec * 1e-9


cdef int _rec(int depth, int s, int k, int64_t n,
              const int64_t[::1] members, const int64_t[::1] offsets,
              const int64_t[::1] strides,
              uint8_t[::1] used, int64_t[::1] picks,
              int64_t* nodes, int64_t max_nodes, double deadline) noexcept nogil:
    cdef int64_t i, t, rem, v
    cdef int j, res
    cdef bint ok
    if depth == s:
        return ST_FOUND
    for i in range(offsets[depth], offsets[depth + 1]):
        t = members[i]
        rem = t
        ok = True
        for j in range(k):
            v = rem // strides[j]
            rem -= v * strides[j]
            if used[j * n + v]:
                ok = False
                break
        if not ok:
            continue
        nodes[0] += 1
        if nodes[0] > max_nodes:
            return ST_BUDGET
        if deadline > 0 and (nodes[0] & TIME_CHECK_MASK) == 0 and _now() > deadline:
            return ST_TIMEOUT
        rem = t
        for j in range(k):
            v = rem // strides[j]
            rem -= v * strides[j]
            used[j * n + v] = 1
        picks[depth] = t
        res = _rec(depth + 1, s, k, n, members, offsets, strides,
                   used, picks, nodes, max_nodes, deadline)
        rem = t
        for j in range(k):
            v = rem // strides[j]
            rem -= v * strides[j]
            used[j * n + v] = 0
        if res != ST_NONE:
            return res
    return ST_NONE


def search(n, k, families, max_nodes, deadline=0.0):
    """Same contract as _purekernel.search; families are index sequences."""
    cdef int s = len(families)
    sizes = [len(f) for f in families]
    offsets_np = np.zeros(s + 1, dtype=np.int64)
    np.cumsum(sizes, out=offsets_np[1:])
    members_np = np.empty(int(offsets_np[s]), dtype=np.int64)
    cdef Py_ssize_t pos = 0
    for fam in families:
        for t in fam:
            members_np[pos] = t
            pos += 1
    strides_np = np.array([n ** (k - 1 - j) for j in range(k)], dtype=np.int64)
    used_np = np.zeros(k * n, dtype=np.uint8)
    picks_np = np.zeros(max(s, 1), dtype=np.int64)

    cdef const int64_t[::1] members = members_np
    cdef const int64_t[::1] offsets = offsets_np
    cdef const int64_t[::1] strides = strides_np
    cdef uint8_t[::1] used = used_np
    cdef int64_t[::1] picks = picks_np
    cdef int64_t nodes = 0
    cdef int64_t c_max_nodes = max_nodes
    cdef double c_deadline = deadline
    cdef int64_t c_n = n
    cdef int c_k = k
    cdef int status

    with nogil:
        status = _rec(0, s, c_k, c_n, members, offsets, strides,
                      used, picks, &nodes, c_max_nodes, c_deadline)

    result = [int(v) for v in picks_np[:s]] if status == FOUND else None
    return status, result, int(nodes)
