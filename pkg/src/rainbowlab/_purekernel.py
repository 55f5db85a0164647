"""Pure-Python backtracking kernel for rainbow-matching search.

Reference implementation of the kernel contract shared with the compiled
twin in ``_fastkernel``: both must visit candidates in identical order and
count nodes identically, so that results (and node counts) are
backend-independent.  Families are given as sequences of tuple ranks in
the order they should be searched; a "node" is one accepted placement.
"""

from __future__ import annotations

import time
from typing import Sequence

FOUND, NONE, BUDGET, TIMEOUT = 0, 1, 2, 3

_TIME_CHECK_MASK = 1023


def search(
    n: int,
    k: int,
    families: Sequence[Sequence[int]],
    max_nodes: int,
    deadline: float = 0.0,
) -> tuple[int, list[int] | None, int]:
    """Depth-first search for one tuple per family, pairwise disjoint.

    Returns (status, picks, nodes); picks are tuple ranks aligned with the
    given family order, present only when status == FOUND.  A NONE status
    certifies that the search space was exhausted.
    """
    s = len(families)
    strides = [n ** (k - 1 - j) for j in range(k)]
    used: list[set[int]] = [set() for _ in range(k)]
    picks = [0] * s
    nodes = 0

    def rec(depth: int) -> int:
        nonlocal nodes
        if depth == s:
            return FOUND
        for t in families[depth]:
            rem = t
            vals = []
            ok = True
            for j in range(k):
                v, rem = divmod(rem, strides[j])
                if v in used[j]:
                    ok = False
                    break
                vals.append(v)
            if not ok:
                continue
            nodes += 1
            if nodes > max_nodes:
                return BUDGET
            if deadline > 0 and (nodes & _TIME_CHECK_MASK) == 0 and time.monotonic() > deadline:
                return TIMEOUT
            for j in range(k):
                used[j].add(vals[j])
            picks[depth] = t
            res = rec(depth + 1)
            for j in range(k):
                used[j].remove(vals[j])
            if res != NONE:
                return res
        return NONE

    status = rec(0)
    return status, (list(picks) if status == FOUND else None), nodes
