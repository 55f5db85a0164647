"""Exact rainbow-matching search and the operations built on it.

A rainbow matching of a system picks one tuple per family, pairwise
disjoint.  The search is an exhaustive backtracking over families in
ascending size order (smallest domain first) with per-coordinate
used-value pruning; a "none" answer is a proof of nonexistence, while
budget exhaustion is reported as its own inconclusive status and never
silently downgraded.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from . import kernels
from .core import (
    BudgetExhaustedError,
    Family,
    FamilySystem,
    InvalidInputError,
    TupleK,
    disjoint,
)
from .matchings import PerfectMatching


@dataclass(frozen=True)
class SearchBudget:
    """Limits for exhaustive operations: node count and wall-clock seconds."""

    max_nodes: int = kernels.DEFAULT_MAX_NODES
    time_limit: float | None = None

    def __post_init__(self):
        if self.max_nodes <= 0:
            raise InvalidInputError("max_nodes must be positive")
        if self.time_limit is not None and self.time_limit <= 0:
            raise InvalidInputError("time_limit must be positive")


class BudgetTracker:
    """Mutable countdown shared by the searches inside one operation."""

    def __init__(self, budget: SearchBudget | None):
        budget = budget or SearchBudget()
        self.remaining = budget.max_nodes
        self.deadline = (
            time.monotonic() + budget.time_limit if budget.time_limit else 0.0
        )

    def consume(self, nodes: int) -> None:
        self.remaining -= nodes

    @property
    def exhausted(self) -> bool:
        if self.remaining <= 0:
            return True
        return bool(self.deadline) and time.monotonic() > self.deadline


@dataclass(frozen=True)
class RainbowMatching:
    picks: tuple[TupleK, ...]

    def validate(self, system: FamilySystem) -> None:
        if len(self.picks) != system.s:
            raise InvalidInputError(
                f"{len(self.picks)} picks for {system.s} families"
            )
        for i, t in enumerate(self.picks):
            if t not in system.families[i]:
                raise InvalidInputError(f"pick {t!r} is not in family {i + 1}")
        for i in range(len(self.picks)):
            for j in range(i + 1, len(self.picks)):
                if not disjoint(self.picks[i], self.picks[j]):
                    raise InvalidInputError(
                        f"picks {self.picks[i]!r} and {self.picks[j]!r} intersect"
                    )


@dataclass(frozen=True)
class SearchResult:
    status: str  # "found" | "none" | "budget-exhausted"
    matching: RainbowMatching | None
    nodes: int
    reason: str | None = None


def _search_system(
    system: FamilySystem,
    tracker: BudgetTracker,
    backend: str | None = None,
) -> SearchResult:
    u = system.universe
    if any(len(f) == 0 for f in system.families):
        return SearchResult("none", None, 0)
    order = sorted(range(system.s), key=lambda i: (len(system.families[i]), i))
    fams = [system.families[i].indices for i in order]
    status, picks, nodes = kernels.search_indices(
        u.n, u.k, fams, max_nodes=tracker.remaining, deadline=tracker.deadline,
        backend=backend,
    )
    tracker.consume(nodes)
    if status == kernels.FOUND:
        by_original: list[TupleK | None] = [None] * system.s
        for pos, original in enumerate(order):
            by_original[original] = u.tuple_at(picks[pos])
        matching = RainbowMatching(tuple(by_original))  # type: ignore[arg-type]
        matching.validate(system)
        return SearchResult("found", matching, nodes)
    if status == kernels.NONE:
        return SearchResult("none", None, nodes)
    reason = "node budget exhausted" if status == kernels.BUDGET else "time limit exceeded"
    return SearchResult("budget-exhausted", None, nodes, reason)


def find_rainbow(
    system: FamilySystem,
    budget: SearchBudget | None = None,
    backend: str | None = None,
) -> SearchResult:
    """Find a rainbow matching or prove none exists within the budget."""
    return _search_system(system, BudgetTracker(budget), backend)


@dataclass(frozen=True)
class GreedyResult:
    matching: RainbowMatching | None
    failed_at: int | None  # 1-based family index of the first failure

    @property
    def ok(self) -> bool:
        return self.matching is not None


def greedy_extract(m: PerfectMatching, system: FamilySystem) -> GreedyResult:
    """Pick unused matching members family by family, in index order.

    Succeeds whenever |m ∩ F_i| >= i for every i: at step i at most i-1
    members are taken, so an unused one remains.
    """
    if m.universe != system.universe:
        raise InvalidInputError("matching and system universes differ")
    taken: set[TupleK] = set()
    picks: list[TupleK] = []
    members = m.members()
    for i, fam in enumerate(system.families, start=1):
        choice = next((t for t in members if t not in taken and t in fam), None)
        if choice is None:
            return GreedyResult(None, i)
        taken.add(choice)
        picks.append(choice)
    matching = RainbowMatching(tuple(picks))
    matching.validate(system)
    return GreedyResult(matching, None)


def saturate(system: FamilySystem, budget: SearchBudget | None = None) -> FamilySystem:
    """Grow a no-rainbow system until adding any tuple anywhere creates one.

    Scan order is fixed (family index ascending, candidate tuples in
    lexicographic order) so the result is deterministic.  Tuples rejected
    once stay rejected: adding members never destroys an existing matching,
    so a single pass per family reaches the unique fixpoint for this order.
    """
    tracker = BudgetTracker(budget)
    first = _search_system(system, tracker)
    if first.status == "found":
        raise InvalidInputError("saturate requires a system with no rainbow matching")
    if first.status == "budget-exhausted":
        raise BudgetExhaustedError(
            f"saturation aborted while checking the input: {first.reason}",
            partial=system,
        )
    u = system.universe
    current = system
    for i in range(current.s):
        for idx in range(u.size):
            t = u.tuple_at(idx)
            if t in current.families[i]:
                continue
            candidate = current.replace_family(i, current.families[i].with_member(t))
            res = _search_system(candidate, tracker)
            if res.status == "budget-exhausted":
                raise BudgetExhaustedError(
                    f"partial saturation: {res.reason} at family {i + 1}, tuple {t!r}",
                    partial=current,
                )
            if res.status == "none":
                current = candidate
    return current


def construct_stripe(u, s: int) -> Family:
    """The extremal family [s-1] x [n]^(k-1): first coordinate below s.

    Its size is (s-1) * n^(k-1), and s families equal to it admit no
    rainbow matching (s picks cannot have pairwise distinct first
    coordinates drawn from s-1 values).
    """
    if not 1 <= s - 1 <= u.n:
        raise InvalidInputError(f"need 1 <= s-1 <= n, got s={s} n={u.n}")
    members = []
    for first in range(1, s):
        for rest in range(u.n ** (u.k - 1)):
            coords = [first]
            idx = rest
            tail = []
            for _ in range(u.k - 1):
                idx, r = divmod(idx, u.n)
                tail.append(r + 1)
            coords.extend(reversed(tail))
            members.append(tuple(coords))
    return Family(u, members)
