"""Spread approximation: peel off frequently-occurring small patterns.

A family over [n]^k is approximated by a collection of patterns (partial
assignments of at most one value per coordinate, i.e. subsets of size at
most 2 of [k] x [n] here) such that the family is covered by the
restrictions to those patterns plus a small leftover.  The peeling loop
repeatedly chooses an inclusion-maximal pattern S whose quotient retains
at least an r^-|S| fraction of the remaining family, records it if it has
size at most 2, and removes the members containing it; a qualifying
pattern of size 3 or more stops the process.

Post-processing enforces the size caps |S^(1)| <= 2(s-1) and
|S^(2)| <= 4(s-1)^2: a value pair occurring in 2s-1 or more size-2
patterns is promoted to a singleton, an oversized S^(2) or S^(1) replaces
the whole collection with the trivial {empty pattern}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace as dc_replace
from typing import Iterable, Sequence

from .core import Family, FamilySystem, InvalidInputError, TupleK, Universe


@dataclass(frozen=True)
class Pattern:
    """Partial assignment: (coordinate, value) pairs, one per coordinate."""

    pairs: tuple[tuple[int, int], ...]

    def __init__(self, pairs: Iterable[tuple[int, int]] = ()):
        pairs = tuple(sorted((int(j), int(a)) for j, a in pairs))
        coords = [j for j, _ in pairs]
        if len(set(coords)) != len(coords):
            raise InvalidInputError(f"pattern {pairs!r} repeats a coordinate")
        object.__setattr__(self, "pairs", pairs)

    @property
    def size(self) -> int:
        return len(self.pairs)

    def matches(self, t: TupleK) -> bool:
        return all(t[j - 1] == a for j, a in self.pairs)

    def disjoint_from(self, other: "Pattern") -> bool:
        return not set(self.pairs) & set(other.pairs)

    def coords(self) -> set[int]:
        return {j for j, _ in self.pairs}


EMPTY_PATTERN = Pattern()


def restrict(f: Family, x: Pattern) -> Family:
    """Members containing the pattern (the empty pattern keeps everything)."""
    return Family(f.universe, (t for t in f if x.matches(t)))


def quotient(f: Family, x: Pattern) -> frozenset[Pattern]:
    """Patterns left after removing x from each member containing it.

    Same cardinality as restrict(f, x): members agreeing on x's
    coordinates differ elsewhere.
    """
    drop = x.coords()
    out = set()
    for t in f:
        if x.matches(t):
            out.add(
                Pattern((j, t[j - 1]) for j in range(1, f.universe.k + 1) if j not in drop)
            )
    return frozenset(out)


def cover(f: Family, patterns: Iterable[Pattern]) -> Family:
    """Union of the restrictions of f to each pattern."""
    pats = list(patterns)
    return Family(f.universe, (t for t in f if any(p.matches(t) for p in pats)))


@dataclass(frozen=True)
class TraceStep:
    pattern: Pattern
    family_size: int  # |G| before this step
    selected: int  # |G(S)| = number of members removed
    accepted: bool  # False only for the size->=3 stopper


@dataclass(frozen=True)
class SpreadResult:
    universe: Universe
    s0: tuple[Pattern, ...]
    s1: tuple[Pattern, ...]
    s2: tuple[Pattern, ...]
    leftover: Family
    trace: tuple[TraceStep, ...]
    r_used: float

    def patterns(self) -> tuple[Pattern, ...]:
        return self.s0 + self.s1 + self.s2


def default_r(s: int, k: int) -> float:
    """The analysis's peeling parameter 2^5 * s * log2(sk)."""
    return 2**5 * s * math.log2(s * k)


def _grow_pattern(members: Sequence[TupleK], k: int, r: float) -> tuple[Pattern, int]:
    """Greedily grow a qualifying pattern from empty, one element at a time.

    At each step adds the (j, a) maximizing the surviving-member count
    subject to count >= r^-(|S|+1) * |G|, ties broken lexicographically;
    growth stops once no single element qualifies (maximality in the
    one-step-extension order) or the pattern reaches size 3 (a size-3
    pattern already stops the peeling loop, so further growth cannot
    change the outcome).  Returns the pattern and |G(S)|.
    """
    total = len(members)
    current: list[tuple[int, int]] = []
    current_members = list(members)
    while len(current) < 3:
        threshold = total / r ** (len(current) + 1)
        taken = {j for j, _ in current}
        counts: dict[tuple[int, int], int] = {}
        for t in current_members:
            for j in range(1, k + 1):
                if j not in taken:
                    key = (j, t[j - 1])
                    counts[key] = counts.get(key, 0) + 1
        best: tuple[int, tuple[int, int]] | None = None
        for key in sorted(counts):
            cnt = counts[key]
            if cnt >= threshold and (best is None or cnt > best[0]):
                best = (cnt, key)
        if best is None:
            break
        j, a = best[1]
        current.append((j, a))
        current_members = [t for t in current_members if t[j - 1] == a]
    return Pattern(current), len(current_members)


def build_spread(f: Family, s: int, r_override: float | None = None) -> SpreadResult:
    """Run the peeling loop on one family.

    r defaults to 2^5 * s * log2(sk) and must exceed 1.  The small-leftover
    guarantee only applies when r < n; structural properties (partition,
    cover, caps) hold regardless.
    """
    u = f.universe
    r = float(r_override) if r_override is not None else default_r(s, u.k)
    if not r > 1:
        raise InvalidInputError(f"peeling parameter r must exceed 1, got {r}")
    remaining = list(f.members)
    chosen: list[Pattern] = []
    trace: list[TraceStep] = []
    while remaining:
        pattern, selected = _grow_pattern(remaining, u.k, r)
        if pattern.size >= 3:
            trace.append(TraceStep(pattern, len(remaining), selected, accepted=False))
            break
        chosen.append(pattern)
        trace.append(TraceStep(pattern, len(remaining), selected, accepted=True))
        remaining = [t for t in remaining if not pattern.matches(t)]
    by_size: dict[int, list[Pattern]] = {0: [], 1: [], 2: []}
    for p in chosen:
        by_size[p.size].append(p)
    return SpreadResult(
        universe=u,
        s0=tuple(by_size[0]),
        s1=tuple(by_size[1]),
        s2=tuple(by_size[2]),
        leftover=Family(u, remaining),
        trace=tuple(trace),
        r_used=r,
    )


def postprocess(result: SpreadResult, s: int) -> SpreadResult:
    """Enforce the singleton and pair caps, possibly collapsing to {empty}.

    First any (j, a) lying in >= 2s-1 patterns of the pair layer is
    promoted to a singleton and its pair patterns dropped (repeated until
    stable, scanning values lexicographically).  Then an oversized pair
    layer (> 4(s-1)^2) or singleton layer (>= 2s-1) replaces the whole
    collection with {empty pattern}, whose restriction covers everything.
    """
    s1 = list(result.s1)
    s2 = list(result.s2)
    while True:
        counts: dict[tuple[int, int], int] = {}
        for p in s2:
            for pair in p.pairs:
                counts[pair] = counts.get(pair, 0) + 1
        heavy = sorted(pair for pair, c in counts.items() if c >= 2 * s - 1)
        if not heavy:
            break
        pair = heavy[0]
        promoted = Pattern([pair])
        if promoted not in s1:
            s1.append(promoted)
        s2 = [p for p in s2 if pair not in p.pairs]
    collapse = len(s2) > 4 * (s - 1) ** 2 or len(s1) >= 2 * s - 1
    if collapse:
        return dc_replace(
            result,
            s0=(EMPTY_PATTERN,),
            s1=(),
            s2=(),
            leftover=Family(result.universe),
        )
    return dc_replace(result, s1=tuple(s1), s2=tuple(s2))


def find_disjoint_patterns(
    collections: Sequence[Sequence[Pattern]],
) -> list[Pattern] | None:
    """Exact search for one pattern per collection, pairwise disjoint."""
    picks: list[Pattern] = []

    def rec(depth: int) -> bool:
        if depth == len(collections):
            return True
        for p in collections[depth]:
            if all(p.disjoint_from(q) for q in picks):
                picks.append(p)
                if rec(depth + 1):
                    return True
                picks.pop()
        return False

    return list(picks) if rec(0) else None


@dataclass(frozen=True)
class SpreadReport:
    partition_ok: bool
    cover_ok: bool
    singleton_cap_ok: bool  # |s1| <= 2(s-1)
    pair_cap_ok: bool  # |s2| <= 4(s-1)^2
    leftover_size: int
    leftover_bound: float  # 2^15 s^3 log2(sk)^3 n^(k-3)
    leftover_bound_applies: bool  # only guaranteed when n > r_used
    leftover_ok: bool
    patterns_matching: list[Pattern] | None  # None when not checked
    no_pattern_matching: bool | None

    @property
    def ok(self) -> bool:
        core = self.partition_ok and self.cover_ok and self.singleton_cap_ok and self.pair_cap_ok
        if self.leftover_bound_applies:
            core = core and self.leftover_ok
        if self.no_pattern_matching is not None:
            core = core and self.no_pattern_matching
        return core


def verify_spread(
    f: Family,
    result: SpreadResult,
    s: int,
    pipeline: Sequence[SpreadResult] | None = None,
) -> SpreadReport:
    """Structural verification of one family's spread approximation.

    When `pipeline` carries the results for all s families of a no-rainbow
    system, additionally checks that no pairwise-disjoint pattern
    selection exists across them (exact search).
    """
    u = f.universe
    partition_ok = (
        all(p.size == 0 for p in result.s0)
        and all(p.size == 1 for p in result.s1)
        and all(p.size == 2 for p in result.s2)
    )
    pats = result.patterns()
    cover_ok = all(
        any(p.matches(t) for p in pats) or t in result.leftover for t in f
    )
    singleton_cap_ok = len(result.s1) <= 2 * (s - 1)
    pair_cap_ok = len(result.s2) <= 4 * (s - 1) ** 2
    log2_sk = math.log2(s * u.k) if s * u.k > 1 else 0.0
    leftover_bound = 2**15 * s**3 * log2_sk**3 * float(u.n) ** (u.k - 3)
    leftover_ok = len(result.leftover) <= leftover_bound
    selection = None
    no_matching = None
    if pipeline is not None:
        selection = find_disjoint_patterns([r.patterns() for r in pipeline])
        no_matching = selection is None
    return SpreadReport(
        partition_ok=partition_ok,
        cover_ok=cover_ok,
        singleton_cap_ok=singleton_cap_ok,
        pair_cap_ok=pair_cap_ok,
        leftover_size=len(result.leftover),
        leftover_bound=leftover_bound,
        leftover_bound_applies=u.n > result.r_used,
        leftover_ok=leftover_ok,
        patterns_matching=selection,
        no_pattern_matching=no_matching,
    )


def spread_pipeline(
    system: FamilySystem, r_override: float | None = None
) -> list[SpreadResult]:
    """Build and post-process a spread approximation for every family."""
    s = system.s
    return [postprocess(build_spread(f, s, r_override), s) for f in system.families]
