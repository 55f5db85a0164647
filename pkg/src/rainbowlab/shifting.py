"""Shift compression and the structural diagnostics built on it.

The shift map S_{j,a,b} replaces value b by value a in coordinate j of
each member whose image is not already present; it preserves family sizes
and maps no-rainbow systems to no-rainbow systems.  Running the full
triangular schedule S_{j,1,2}, ..., S_{j,n-1,n} for every coordinate
leaves every family *compressed*: closed under lowering any single
coordinate value.

On systems that are both compressed and saturated (inclusion-maximal
among no-rainbow systems), two structural facts are expected and checked
empirically by ``check_low_degree``: every occupied (j, a) with a >= s is
replaceable by any value whatsoever, and every member outside the fully
contained hyperplanes has at least two coordinates below s.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    Family,
    FamilySystem,
    InvalidInputError,
    TupleK,
    TupleMultiset,
    Universe,
    hyperplane,
)
from .search import SearchBudget, find_rainbow, saturate


def _replace(t: TupleK, j: int, value: int) -> TupleK:
    return t[: j - 1] + (value,) + t[j:]


def shift_once(f: Family, j: int, a: int, b: int) -> Family:
    """Apply S_{j,a,b}: move b to a in coordinate j where the image is free."""
    u = f.universe
    if not 1 <= j <= u.k:
        raise InvalidInputError(f"coordinate {j} outside 1..{u.k}")
    for v in (a, b):
        if not 1 <= v <= u.n:
            raise InvalidInputError(f"value {v} outside 1..{u.n}")
    if a == b:
        raise InvalidInputError("shift needs two distinct values")
    out = []
    for t in f:
        if t[j - 1] == b:
            image = _replace(t, j, a)
            out.append(t if image in f else image)
        else:
            out.append(t)
    result = Family(u, out)
    assert len(result) == len(f), "shift must preserve family size"
    return result


def shift_system(system: FamilySystem, j: int, a: int, b: int) -> FamilySystem:
    return FamilySystem(
        system.universe,
        [shift_once(f, j, a, b) for f in system.families],
        system.thresholds,
    )


def shift_schedule(system: FamilySystem) -> FamilySystem:
    """Full compression: the triangular schedule for each coordinate in turn."""
    n = system.universe.n
    current = system
    for j in range(1, system.universe.k + 1):
        for a in range(1, n):
            for b in range(a + 1, n + 1):
                current = shift_system(current, j, a, b)
    return current


def is_compressed(f: Family, j: int) -> bool:
    """True iff lowering coordinate j of any member stays inside the family."""
    if not 1 <= j <= f.universe.k:
        raise InvalidInputError(f"coordinate {j} outside 1..{f.universe.k}")
    for t in f:
        for a in range(1, t[j - 1]):
            if _replace(t, j, a) not in f:
                return False
    return True


@dataclass(frozen=True)
class HyperplaneCore:
    """Decomposition of a family along its fully contained hyperplanes.

    t_set holds the (j, a) pairs whose whole hyperplane lies inside the
    family; covered is the union of those hyperplanes, leftover the rest
    of the family, and b_multiset the overcount satisfying
    covered ⊕ b_multiset = ⊕ hyperplanes, so that
    |covered| + |b_multiset| = n^(k-1) * |t_set| exactly.
    """

    t_set: frozenset[tuple[int, int]]
    covered: Family
    leftover: Family
    b_multiset: TupleMultiset


def hyperplane_core(f: Family, s: int) -> HyperplaneCore:
    u = f.universe
    planes = {}
    for j in range(1, u.k + 1):
        for a in range(1, u.n + 1):
            hp = hyperplane(u, j, a)
            if hp.issubset(f):
                planes[(j, a)] = hp
    depth: dict[TupleK, int] = {}
    for hp in planes.values():
        for t in hp:
            depth[t] = depth.get(t, 0) + 1
    covered = Family(u, depth.keys())
    leftover = f.difference(covered)
    b_entries = {t: d - 1 for t, d in depth.items() if d > 1}
    return HyperplaneCore(
        t_set=frozenset(planes),
        covered=covered,
        leftover=leftover,
        b_multiset=TupleMultiset(u, b_entries),
    )


@dataclass(frozen=True)
class LowDegreeReport:
    ok: bool
    replacement_violations: tuple[tuple[int, TupleK, int, int], ...]  # (family, member, j, b)
    leftover_violations: tuple[tuple[int, TupleK], ...]  # (family, member)
    replacements_checked: int
    leftover_checked: int


def _require_compressed(system: FamilySystem) -> None:
    for i, f in enumerate(system.families, start=1):
        for j in range(1, system.universe.k + 1):
            if not is_compressed(f, j):
                raise InvalidInputError(
                    f"family {i} is not compressed in coordinate {j}; "
                    "run shift_schedule first"
                )


def _require_saturated(system: FamilySystem, budget: SearchBudget | None) -> None:
    res = find_rainbow(system, budget)
    if res.status == "found":
        raise InvalidInputError("system admits a rainbow matching; not a counterexample")
    if res.status != "none":
        raise InvalidInputError(f"cannot certify saturation: {res.reason}")
    u = system.universe
    for i in range(system.s):
        fam = system.families[i]
        for idx in range(u.size):
            t = u.tuple_at(idx)
            if t in fam:
                continue
            grown = system.replace_family(i, fam.with_member(t))
            if find_rainbow(grown, budget).status == "none":
                raise InvalidInputError(
                    f"system is not saturated: tuple {t!r} can join family {i + 1}"
                )


def check_low_degree(
    system: FamilySystem, budget: SearchBudget | None = None
) -> LowDegreeReport:
    """Verify the replacement property of compressed saturated systems.

    Refuses (with a diagnostic) unless the system is certified compressed
    and saturated, because the property fails for arbitrary systems.  For
    every family member carrying a value a >= s in coordinate j, all n
    replacements of that value must stay in the family; and every
    leftover member of the hyperplane-core decomposition must have at
    least two coordinates in [s-1].
    """
    _require_compressed(system)
    _require_saturated(system, budget)
    u = system.universe
    s = system.s
    replacement_violations = []
    leftover_violations = []
    replacements = 0
    leftover_seen = 0
    for i, fam in enumerate(system.families, start=1):
        for t in fam:
            for j in range(1, u.k + 1):
                if t[j - 1] < s:
                    continue
                for b in range(1, u.n + 1):
                    replacements += 1
                    if _replace(t, j, b) not in fam:
                        replacement_violations.append((i, t, j, b))
        core = hyperplane_core(fam, s)
        for t in core.leftover:
            leftover_seen += 1
            if sum(1 for v in t if v <= s - 1) < 2:
                leftover_violations.append((i, t))
    return LowDegreeReport(
        ok=not replacement_violations and not leftover_violations,
        replacement_violations=tuple(replacement_violations),
        leftover_violations=tuple(leftover_violations),
        replacements_checked=replacements,
        leftover_checked=leftover_seen,
    )


def saturate_and_compress(
    system: FamilySystem, budget: SearchBudget | None = None
) -> FamilySystem:
    """Joint fixpoint of saturation and the full shift schedule.

    Saturating can break compression and vice versa, so alternate the two
    until neither changes the system.  Termination: saturation only adds
    members (bounded by s * n^k) and, at fixed sizes, each schedule pass
    strictly lowers the total of all coordinate values unless it is the
    identity.
    """
    current = saturate(system, budget)
    while True:
        compressed = shift_schedule(current)
        if compressed == current:
            return current
        current = saturate(compressed, budget)
