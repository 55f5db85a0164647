"""Shared corpus generators for the test suite.

No-rainbow systems are built from a guaranteed obstruction: all families
are subsets of the tuples whose j-th coordinate lies in a fixed set of
s-1 values, so any s picks collide in coordinate j.  Randomizing j, the
value set, and the subsets (and allowing different subsets per family)
gives a varied corpus that is still provably rainbow-free.
"""

from __future__ import annotations

import itertools
import random

from rainbowlab import Family, FamilySystem, Universe


def random_norainbow_system(rng: random.Random, n: int, k: int, s: int) -> FamilySystem:
    u = Universe(n, k)
    j = rng.randint(1, k)
    values = rng.sample(range(1, n + 1), min(s - 1, n))
    pool = [t for t in u.all_tuples() if t[j - 1] in values]
    families = []
    for _ in range(s):
        size = rng.randint(0, len(pool)) if pool else 0
        families.append(Family(u, rng.sample(pool, size)))
    return FamilySystem(u, families)


def random_system(rng: random.Random, n: int, k: int, s: int, max_size: int | None = None) -> FamilySystem:
    u = Universe(n, k)
    cap = min(max_size or u.size, u.size)
    families = [
        Family.from_indices(u, rng.sample(range(u.size), rng.randint(0, cap)))
        for _ in range(s)
    ]
    return FamilySystem(u, families)


def random_family(rng: random.Random, n: int, k: int, size: int) -> Family:
    u = Universe(n, k)
    return Family.from_indices(u, rng.sample(range(u.size), size))


def tiny_norainbow_systems(max_family_size: int = 2) -> list[FamilySystem]:
    """All no-rainbow systems over [2]^2 with two families of bounded size."""
    from rainbowlab import find_rainbow

    u = Universe(2, 2)
    subsets = [
        combo
        for size in range(max_family_size + 1)
        for combo in itertools.combinations(range(u.size), size)
    ]
    out = []
    for c1 in subsets:
        for c2 in subsets:
            system = FamilySystem(
                u, [Family.from_indices(u, c1), Family.from_indices(u, c2)]
            )
            if find_rainbow(system).status == "none":
                out.append(system)
    return out


def brute_force_rainbow(system: FamilySystem) -> tuple | None:
    """Naive nested-loop oracle, independent of the kernel implementation."""
    from rainbowlab import disjoint

    def rec(i, picks):
        if i == system.s:
            return tuple(picks)
        for t in system.families[i]:
            if all(disjoint(t, q) for q in picks):
                picks.append(t)
                found = rec(i + 1, picks)
                if found is not None:
                    return found
                picks.pop()
        return None

    return rec(0, [])
