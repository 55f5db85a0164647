"""Core data model: universes, tuples, families, multisets, systems.

Tuples over [n]^k are plain Python tuples of 1-indexed ints.  A tuple is
viewed interchangeably as a point of [n]^k and as the k-element subset
{(1, a_1), ..., (k, a_k)} of [k] x [n]; two tuples are disjoint exactly
when they differ in every coordinate, which is disjointness of those
subsets.  All types here are immutable after construction and safe to
share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

TupleK = tuple[int, ...]

MAX_UNIVERSE = 1 << 40  # keep enumeration indices comfortably in 64-bit range


class RainbowlabError(Exception):
    """Base class for all library errors."""


class InvalidInputError(RainbowlabError, ValueError):
    """Raised for out-of-range values, universe mismatches, bad preconditions."""


class BudgetExhaustedError(RainbowlabError):
    """Raised when an operation cannot finish within its search budget.

    ``partial`` carries whatever state the operation had built so far
    (for saturation: the partially grown system).
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class Universe:
    """The ambient space [n]^k."""

    n: int
    k: int

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise InvalidInputError(f"need n >= 1 and k >= 1, got n={self.n} k={self.k}")
        if self.n**self.k > MAX_UNIVERSE:
            raise InvalidInputError(
                f"universe size {self.n}^{self.k} exceeds the 2^40 enumeration cap"
            )

    @property
    def size(self) -> int:
        return self.n**self.k

    @property
    def strides(self) -> tuple[int, ...]:
        """Mixed-radix strides: index(t) = sum (t_j - 1) * strides[j]."""
        return tuple(self.n ** (self.k - 1 - j) for j in range(self.k))

    def check_tuple(self, t: TupleK) -> TupleK:
        if len(t) != self.k:
            raise InvalidInputError(f"tuple {t!r} has {len(t)} coordinates, expected {self.k}")
        for v in t:
            if not 1 <= v <= self.n:
                raise InvalidInputError(f"coordinate {v} of {t!r} outside 1..{self.n}")
        return tuple(t)

    def index_of(self, t: TupleK) -> int:
        """Rank a tuple lexicographically; (1,...,1) maps to 0."""
        idx = 0
        for v in t:
            idx = idx * self.n + (v - 1)
        return idx

    def tuple_at(self, idx: int) -> TupleK:
        if not 0 <= idx < self.size:
            raise InvalidInputError(f"index {idx} outside universe of size {self.size}")
        coords = []
        for _ in range(self.k):
            idx, r = divmod(idx, self.n)
            coords.append(r + 1)
        return tuple(reversed(coords))

    def all_tuples(self) -> Iterator[TupleK]:
        return (self.tuple_at(i) for i in range(self.size))


def disjoint(a: TupleK, b: TupleK) -> bool:
    """True iff the tuples differ in every coordinate."""
    if len(a) != len(b):
        raise InvalidInputError(f"tuples {a!r} and {b!r} have different arity")
    return all(x != y for x, y in zip(a, b))


@dataclass(frozen=True)
class Family:
    """A duplicate-free set of tuples in a universe."""

    universe: Universe
    members: tuple[TupleK, ...]
    _index_set: frozenset[int] = field(repr=False, compare=False, default=frozenset())

    def __init__(self, universe: Universe, members: Iterable[TupleK] = ()):
        checked = {universe.check_tuple(t) for t in members}
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "members", tuple(sorted(checked)))
        object.__setattr__(
            self, "_index_set", frozenset(universe.index_of(t) for t in checked)
        )

    @classmethod
    def from_indices(cls, universe: Universe, indices: Iterable[int]) -> "Family":
        return cls(universe, (universe.tuple_at(i) for i in indices))

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, t: TupleK) -> bool:
        return len(t) == self.universe.k and self.universe.index_of(t) in self._index_set

    def __iter__(self) -> Iterator[TupleK]:
        return iter(self.members)

    @property
    def indices(self) -> tuple[int, ...]:
        """Member ranks in ascending order (the lexicographic member order)."""
        return tuple(self.universe.index_of(t) for t in self.members)

    def with_member(self, t: TupleK) -> "Family":
        return Family(self.universe, self.members + (self.universe.check_tuple(t),))

    def union(self, other: "Family") -> "Family":
        _require_same_universe(self, other)
        return Family(self.universe, self.members + other.members)

    def difference(self, other: "Family") -> "Family":
        _require_same_universe(self, other)
        drop = other._index_set
        return Family(
            self.universe,
            (t for t in self.members if self.universe.index_of(t) not in drop),
        )

    def issubset(self, other: "Family") -> bool:
        _require_same_universe(self, other)
        return self._index_set <= other._index_set


@dataclass
class TupleMultiset:
    """Multiset of tuples; entries map each tuple to a multiplicity >= 1."""

    universe: Universe
    entries: dict[TupleK, int]

    def __init__(self, universe: Universe, entries: Mapping[TupleK, int] | Iterable[TupleK] = ()):
        if isinstance(entries, Mapping):
            items = entries.items()
        else:
            counted: dict[TupleK, int] = {}
            for t in entries:
                counted[tuple(t)] = counted.get(tuple(t), 0) + 1
            items = counted.items()
        normalized: dict[TupleK, int] = {}
        for t, mult in items:
            t = universe.check_tuple(t)
            if mult < 0 or mult != int(mult):
                raise InvalidInputError(f"multiplicity {mult!r} for {t!r} is not a nonnegative int")
            if mult:
                normalized[t] = normalized.get(t, 0) + int(mult)
        self.universe = universe
        self.entries = dict(sorted(normalized.items()))

    def total(self) -> int:
        return sum(self.entries.values())

    def multiplicity(self, t: TupleK) -> int:
        return self.entries.get(tuple(t), 0)

    def max_multiplicity(self) -> int:
        return max(self.entries.values(), default=0)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TupleMultiset)
            and self.universe == other.universe
            and self.entries == other.entries
        )


@dataclass(frozen=True)
class FamilySystem:
    """An ordered list of families over one universe, with optional thresholds."""

    universe: Universe
    families: tuple[Family, ...]
    thresholds: tuple[int, ...] | None = None

    def __init__(
        self,
        universe: Universe,
        families: Sequence[Family],
        thresholds: Sequence[int] | None = None,
    ):
        families = tuple(families)
        if not families:
            raise InvalidInputError("a system needs at least one family")
        for f in families:
            if f.universe != universe:
                raise InvalidInputError("all families must share the system universe")
        if thresholds is not None:
            thresholds = tuple(int(v) for v in thresholds)
            if len(thresholds) != len(families):
                raise InvalidInputError(
                    f"{len(thresholds)} thresholds for {len(families)} families"
                )
            if any(v < 0 for v in thresholds):
                raise InvalidInputError("thresholds must be nonnegative")
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "families", families)
        object.__setattr__(self, "thresholds", thresholds)

    @property
    def s(self) -> int:
        return len(self.families)

    def replace_family(self, i: int, fam: Family) -> "FamilySystem":
        if fam.universe != self.universe:
            raise InvalidInputError("replacement family has a different universe")
        families = list(self.families)
        families[i] = fam
        return FamilySystem(self.universe, families, self.thresholds)


def _require_same_universe(*objs) -> Universe:
    u = objs[0].universe
    for o in objs[1:]:
        if o.universe != u:
            raise InvalidInputError("universe mismatch")
    return u


def hyperplane(u: Universe, j: int, a: int) -> Family:
    """All tuples whose j-th coordinate (1-indexed) equals a; size n^(k-1)."""
    if not 1 <= j <= u.k:
        raise InvalidInputError(f"coordinate {j} outside 1..{u.k}")
    if not 1 <= a <= u.n:
        raise InvalidInputError(f"value {a} outside 1..{u.n}")
    members = []
    for rest in range(u.n ** (u.k - 1)):
        coords = []
        idx = rest
        for _ in range(u.k - 1):
            idx, r = divmod(idx, u.n)
            coords.append(r + 1)
        coords = list(reversed(coords))
        coords.insert(j - 1, a)
        members.append(tuple(coords))
    return Family(u, members)


def multiset_sum(x: Family | TupleMultiset, y: Family | TupleMultiset) -> TupleMultiset:
    """Pointwise sum of multiplicities; total size is |x| + |y|."""
    u = _require_same_universe(x, y)
    out: dict[TupleK, int] = {}
    for part in (x, y):
        if isinstance(part, TupleMultiset):
            for t, m in part.entries.items():
                out[t] = out.get(t, 0) + m
        else:
            for t in part:
                out[t] = out.get(t, 0) + 1
    return TupleMultiset(u, out)
