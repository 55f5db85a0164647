"""Satisfying-sequence decisions and closed-form threshold evaluation.

A threshold sequence (f_1, ..., f_s) is *satisfying* when every system
with |F_i| > f_i for all i admits a rainbow matching.  Deciding this at
desk scale rests on two reductions:

* Monotone reduction: adding tuples to a family can only create rainbow
  matchings, so a counterexample with |F_i| > f_i exists iff one with
  |F_i| = f_i + 1 exactly does (shrink each family of a counterexample to
  f_i + 1 members; conversely such a system already violates the
  thresholds).  The oracle therefore quantifies over exact sizes only.
* Symmetry pruning: relabeling coordinate values (k independent symmetric
  groups) preserves disjointness, so the first family may be restricted
  to the lexicographically minimal representative of its orbit.  The
  lexicographically least counterexample has a canonical first family,
  hence the first counterexample met in this enumeration order is the
  lexicographically least one overall, matching the unpruned semantics.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from . import kernels
from .core import Family, FamilySystem, InvalidInputError, Universe
from .search import BudgetTracker, SearchBudget, find_rainbow

MAX_SYMMETRY_UNIVERSE = 4096
MAX_SYMMETRY_GROUP = 100_000


@dataclass(frozen=True)
class SequenceSpec:
    """Thresholds f_1..f_s over a universe; f_i >= n^k makes slot i vacuous."""

    universe: Universe
    s: int
    f: tuple[int, ...]
    provenance: str | None = None

    def __post_init__(self):
        if self.s < 1:
            raise InvalidInputError("s must be at least 1")
        if len(self.f) != self.s:
            raise InvalidInputError(f"{len(self.f)} thresholds for s={self.s}")
        if any(v < 0 for v in self.f):
            raise InvalidInputError("thresholds must be nonnegative")


@dataclass(frozen=True)
class Work:
    systems: int
    nodes: int


@dataclass(frozen=True)
class Verdict:
    status: str  # "satisfying" | "not-satisfying" | "unknown"
    witness: FamilySystem | None
    work: Work

    def __post_init__(self):
        if (self.status == "not-satisfying") != (self.witness is not None):
            raise InvalidInputError("witness present iff status is not-satisfying")


@lru_cache(maxsize=32)
def _relabel_maps(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    """Index maps of all coordinate-value relabelings of [n]^k."""
    u = Universe(n, k)
    if u.size > MAX_SYMMETRY_UNIVERSE or math.factorial(n) ** k > MAX_SYMMETRY_GROUP:
        raise InvalidInputError(
            f"symmetry pruning infeasible for n={n}, k={k}; disable it"
        )
    tuples = list(u.all_tuples())
    perms = list(itertools.permutations(range(1, n + 1)))
    maps = []
    for combo in itertools.product(perms, repeat=k):
        maps.append(
            tuple(
                u.index_of(tuple(combo[j][t[j] - 1] for j in range(k)))
                for t in tuples
            )
        )
    return tuple(maps)


def canonical_indices(u: Universe, indices: Sequence[int]) -> tuple[int, ...]:
    """Lexicographically minimal image of a member-index set under relabeling."""
    maps = _relabel_maps(u.n, u.k)
    return min(tuple(sorted(m[i] for i in indices)) for m in maps)


def _first_family_candidates(
    u: Universe, size: int, symmetry: bool
) -> list[tuple[int, ...]]:
    combos = itertools.combinations(range(u.size), size)
    if not symmetry:
        return list(combos)
    return [c for c in combos if canonical_indices(u, c) == c]


@dataclass
class _ChunkOutcome:
    status: str  # "none" | "counterexample" | "exhausted"
    witness: tuple[tuple[int, ...], ...] | None
    systems: int
    nodes: int


def _scan_chunk(
    u: Universe,
    sizes: Sequence[int],
    first_chunk: Sequence[tuple[int, ...]],
    max_nodes: int,
    deadline: float,
) -> _ChunkOutcome:
    """Exhaust all systems whose first family is in the chunk, in lex order."""
    n, k, N = u.n, u.k, u.size
    order = sorted(range(len(sizes)), key=lambda i: (sizes[i], i))
    systems = 0
    nodes_used = 0
    rest_pools = [list(itertools.combinations(range(N), sz)) for sz in sizes[1:]]
    for first in first_chunk:
        for rest in itertools.product(*rest_pools):
            fams = (first, *rest)
            ordered = [fams[i] for i in order]
            status, _, nodes = kernels.search_indices(
                n, k, ordered, max_nodes=max_nodes - nodes_used, deadline=deadline
            )
            nodes_used += nodes
            systems += 1
            if status == kernels.NONE:
                return _ChunkOutcome("counterexample", fams, systems, nodes_used)
            if status in (kernels.BUDGET, kernels.TIMEOUT):
                return _ChunkOutcome("exhausted", None, systems, nodes_used)
    return _ChunkOutcome("none", None, systems, nodes_used)


def _decide(
    spec: SequenceSpec,
    tracker: BudgetTracker,
    workers: int,
    symmetry: bool,
) -> Verdict:
    u = spec.universe
    N = u.size
    if any(fi >= N for fi in spec.f):
        # No family can exceed n^k members, so no system violates the
        # thresholds and the sequence is vacuously satisfying.
        return Verdict("satisfying", None, Work(0, 0))
    sizes = [fi + 1 for fi in spec.f]
    firsts = _first_family_candidates(u, sizes[0], symmetry)

    chunks: list[list[tuple[int, ...]]]
    if workers <= 1 or len(firsts) <= 1:
        chunks = [firsts]
    else:
        w = min(workers, len(firsts))
        step = -(-len(firsts) // w)
        chunks = [firsts[i: i + step] for i in range(0, len(firsts), step)]

    per_chunk_nodes = max(tracker.remaining // max(len(chunks), 1), 1)
    outcomes: list[_ChunkOutcome]
    if len(chunks) == 1:
        outcomes = [_scan_chunk(u, sizes, chunks[0], tracker.remaining, tracker.deadline)]
    else:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            futures = [
                pool.submit(_scan_chunk, u, sizes, chunk, per_chunk_nodes, tracker.deadline)
                for chunk in chunks
            ]
            outcomes = [f.result() for f in futures]

    systems = sum(o.systems for o in outcomes)
    nodes = sum(o.nodes for o in outcomes)
    tracker.consume(nodes)
    # Chunks partition the enumeration in lexicographic order; scan them in
    # order so the reported witness is the lexicographically least one.
    for o in outcomes:
        if o.status == "exhausted":
            return Verdict("unknown", None, Work(systems, nodes))
        if o.status == "counterexample":
            witness = FamilySystem(
                u, [Family.from_indices(u, idx) for idx in o.witness]
            )
            return Verdict("not-satisfying", witness, Work(systems, nodes))
    return Verdict("satisfying", None, Work(systems, nodes))


def is_satisfying(
    spec: SequenceSpec,
    budget: SearchBudget | None = None,
    *,
    workers: int = 1,
    symmetry: bool = True,
) -> Verdict:
    """Decide a threshold sequence exhaustively over exact-size systems."""
    return _decide(spec, BudgetTracker(budget), workers, symmetry)


def falsify_random(
    spec: SequenceSpec, seed: int, iterations: int
) -> FamilySystem | None:
    """Random search for a counterexample system with sizes f_i + 1.

    Any returned system is re-validated by exhaustive search before being
    reported; None means no counterexample was found (inconclusive).
    """
    u = spec.universe
    N = u.size
    if any(fi >= N for fi in spec.f):
        return None
    sizes = [fi + 1 for fi in spec.f]
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    for _ in range(iterations):
        fams = [
            tuple(sorted(int(v) for v in rng.choice(N, size=sz, replace=False)))
            for sz in sizes
        ]
        order = sorted(range(len(sizes)), key=lambda i: (sizes[i], i))
        status, _, _ = kernels.search_indices(
            u.n, u.k, [fams[i] for i in order], max_nodes=kernels.DEFAULT_MAX_NODES
        )
        if status == kernels.NONE:
            system = FamilySystem(u, [Family.from_indices(u, f) for f in fams])
            check = find_rainbow(system)
            if check.status != "none":
                raise AssertionError("random counterexample failed re-validation")
            return system
    return None


@dataclass(frozen=True)
class MinimalCResult:
    c: int | None  # None when the budget ran out first
    witness_below: FamilySystem | None  # counterexample for c - 1, when c > 0
    scanned: tuple[tuple[int, str], ...]  # (c, verdict status) in scan order
    work: Work


def arithmetic_spec(u: Universe, s: int, c: int) -> SequenceSpec:
    """The arithmetic progression f_i = (i-1) * n^(k-1) + c."""
    step = u.n ** (u.k - 1)
    return SequenceSpec(u, s, tuple((i - 1) * step + c for i in range(1, s + 1)))


def minimal_c_search(
    u: Universe,
    s: int,
    budget: SearchBudget | None = None,
    *,
    workers: int = 1,
    symmetry: bool = True,
) -> MinimalCResult:
    """Scan c = 0, 1, 2, ... for the least satisfying arithmetic sequence.

    The scan is ascending (monotonicity of satisfying in c is a checked
    property, not an assumption used for binary search) and terminates at
    the latest when slot s becomes vacuous.
    """
    tracker = BudgetTracker(budget)
    scanned: list[tuple[int, str]] = []
    systems = nodes = 0
    witness_below: FamilySystem | None = None
    c = 0
    while True:
        verdict = _decide(arithmetic_spec(u, s, c), tracker, workers, symmetry)
        systems += verdict.work.systems
        nodes += verdict.work.nodes
        scanned.append((c, verdict.status))
        if verdict.status == "unknown":
            return MinimalCResult(None, witness_below, tuple(scanned), Work(systems, nodes))
        if verdict.status == "satisfying":
            return MinimalCResult(c, witness_below, tuple(scanned), Work(systems, nodes))
        witness_below = verdict.witness
        c += 1


def _comb0(m: int, k: int) -> int:
    return math.comb(m, k) if m >= k else 0


def t_bound(n: int, s: int, k: int) -> int:
    """max(C(sk-1, k), C(n, k) - C(n-s+1, k)) with exact integers."""
    return max(_comb0(s * k - 1, k), _comb0(n, k) - _comb0(n - s + 1, k))


@dataclass(frozen=True)
class BoundReport:
    """Closed-form thresholds for the arithmetic sequence (i-1)*n^(k-1) + c.

    Three bounds are evaluated: the prior quadratic bound
    4 s^2 n^(k-2) + 2^15 s^3 log2(sk)^3 n^(k-3), the shifting bound
    n^(k-1) + max(k^2 s n^(k-3/2) sqrt(8 log(2ks)), 8 k n^(k-1) log(2ks)),
    and the spread bound
    n^(k-1) + max(14 s n^(k-3/2) sqrt(log(2ks)), 8 k n^(k-1) log(2ks))
    + 2^15 s^3 log2(sk)^3 n^(k-3).
    "log" is natural throughout; base-2 logs are written log2.  Each bound
    carries a flag for whether its hypothesis on n holds.
    """

    n: int
    s: int
    k: int
    t_bound: int
    t_bound_applies: bool  # n >= k*s
    c_quadratic: float
    c_quadratic_applies: bool  # n > 2^5 * s * log2(sk)
    c_shifting: float
    c_shifting_applies: bool  # n > s
    c_shifting_branch: str  # which max() argument attained the value
    c_spread: float
    c_spread_applies: bool  # n > max(2^5 * s * log2(sk), s)
    c_spread_branch: str
    u: float  # s * sqrt(log(ks) / n)
    regime: str
    best_bound: str


def threshold_report(n: int, s: int, k: int) -> BoundReport:
    log2_sk = math.log2(s * k) if s * k > 1 else 0.0
    ln_2ks = math.log(2 * k * s)
    quadratic = 4 * s**2 * float(n) ** (k - 2) + 2**15 * s**3 * log2_sk**3 * float(n) ** (k - 3)

    shift_sqrt = k**2 * s * float(n) ** (k - 1.5) * math.sqrt(8 * ln_2ks)
    shift_log = 8 * k * float(n) ** (k - 1) * ln_2ks
    shifting = float(n) ** (k - 1) + max(shift_sqrt, shift_log)
    shifting_branch = "sqrt" if shift_sqrt >= shift_log else "log"

    spread_sqrt = 14 * s * float(n) ** (k - 1.5) * math.sqrt(ln_2ks)
    spread = (
        float(n) ** (k - 1)
        + max(spread_sqrt, shift_log)
        + 2**15 * s**3 * log2_sk**3 * float(n) ** (k - 3)
    )
    spread_branch = "sqrt" if spread_sqrt >= shift_log else "log"

    quadratic_ok = n > 2**5 * s * log2_sk
    shifting_ok = n > s

    if s >= n:
        regime, best = "s_at_least_n", "none"
    elif s * s < n:
        regime, best = "s_below_sqrt_n", "quadratic"
    elif s**4 < n**3:
        regime, best = "s_between_sqrt_n_and_n_3_4", "shifting_or_spread"
    else:
        regime, best = "s_above_n_3_4", "shifting"

    return BoundReport(
        n=n,
        s=s,
        k=k,
        t_bound=t_bound(n, s, k),
        t_bound_applies=n >= k * s,
        c_quadratic=quadratic,
        c_quadratic_applies=quadratic_ok,
        c_shifting=shifting,
        c_shifting_applies=shifting_ok,
        c_shifting_branch=shifting_branch,
        c_spread=spread,
        c_spread_applies=quadratic_ok and shifting_ok,
        c_spread_branch=spread_branch,
        u=s * math.sqrt(math.log(k * s) / n) if s * k > 1 else 0.0,
        regime=regime,
        best_bound=best,
    )
