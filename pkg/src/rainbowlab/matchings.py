"""Uniform random perfect matchings and intersection concentration checks.

A perfect matching of the k-partite view of [n]^k is n pairwise disjoint
tuples covering every (coordinate, value) pair exactly once.  Fixing the
first coordinate to the identity, perfect matchings biject with (k-1)-lists
of permutations of [n]: member i is (i, p_1(i), ..., p_{k-1}(i)).  Sampling
the permutations independently and uniformly therefore samples a uniform
perfect matching out of (n!)^(k-1).

Randomness comes from numpy's Philox counter-based generator; per-worker
substreams are derived from (seed, worker index) so parallel runs are
reproducible for a fixed worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import (
    Family,
    InvalidInputError,
    TupleK,
    TupleMultiset,
    Universe,
    _require_same_universe,
)

CSV_HEADER = "lambda,deviation,upper_emp,upper_se,lower_emp,lower_se,bound,samples,seed"


@dataclass(frozen=True)
class PerfectMatching:
    universe: Universe
    perms: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        u = self.universe
        if len(self.perms) != u.k - 1:
            raise InvalidInputError(f"need {u.k - 1} permutations, got {len(self.perms)}")
        for p in self.perms:
            if sorted(p) != list(range(1, u.n + 1)):
                raise InvalidInputError(f"{p!r} is not a permutation of 1..{u.n}")

    def members(self) -> list[TupleK]:
        u = self.universe
        return [tuple([i] + [p[i - 1] for p in self.perms]) for i in range(1, u.n + 1)]

    def member_indices(self) -> list[int]:
        u = self.universe
        return [u.index_of(t) for t in self.members()]


def matching_count(n: int, k: int) -> int:
    """Number of perfect matchings, (n!)^(k-1), as an exact integer."""
    return math.factorial(n) ** (k - 1)


def rng_stream(seed: int, worker: int = 0) -> np.random.Generator:
    """Philox generator for (seed, worker); worker 0 is the main stream."""
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(worker,) if worker else ())
    return np.random.Generator(np.random.Philox(seq))


def sample_matching(u: Universe, rng: np.random.Generator) -> PerfectMatching:
    """One uniform perfect matching; deterministic given the generator state."""
    perms = tuple(
        tuple(int(v) + 1 for v in rng.permutation(u.n)) for _ in range(u.k - 1)
    )
    return PerfectMatching(u, perms)


def intersect_count(m: PerfectMatching, g: Family | TupleMultiset) -> int:
    """Size of the intersection with g, counted with g's multiplicities."""
    _require_same_universe(m, g)
    if isinstance(g, TupleMultiset):
        return sum(g.multiplicity(t) for t in m.members())
    return sum(1 for t in m.members() if t in g)


def concentration_bound(alpha: float, n: int, lam: float) -> float:
    """Two-sided tail bound 2*exp(-lam^2 / (alpha*n/2 + 2*lam)) for the
    deviation of |G ∩ M| from its mean alpha*n by at least 2*lam."""
    if lam <= 0:
        raise InvalidInputError("lambda must be positive")
    return 2.0 * math.exp(-(lam * lam) / (alpha * n / 2.0 + 2.0 * lam))


def deviation_bound(g_size: int, n: int, k: int, m: float) -> tuple[float, str]:
    """Deviation threshold with failure probability < 1/m for a set G.

    Returns (max(2*sqrt(g_size*log(2m)/n^(k-1)), 8*log(2m)), branch) where
    branch names which argument attained the max.  Logs are natural.
    """
    return deviation_bound_multiset(g_size, n, k, m, 1)


def deviation_bound_multiset(g_size: int, n: int, k: int, m: float, t: int) -> tuple[float, str]:
    """Deviation threshold for a multiset with max multiplicity t.

    max(2t*sqrt(g_size*log(2tm)/n^(k-1)), 8t*log(2tm)); t=1 reduces to the
    plain set form.
    """
    if m <= 0:
        raise InvalidInputError("m must be positive")
    if t < 1:
        raise InvalidInputError("t must be at least 1")
    log_term = math.log(2.0 * t * m)
    sqrt_branch = 2.0 * t * math.sqrt(g_size * log_term / n ** (k - 1))
    log_branch = 8.0 * t * log_term
    if sqrt_branch >= log_branch:
        return sqrt_branch, "sqrt"
    return log_branch, "log"


@dataclass(frozen=True)
class TailRow:
    lam: float
    deviation: float
    upper_emp: float
    upper_se: float
    lower_emp: float
    lower_se: float
    bound: float


@dataclass(frozen=True)
class TailReport:
    universe: Universe
    g_size: int
    alpha: float
    samples: int
    seed: int
    workers: int
    rows: tuple[TailRow, ...]

    def csv(self) -> str:
        lines = [CSV_HEADER]
        for r in self.rows:
            lines.append(
                f"{_fmt(r.lam)},{_fmt(r.deviation)},{_fmt(r.upper_emp)},{_fmt(r.upper_se)},"
                f"{_fmt(r.lower_emp)},{_fmt(r.lower_se)},{_fmt(r.bound)},{self.samples},{self.seed}"
            )
        return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _count_batch(u: Universe, rng: np.random.Generator, batch: int, g_sorted: np.ndarray) -> np.ndarray:
    """Intersection counts of `batch` sampled matchings with the set G."""
    n, k = u.n, u.k
    strides = u.strides
    idx = np.broadcast_to(np.arange(n, dtype=np.int64) * strides[0], (batch, n)).copy()
    base = np.broadcast_to(np.arange(n, dtype=np.int64), (batch, n))
    for j in range(1, k):
        perms = rng.permuted(base, axis=1)
        idx += perms * strides[j]
    if not len(g_sorted):
        return np.zeros(batch, dtype=np.int64)
    flat = idx.ravel()
    pos = np.minimum(np.searchsorted(g_sorted, flat), len(g_sorted) - 1)
    hit = g_sorted[pos] == flat
    return hit.reshape(batch, n).sum(axis=1)


def _worker_tallies(
    u: Universe,
    g_sorted: np.ndarray,
    samples: int,
    seed: int,
    worker: int,
    thresholds_up: Sequence[float],
    thresholds_dn: Sequence[float],
) -> tuple[np.ndarray, np.ndarray]:
    rng = rng_stream(seed, worker)
    up = np.zeros(len(thresholds_up), dtype=np.int64)
    dn = np.zeros(len(thresholds_dn), dtype=np.int64)
    done = 0
    while done < samples:
        batch = min(4096, samples - done)
        counts = _count_batch(u, rng, batch, g_sorted)
        for i, thr in enumerate(thresholds_up):
            up[i] += int(np.count_nonzero(counts >= thr))
        for i, thr in enumerate(thresholds_dn):
            dn[i] += int(np.count_nonzero(counts <= thr))
        done += batch
    return up, dn


def mc_tail(
    g: Family,
    samples: int,
    lambdas: Iterable[float],
    seed: int,
    workers: int = 1,
) -> TailReport:
    """Monte Carlo tail frequencies of |G ∩ M| against the proven bound.

    For each lambda, estimates P(count >= alpha*n + 2*lambda) and
    P(count <= alpha*n - 2*lambda) over `samples` uniform perfect matchings,
    with binomial standard errors.  Sample totals are split across
    `workers` Philox substreams; the aggregate is deterministic for fixed
    (seed, workers).
    """
    if samples < 1:
        raise InvalidInputError("samples must be >= 1")
    u = g.universe
    lambdas = [float(x) for x in lambdas]
    alpha = len(g) / u.size
    mean = alpha * u.n
    thresholds_up = [mean + 2 * lam for lam in lambdas]
    thresholds_dn = [mean - 2 * lam for lam in lambdas]
    g_sorted = np.array(sorted(g.indices), dtype=np.int64)

    per = [samples // workers] * workers
    for w in range(samples % workers):
        per[w] += 1
    up = np.zeros(len(lambdas), dtype=np.int64)
    dn = np.zeros(len(lambdas), dtype=np.int64)
    if workers == 1:
        up, dn = _worker_tallies(u, g_sorted, samples, seed, 0, thresholds_up, thresholds_dn)
    else:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(
                    _worker_tallies, u, g_sorted, per[w], seed, w,
                    thresholds_up, thresholds_dn,
                )
                for w in range(workers)
                if per[w]
            ]
            for fut in futures:
                w_up, w_dn = fut.result()
                up += w_up
                dn += w_dn

    rows = []
    for i, lam in enumerate(lambdas):
        ue = up[i] / samples
        le = dn[i] / samples
        rows.append(
            TailRow(
                lam=lam,
                deviation=2 * lam,
                upper_emp=ue,
                upper_se=math.sqrt(ue * (1 - ue) / samples),
                lower_emp=le,
                lower_se=math.sqrt(le * (1 - le) / samples),
                bound=concentration_bound(alpha, u.n, lam),
            )
        )
    return TailReport(
        universe=u,
        g_size=len(g),
        alpha=alpha,
        samples=samples,
        seed=seed,
        workers=workers,
        rows=tuple(rows),
    )
