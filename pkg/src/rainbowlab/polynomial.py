"""Exact algebra for the k=2 polynomial-method certificates.

Everything here is exact: big integers and rationals only, no floating
point.  The central objects are coefficients of products of pairwise
differences prod_{i<j}(x_i - x_j) (and its square), and the minimum total
degree of a nonzero polynomial vanishing on a finite planar point set.

For the single product, the coefficient of x_1^a_1 ... x_s^a_s is the
sign of the permutation i -> s - a_i when (a_i) is a permutation of
{0, ..., s-1}, and 0 otherwise.  For the square, coefficients are signed
convolutions over permutation pairs; full expansion is deliberately
avoided (it blows up factorially) and exists only as a test oracle.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import Family, InvalidInputError, Universe
from .search import SearchBudget
from .sequences import SequenceSpec, Verdict, is_satisfying


def perm_sign(perm: Sequence[int]) -> int:
    """Sign via inversion parity; the input must be a bijection."""
    inv = sum(
        1
        for i in range(len(perm))
        for j in range(i + 1, len(perm))
        if perm[i] > perm[j]
    )
    return -1 if inv & 1 else 1


def _is_range_perm(values: Sequence[int], s: int) -> bool:
    return sorted(values) == list(range(s))


def vandermonde_coeff(s: int, exponents: Sequence[int]) -> int:
    """Coefficient of x_1^e_1 ... x_s^e_s in prod_{i<j}(x_i - x_j)."""
    if len(exponents) != s:
        raise InvalidInputError(f"{len(exponents)} exponents for s={s}")
    if not _is_range_perm(exponents, s):
        return 0
    return perm_sign([s - e for e in exponents])


def squared_coeff(s: int, exponents: Sequence[int]) -> int:
    """Coefficient of x_1^e_1 ... x_s^e_s in prod_{i<j}(x_i - x_j)^2."""
    coeff, _ = squared_coeff_witness(s, exponents)
    return coeff


def squared_coeff_witness(
    s: int, exponents: Sequence[int]
) -> tuple[int, tuple[tuple[int, ...], tuple[int, ...]] | None]:
    """Coefficient plus one contributing permutation pair (a, b) with a+b=e.

    The sum runs over permutations a of {0..s-1} for which e - a is also a
    permutation, with contribution sign(a-term) * sign(b-term); a nonzero
    total certifies e = a + b for the recorded pair.
    """
    exponents = tuple(int(e) for e in exponents)
    if len(exponents) != s:
        raise InvalidInputError(f"{len(exponents)} exponents for s={s}")
    if sum(exponents) != s * (s - 1) or any(e < 0 or e > 2 * (s - 1) for e in exponents):
        return 0, None
    total = 0
    witness = None
    for a in itertools.permutations(range(s)):
        b = tuple(e - ai for e, ai in zip(exponents, a))
        if any(v < 0 or v >= s for v in b):
            continue
        if not _is_range_perm(b, s):
            continue
        term = perm_sign([s - v for v in a]) * perm_sign([s - v for v in b])
        total += term
        if witness is None:
            witness = (a, b)
    return total, (witness if total != 0 else witness)


_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(p: int) -> bool:
    """Deterministic Miller-Rabin, exact for all inputs below 3.3 * 10^24."""
    if p < 2:
        return False
    for small in _MR_WITNESSES:
        if p % small == 0:
            return p == small
    d, r = p - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(r - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


def coeff_mod_p(s: int, exponents: Sequence[int], p: int) -> int:
    """squared_coeff reduced into [0, p); rejects composite moduli."""
    if not is_prime(p):
        raise InvalidInputError(f"{p} is not prime")
    return squared_coeff(s, exponents) % p


@dataclass(frozen=True)
class PermutationPair:
    """Two permutations of {0, 1, ..., s-1}."""

    a: tuple[int, ...]
    b: tuple[int, ...]

    def __post_init__(self):
        s = len(self.a)
        if len(self.b) != s:
            raise InvalidInputError("permutations must have equal length")
        for p in (self.a, self.b):
            if not _is_range_perm(p, s):
                raise InvalidInputError(f"{p!r} is not a permutation of 0..{s - 1}")

    @property
    def s(self) -> int:
        return len(self.a)


def sequence_from_perms(n: int, pair: PermutationPair) -> SequenceSpec:
    """The k=2 threshold sequence f_i = n * (a_i + b_i).

    The certificate behind it: in the 2s-variable product
    prod(x_i - x_j) * prod(y_i - y_j), the monomial with x-exponents a and
    y-exponents b has coefficient sign(a-term) * sign(b-term), i.e. +-1,
    which is asserted here.
    """
    s = pair.s
    sign = vandermonde_coeff(s, pair.a) * vandermonde_coeff(s, pair.b)
    if sign not in (-1, 1):
        raise AssertionError("permutation-pair coefficient must be +-1")
    return SequenceSpec(
        universe=Universe(n, 2),
        s=s,
        f=tuple(n * (ai + bi) for ai, bi in zip(pair.a, pair.b)),
        provenance=f"product coefficient {sign:+d} at exponents a={pair.a} b={pair.b}",
    )


Point = tuple[Fraction, Fraction]


def _as_points(points: Iterable[Sequence]) -> list[Point]:
    out = {(Fraction(x), Fraction(y)) for x, y in points}
    return sorted(out)


def _monomials_upto(d: int) -> list[tuple[int, int]]:
    """Exponent pairs of total degree <= d in graded-lex order."""
    out = []
    for total in range(d + 1):
        for ex in range(total, -1, -1):
            out.append((ex, total - ex))
    return out


def _bareiss_rank(rows: list[list[int]]) -> int:
    """Fraction-free Gaussian elimination rank over exact integers."""
    if not rows:
        return 0
    m = [row[:] for row in rows]
    n_rows, n_cols = len(m), len(m[0])
    rank = 0
    prev = 1
    col = 0
    while rank < n_rows and col < n_cols:
        pivot_row = next((r for r in range(rank, n_rows) if m[r][col] != 0), None)
        if pivot_row is None:
            col += 1
            continue
        m[rank], m[pivot_row] = m[pivot_row], m[rank]
        pivot = m[rank][col]
        for r in range(rank + 1, n_rows):
            factor = m[r][col]
            for c in range(col, n_cols):
                m[r][c] = (m[r][c] * pivot - factor * m[rank][c]) // prev
        prev = pivot
        rank += 1
        col += 1
    return rank


def deg_set(points: Iterable[Sequence], n_hint: int | None = None) -> int:
    """Minimum total degree of a nonzero polynomial vanishing on the set.

    Scans d = 1, 2, ... and tests whether the evaluation matrix of all
    monomials of degree <= d on the points has a nontrivial kernel
    (rank < number of monomials), using exact fraction-free elimination
    after clearing denominators row by row.  The scan always terminates:
    once the monomial count exceeds the point count the kernel is
    nontrivial.  n_hint, when given, is just a sanity cap.
    """
    pts = _as_points(points)
    if not pts:
        raise InvalidInputError("deg_set is undefined for the empty point set")
    d = 0
    while True:
        d += 1
        if n_hint is not None and d > n_hint:
            raise InvalidInputError(
                f"degree scan exceeded the supplied cap {n_hint}; cap too small"
            )
        monos = _monomials_upto(d)
        rows = []
        for (x, y) in pts:
            row = [x**ex * y**ey for ex, ey in monos]
            denom = math.lcm(*(v.denominator for v in row))
            rows.append([int(v * denom) for v in row])
        if _bareiss_rank(rows) < len(monos):
            return d


@dataclass(frozen=True)
class SZReport:
    """The Schwartz-Zippel consequence |F| <= n * deg(F) for F in [n]^2."""

    family_size: int
    degree: int
    bound: int

    @property
    def ok(self) -> bool:
        return self.family_size <= self.bound


def sz_check(f: Family) -> SZReport:
    if f.universe.k != 2:
        raise InvalidInputError("sz_check is defined for k=2 families only")
    if len(f) == 0:
        raise InvalidInputError("sz_check needs a nonempty family")
    degree = deg_set(f.members)
    return SZReport(family_size=len(f), degree=degree, bound=f.universe.n * degree)


def verify_permutation_sequence(
    n: int,
    pair: PermutationPair,
    budget: SearchBudget | None = None,
    *,
    workers: int = 1,
) -> Verdict:
    """Exhaustively decide the sequence f_i = n(a_i + b_i) (expected: satisfying)."""
    return is_satisfying(sequence_from_perms(n, pair), budget, workers=workers)
