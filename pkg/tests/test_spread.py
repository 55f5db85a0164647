import random
from dataclasses import replace

import pytest

from rainbowlab import Family, FamilySystem, Universe, construct_stripe, find_rainbow, hyperplane
from rainbowlab.core import InvalidInputError
from rainbowlab.spread import (
    EMPTY_PATTERN,
    Pattern,
    build_spread,
    cover,
    default_r,
    find_disjoint_patterns,
    postprocess,
    quotient,
    restrict,
    spread_pipeline,
    verify_spread,
)

from util import random_family


class TestPattern:
    def test_rejects_repeated_coordinate(self):
        with pytest.raises(InvalidInputError):
            Pattern([(1, 1), (1, 2)])

    def test_matching(self):
        p = Pattern([(2, 3)])
        assert p.matches((1, 3)) and not p.matches((3, 1))
        assert EMPTY_PATTERN.matches((1, 1))


class TestRestrictQuotientCover:
    def test_restrict_equals_hyperplane(self):
        u = Universe(2, 2)
        full = Family(u, u.all_tuples())
        assert restrict(full, Pattern([(1, 1)])) == hyperplane(u, 1, 1)

    def test_restrict_empty_pattern_is_identity(self):
        u = Universe(3, 2)
        fam = Family(u, [(1, 2), (3, 3)])
        assert restrict(fam, EMPTY_PATTERN) == fam

    def test_restrict_size_on_full_universe(self):
        for n, k in [(2, 2), (3, 2), (4, 3), (2, 3)]:
            u = Universe(n, k)
            full = Family(u, u.all_tuples())
            for size in range(k + 1):
                pattern = Pattern([(j + 1, 1) for j in range(size)])
                assert len(restrict(full, pattern)) == n ** (k - size)

    def test_quotient_of_hyperplane(self):
        u = Universe(3, 2)
        q = quotient(hyperplane(u, 1, 1), Pattern([(1, 1)]))
        assert q == frozenset(Pattern([(2, a)]) for a in (1, 2, 3))

    def test_quotient_empty_when_pattern_absent(self):
        u = Universe(3, 2)
        assert quotient(Family(u, [(1, 1)]), Pattern([(2, 3)])) == frozenset()

    def test_quotient_size_equals_restrict_size(self):
        rng = random.Random(6)
        for _ in range(300):
            n, k = rng.randint(2, 4), rng.randint(1, 3)
            fam = random_family(rng, n, k, rng.randint(0, min(n**k, 8)))
            size = rng.randint(0, k)
            coords = rng.sample(range(1, k + 1), size)
            pattern = Pattern([(j, rng.randint(1, n)) for j in coords])
            assert len(quotient(fam, pattern)) == len(restrict(fam, pattern))

    def test_cover_is_union_of_restrictions(self):
        u = Universe(2, 2)
        full = Family(u, u.all_tuples())
        pats = [Pattern([(1, 1)]), Pattern([(2, 2)])]
        covered = cover(full, pats)
        assert covered == restrict(full, pats[0]).union(restrict(full, pats[1]))
        assert cover(full, []) == Family(u)
        assert cover(full, [EMPTY_PATTERN]) == full


class TestBuildSpread:
    def test_full_universe_absorbed_by_empty_pattern(self):
        # no singleton qualifies when r < n, so the empty pattern is chosen
        # and the first iteration absorbs everything
        u = Universe(4, 2)
        res = build_spread(Family(u, u.all_tuples()), 2, r_override=2)
        assert res.s0 == (EMPTY_PATTERN,)
        assert res.s1 == () and res.s2 == ()
        assert len(res.leftover) == 0
        assert len(res.trace) == 1 and res.trace[0].selected == 16

    def test_hyperplane_becomes_singleton(self):
        u = Universe(9, 2)
        res = build_spread(hyperplane(u, 1, 1), 2, r_override=2)
        assert res.s1 == (Pattern([(1, 1)]),)
        assert res.s0 == () and res.s2 == ()
        assert len(res.leftover) == 0

    def test_empty_family(self):
        u = Universe(3, 2)
        res = build_spread(Family(u), 2, r_override=2)
        assert res.s0 == res.s1 == res.s2 == ()
        assert len(res.leftover) == 0 and res.trace == ()

    def test_rejects_r_at_most_1(self):
        u = Universe(3, 2)
        with pytest.raises(InvalidInputError):
            build_spread(Family(u, [(1, 1)]), 2, r_override=1.0)
        with pytest.raises(InvalidInputError):
            build_spread(Family(u, [(1, 1)]), 1)  # default r = 32*log2(2) trap: s*k=2 -> r=32
        # the second call actually has r = 32 > 1; it must NOT raise

    def test_default_r(self):
        assert default_r(2, 2) == 128.0

    def test_trace_sizes_strictly_decrease(self):
        rng = random.Random(12)
        for _ in range(100):
            fam = random_family(rng, rng.randint(2, 8), 2, rng.randint(0, 12))
            res = build_spread(fam, rng.randint(2, 4), r_override=rng.choice([2, 4, 8]))
            accepted = [t for t in res.trace if t.accepted]
            sizes = [t.family_size for t in accepted]
            assert sizes == sorted(sizes, reverse=True)
            assert all(t.selected >= 1 for t in accepted)
            assert len(set(sizes)) == len(sizes)


class TestPostprocess:
    def test_rule_e_promotes_heavy_value(self):
        u = Universe(9, 2)
        base = build_spread(Family(u), 2, r_override=2)
        fake = replace(
            base,
            s2=(
                Pattern([(1, 1), (2, 1)]),
                Pattern([(1, 1), (2, 2)]),
                Pattern([(1, 1), (2, 3)]),
            ),
        )
        out = postprocess(fake, 2)
        assert out.s1 == (Pattern([(1, 1)]),)
        assert out.s2 == ()

    def test_rule_d_collapses(self):
        u = Universe(9, 2)
        base = build_spread(Family(u), 2, r_override=2)
        fake = replace(
            base, s1=(Pattern([(1, 1)]), Pattern([(1, 2)]), Pattern([(1, 3)]))
        )
        out = postprocess(fake, 2)
        assert out.s0 == (EMPTY_PATTERN,)
        assert out.s1 == () and out.s2 == ()
        assert len(out.leftover) == 0

    def test_compliant_result_unchanged(self):
        u = Universe(9, 2)
        res = build_spread(hyperplane(u, 1, 1), 2, r_override=2)
        assert postprocess(res, 2) == res

    def test_caps_always_hold_after_postprocess(self):
        rng = random.Random(77)
        for _ in range(200):
            s = rng.randint(1, 4)
            fam = random_family(rng, rng.randint(2, 10), 2, rng.randint(0, 14))
            out = postprocess(build_spread(fam, s, r_override=rng.choice([2, 4, 8])), s)
            assert len(out.s1) <= 2 * (s - 1)
            assert len(out.s2) <= 4 * (s - 1) ** 2


class TestVerifySpread:
    def test_structural_checks_on_fuzz(self):
        rng = random.Random(101)
        for _ in range(120):
            s = rng.randint(2, 4)
            fam = random_family(rng, rng.randint(2, 12), 2, rng.randint(0, 16))
            res = postprocess(build_spread(fam, s, r_override=rng.choice([2, 4, 8])), s)
            rep = verify_spread(fam, res, s)
            assert rep.partition_ok and rep.cover_ok
            assert rep.singleton_cap_ok and rep.pair_cap_ok

    def test_leftover_bound_flag_depends_on_r(self):
        u = Universe(3, 2)
        fam = Family(u, u.all_tuples())
        res = build_spread(fam, 2, r_override=2)
        assert verify_spread(fam, res, 2).leftover_bound_applies  # n=3 > r=2
        res2 = build_spread(fam, 2, r_override=5)
        assert not verify_spread(fam, res2, 2).leftover_bound_applies

    def test_no_rainbow_pipeline_at_paper_r(self):
        # k=2, s=2, n=200 exceeds the default r=128, so the leftover bound
        # applies; patterns must also admit no disjoint selection
        u = Universe(200, 2)
        stripe = construct_stripe(u, 2)
        system = FamilySystem(u, [stripe, stripe])
        assert find_rainbow(system).status == "none"
        results = spread_pipeline(system)
        assert all(r.r_used == 128.0 for r in results)
        for fam, res in zip(system.families, results):
            rep = verify_spread(fam, res, 2, pipeline=results)
            assert rep.leftover_bound_applies
            assert rep.leftover_ok
            assert rep.no_pattern_matching
            assert rep.ok


class TestFindDisjointPatterns:
    def test_finds_selection(self):
        cols = [[Pattern([(1, 1)])], [Pattern([(1, 1)]), Pattern([(2, 2)])]]
        assert find_disjoint_patterns(cols) == [Pattern([(1, 1)]), Pattern([(2, 2)])]

    def test_reports_absence(self):
        cols = [[Pattern([(1, 1)])], [Pattern([(1, 1)])]]
        assert find_disjoint_patterns(cols) is None

    def test_empty_pattern_is_disjoint_with_everything(self):
        cols = [[EMPTY_PATTERN], [Pattern([(1, 1)])]]
        assert find_disjoint_patterns(cols) is not None
