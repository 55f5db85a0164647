import itertools
import math
import random

import pytest

from rainbowlab import (
    Family,
    FamilySystem,
    SearchBudget,
    SequenceSpec,
    Universe,
    arithmetic_spec,
    falsify_random,
    find_rainbow,
    is_satisfying,
    minimal_c_search,
    t_bound,
    threshold_report,
)
from rainbowlab.fileio import format_system


def _validate_counterexample(spec, system):
    assert system.universe == spec.universe
    for fam, f in zip(system.families, spec.f):
        assert len(fam) == f + 1
    assert find_rainbow(system).status == "none"


class TestIsSatisfying:
    def test_not_satisfying_with_spec_witness(self):
        u = Universe(2, 2)
        verdict = is_satisfying(SequenceSpec(u, 2, (0, 2)))
        assert verdict.status == "not-satisfying"
        _validate_counterexample(SequenceSpec(u, 2, (0, 2)), verdict.witness)
        assert verdict.witness.families[0].members == ((1, 1),)
        assert verdict.witness.families[1].members == ((1, 1), (1, 2), (2, 1))

    def test_satisfying(self):
        u = Universe(2, 2)
        assert is_satisfying(SequenceSpec(u, 2, (0, 3))).status == "satisfying"

    def test_k1_pair(self):
        u = Universe(2, 1)
        assert is_satisfying(SequenceSpec(u, 2, (0, 1))).status == "satisfying"

    def test_vacuous_when_threshold_reaches_universe(self):
        u = Universe(2, 2)
        verdict = is_satisfying(SequenceSpec(u, 2, (4, 4)))
        assert verdict.status == "satisfying" and verdict.work.systems == 0

    def test_budget_exhaustion_is_unknown(self):
        u = Universe(2, 2)
        verdict = is_satisfying(SequenceSpec(u, 2, (1, 1)), SearchBudget(max_nodes=1))
        assert verdict.status == "unknown"

    def test_symmetry_pruning_matches_unpruned(self):
        # verdicts and witnesses must agree with the unpruned enumeration
        u = Universe(2, 2)
        for f in itertools.product(range(4), repeat=2):
            spec = SequenceSpec(u, 2, f)
            pruned = is_satisfying(spec)
            plain = is_satisfying(spec, symmetry=False)
            assert pruned.status == plain.status, f
            if pruned.witness is not None:
                assert pruned.witness == plain.witness, f
            assert pruned.work.systems <= plain.work.systems
        u31 = Universe(3, 1)
        for f in itertools.product(range(3), repeat=2):
            spec = SequenceSpec(u31, 2, f)
            assert is_satisfying(spec).status == is_satisfying(spec, symmetry=False).status

    def test_monotone_reduction_soundness(self):
        # deciding over |F_i| = f_i + 1 exactly agrees with quantifying over
        # all systems with |F_i| > f_i, checked directly on a tiny case
        u = Universe(2, 2)
        subsets = {
            size: list(itertools.combinations(range(u.size), size))
            for size in range(u.size + 1)
        }
        for f in [(0, 2), (0, 3), (1, 1), (2, 2)]:
            spec = SequenceSpec(u, 2, f)
            verdict = is_satisfying(spec)
            all_ok = True
            for s1 in range(f[0] + 1, u.size + 1):
                for s2 in range(f[1] + 1, u.size + 1):
                    for c1 in subsets[s1]:
                        for c2 in subsets[s2]:
                            system = FamilySystem(
                                u,
                                [Family.from_indices(u, c1), Family.from_indices(u, c2)],
                            )
                            if find_rainbow(system).status == "none":
                                all_ok = False
            assert (verdict.status == "satisfying") == all_ok, f

    def test_workers_shard_deterministically(self):
        u = Universe(3, 2)
        spec = SequenceSpec(u, 2, (3, 3))
        v1 = is_satisfying(spec, workers=1)
        v3 = is_satisfying(spec, workers=3)
        assert v1.status == v3.status == "satisfying"
        assert v1.work == v3.work
        spec2 = SequenceSpec(u, 2, (0, 2))
        w1 = is_satisfying(spec2, workers=1)
        w3 = is_satisfying(spec2, workers=3)
        assert w1.status == w3.status == "not-satisfying"
        assert w1.witness == w3.witness


class TestFalsifyRandom:
    def test_finds_validating_counterexample(self):
        u = Universe(2, 2)
        spec = SequenceSpec(u, 2, (0, 2))
        system = falsify_random(spec, seed=1, iterations=500)
        assert system is not None
        _validate_counterexample(spec, system)

    def test_satisfying_spec_yields_none(self):
        u = Universe(2, 2)
        assert falsify_random(SequenceSpec(u, 2, (0, 3)), seed=1, iterations=300) is None

    def test_deterministic_under_seed(self):
        u = Universe(2, 2)
        spec = SequenceSpec(u, 2, (0, 2))
        a = falsify_random(spec, seed=7, iterations=500)
        b = falsify_random(spec, seed=7, iterations=500)
        assert format_system(a) == format_system(b)


class TestMinimalC:
    def test_n2k2s2(self):
        result = minimal_c_search(Universe(2, 2), 2)
        assert result.c == 1
        assert result.witness_below is not None
        _validate_counterexample(arithmetic_spec(Universe(2, 2), 2, 0), result.witness_below)

    def test_k1(self):
        assert minimal_c_search(Universe(2, 1), 2).c == 0

    def test_monotone_on_scanned_range(self):
        u = Universe(2, 2)
        result = minimal_c_search(u, 2)
        statuses = [status for _, status in result.scanned]
        # once satisfying, always satisfying afterwards (scan stops there, so
        # check the prefix shape: all not-satisfying then one satisfying)
        assert statuses == ["not-satisfying"] * (len(statuses) - 1) + ["satisfying"]
        # and explicitly: c* is satisfying while c* - 1 is not
        assert is_satisfying(arithmetic_spec(u, 2, result.c)).status == "satisfying"
        assert is_satisfying(arithmetic_spec(u, 2, result.c - 1)).status == "not-satisfying"
        assert is_satisfying(arithmetic_spec(u, 2, result.c + 1)).status == "satisfying"

    def test_budget_exhaustion_unknown(self):
        result = minimal_c_search(Universe(2, 2), 2, SearchBudget(max_nodes=1))
        assert result.c is None


class TestTBound:
    def test_spec_values(self):
        assert t_bound(5, 2, 2) == 4
        assert t_bound(4, 2, 2) == 3
        assert t_bound(10, 1, 3) == 0

    def test_exact_big_integers(self):
        # independent evaluation through factorial ratios
        from fractions import Fraction

        def comb_frac(m, k):
            if m < k:
                return 0
            out = Fraction(1)
            for i in range(k):
                out *= Fraction(m - i, i + 1)
            assert out.denominator == 1
            return int(out)

        for n, s, k in [(100, 10, 5), (64, 8, 4), (40, 3, 7)]:
            expected = max(
                comb_frac(s * k - 1, k), comb_frac(n, k) - comb_frac(n - s + 1, k)
            )
            assert t_bound(n, s, k) == expected

    def test_small_n_does_not_crash(self):
        assert t_bound(2, 5, 3) >= 0


class TestThresholdReport:
    @staticmethod
    def _independent(n, s, k):
        # separate transcription of the three closed forms
        ln = math.log
        lg2 = math.log2
        quad = 4 * s**2 * n ** (k - 2) + 32768 * s**3 * lg2(k * s) ** 3 * n ** (k - 3)
        shift = n ** (k - 1) + max(
            k * k * s * n ** (k - 1.5) * (8 * ln(2 * k * s)) ** 0.5,
            8 * k * n ** (k - 1) * ln(2 * k * s),
        )
        spread = (
            n ** (k - 1)
            + max(
                14 * s * n ** (k - 1.5) * ln(2 * k * s) ** 0.5,
                8 * k * n ** (k - 1) * ln(2 * k * s),
            )
            + 32768 * s**3 * lg2(k * s) ** 3 * n ** (k - 3)
        )
        u_val = s * (ln(k * s) / n) ** 0.5
        return quad, shift, spread, u_val

    def test_matches_independent_evaluation_to_10_digits(self):
        for n, s, k in [(10**6, 10, 3), (1000, 10, 3), (97, 5, 2), (50, 7, 4), (13, 2, 1)]:
            rep = threshold_report(n, s, k)
            quad, shift, spread, u_val = self._independent(n, s, k)
            assert rep.c_quadratic == pytest.approx(quad, rel=1e-10)
            assert rep.c_shifting == pytest.approx(shift, rel=1e-10)
            assert rep.c_spread == pytest.approx(spread, rel=1e-10)
            assert rep.u == pytest.approx(u_val, rel=1e-10)

    def test_hypothesis_flags(self):
        rep = threshold_report(10**6, 10, 3)
        assert rep.t_bound_applies and rep.c_quadratic_applies
        assert rep.c_shifting_applies and rep.c_spread_applies
        low = threshold_report(5, 10, 3)  # n <= s
        assert not low.c_shifting_applies and not low.c_spread_applies

    def test_branch_attribution(self):
        # tiny s with a dominating k log term: the second (log) branch wins
        rep = threshold_report(100, 1, 5)
        assert rep.c_shifting_branch == "log"
        # large s pushes the sqrt branch on top
        rep2 = threshold_report(100, 90, 2)
        assert rep2.c_shifting_branch == "sqrt"

    def test_regime_rows(self):
        assert threshold_report(10**6, 10, 3).regime == "s_below_sqrt_n"
        assert threshold_report(10**6, 10, 3).best_bound == "quadratic"
        rep = threshold_report(10**4, 500, 3)  # sqrt(n)=100 < 500 < 1000=n^{3/4}
        assert rep.regime == "s_between_sqrt_n_and_n_3_4"
        assert rep.best_bound == "shifting_or_spread"
        rep = threshold_report(10**4, 5000, 3)  # n^{3/4} = 1000 < 5000 < n
        assert rep.regime == "s_above_n_3_4"
        assert rep.best_bound == "shifting"
        assert threshold_report(10, 10, 2).regime == "s_at_least_n"

    def test_finite_positive(self):
        rep = threshold_report(10**6, 10, 3)
        for value in (rep.c_quadratic, rep.c_shifting, rep.c_spread, rep.u):
            assert value > 0 and math.isfinite(value)
