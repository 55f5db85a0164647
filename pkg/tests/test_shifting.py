import random

import pytest

from rainbowlab import (
    Family,
    FamilySystem,
    InvalidInputError,
    Universe,
    construct_stripe,
    find_rainbow,
    hyperplane,
)
from rainbowlab.shifting import (
    check_low_degree,
    hyperplane_core,
    is_compressed,
    saturate_and_compress,
    shift_once,
    shift_schedule,
    shift_system,
)

from util import random_norainbow_system, random_system


def _definition_oracle(fam: Family, j, a, b):
    """Member-by-member transcription of the two-case shift definition."""
    out = set()
    for t in fam:
        if t[j - 1] == b:
            image = t[: j - 1] + (a,) + t[j:]
            out.add(t if image in fam else image)
        else:
            out.add(t)
    return out


class TestShiftOnce:
    def test_target_absent_so_shift(self):
        u = Universe(3, 2)
        assert shift_once(Family(u, [(2, 3)]), 1, 1, 2).members == ((1, 3),)

    def test_target_present_so_keep(self):
        u = Universe(3, 2)
        f = Family(u, [(1, 3), (2, 3)])
        assert shift_once(f, 1, 1, 2) == f

    def test_rejects_equal_values(self):
        u = Universe(3, 2)
        with pytest.raises(InvalidInputError):
            shift_once(Family(u, [(1, 1)]), 1, 2, 2)

    def test_size_preserved_and_matches_oracle(self):
        rng = random.Random(13)
        for _ in range(1000):
            n, k = rng.randint(2, 4), rng.randint(1, 3)
            u = Universe(n, k)
            fam = Family.from_indices(
                u, rng.sample(range(u.size), rng.randint(0, min(u.size, 8)))
            )
            j = rng.randint(1, k)
            a, b = rng.sample(range(1, n + 1), 2)
            shifted = shift_once(fam, j, a, b)
            assert len(shifted) == len(fam)
            assert set(shifted.members) == _definition_oracle(fam, j, a, b)


class TestShiftSystem:
    def test_preserves_no_rainbow_fuzz(self):
        rng = random.Random(41)
        for _ in range(1000):
            n, k, s = rng.randint(2, 3), rng.randint(1, 3), rng.randint(2, 3)
            system = random_norainbow_system(rng, n, k, s)
            assert find_rainbow(system).status == "none"
            j = rng.randint(1, k)
            a, b = rng.sample(range(1, n + 1), 2)
            shifted = shift_system(system, j, a, b)
            assert find_rainbow(shifted).status == "none", (system, j, a, b)

    def test_identity_when_b_absent(self):
        u = Universe(3, 2)
        system = FamilySystem(u, [Family(u, [(1, 1), (2, 2)])])
        assert shift_system(system, 1, 1, 3) == system

    def test_deterministic(self):
        rng = random.Random(4)
        system = random_system(rng, 3, 2, 2, max_size=5)
        assert shift_system(system, 1, 1, 2) == shift_system(system, 1, 1, 2)


class TestShiftSchedule:
    def test_stripe_already_compressed(self):
        u = Universe(3, 2)
        stripe = construct_stripe(u, 3)
        system = FamilySystem(u, [stripe] * 2)
        assert shift_schedule(system) == system

    def test_single_tuple_trace(self):
        u = Universe(2, 2)
        system = FamilySystem(u, [Family(u, [(2, 2)])])
        assert shift_schedule(system).families[0].members == ((1, 1),)

    def test_output_compressed_and_idempotent_fuzz(self):
        rng = random.Random(3)
        for _ in range(300):
            n, k, s = rng.randint(2, 4), rng.randint(1, 3), rng.randint(1, 3)
            system = random_system(rng, n, k, s, max_size=6)
            out = shift_schedule(system)
            for fam in out.families:
                for j in range(1, k + 1):
                    assert is_compressed(fam, j)
            assert shift_schedule(out) == out

    def test_preserves_no_rainbow_fuzz(self):
        rng = random.Random(43)
        for _ in range(300):
            n, k, s = rng.randint(2, 3), rng.randint(1, 3), rng.randint(2, 3)
            system = random_norainbow_system(rng, n, k, s)
            assert find_rainbow(shift_schedule(system)).status == "none"


class TestIsCompressed:
    def test_spec_examples(self):
        u = Universe(2, 2)
        assert is_compressed(Family(u, [(1, 1), (1, 2)]), 1)
        assert not is_compressed(Family(u, [(2, 1)]), 1)


class TestHyperplaneCore:
    def test_single_hyperplane(self):
        u = Universe(3, 2)
        core = hyperplane_core(hyperplane(u, 1, 1), 2)
        assert core.t_set == frozenset({(1, 1)})
        assert len(core.leftover) == 0

    def test_full_universe(self):
        u = Universe(2, 2)
        core = hyperplane_core(Family(u, u.all_tuples()), 2)
        assert core.t_set == frozenset(
            {(j, a) for j in (1, 2) for a in (1, 2)}
        )
        assert len(core.leftover) == 0

    def test_stripe(self):
        u = Universe(3, 2)
        core = hyperplane_core(construct_stripe(u, 3), 3)
        assert core.t_set == frozenset({(1, 1), (1, 2)})
        assert len(core.leftover) == 0

    def test_counting_identity_fuzz(self):
        rng = random.Random(8)
        for _ in range(300):
            n, k = rng.randint(1, 3), rng.randint(1, 3)
            u = Universe(n, k)
            fam = Family.from_indices(
                u, rng.sample(range(u.size), rng.randint(0, u.size))
            )
            core = hyperplane_core(fam, 2)
            assert (
                len(core.covered) + core.b_multiset.total()
                == n ** (k - 1) * len(core.t_set)
            )
            assert core.covered.issubset(fam)
            assert len(core.covered) + len(core.leftover) == len(fam)


class TestCheckLowDegree:
    def test_refuses_unsaturated(self):
        u = Universe(2, 2)
        system = FamilySystem(u, [Family(u, [(1, 1)])] * 2)
        with pytest.raises(InvalidInputError):
            check_low_degree(system)

    def test_refuses_uncompressed(self):
        # saturated around a high-value obstruction but not compressed
        from rainbowlab import saturate

        u = Universe(2, 2)
        system = saturate(FamilySystem(u, [Family(u, [(2, 2)])] * 2))
        with pytest.raises(InvalidInputError):
            check_low_degree(system)

    def test_zero_violations_on_certified_systems(self):
        rng = random.Random(19)
        cases = 0
        for _ in range(40):
            n, k, s = rng.randint(2, 4), rng.randint(1, 2), rng.randint(2, 3)
            system = random_norainbow_system(rng, n, k, s)
            certified = saturate_and_compress(system)
            report = check_low_degree(certified)
            assert report.ok, (system, certified, report)
            cases += 1
        assert cases == 40
