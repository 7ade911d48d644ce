from fractions import Fraction

import pytest

from addenergy.dyadic import (
    LevelInputError,
    admissible_mass,
    exact_power_log2,
    floor_log2,
    invariance_energy_bound,
    max_count_level,
    max_mass_level,
    translate_overlap_sum,
    window_index,
)
from addenergy.generate import SplitMix64, gen_random, gen_subspace
from addenergy.groups import F2n, Zint
from addenergy.sets import build_set, energy_exact, translate_heavy_set


def test_window_index():
    assert window_index(8, 8) == 0
    assert window_index(5, 8) == 0
    assert window_index(4, 8) == 1  # boundary value falls in the lower window
    assert window_index(1, 8) == 3
    assert window_index(Fraction(1, 3), Fraction(1)) == 1
    assert window_index(Fraction(1, 4), Fraction(1)) == 2


def test_floor_log2():
    assert floor_log2(Fraction(1)) == 0
    assert floor_log2(Fraction(7, 2)) == 1
    assert floor_log2(Fraction(8)) == 3
    with pytest.raises(ValueError):
        floor_log2(Fraction(1, 2))


def test_count_level_constant():
    level = max_count_level({i: 5 for i in range(10)})
    assert level.index == 0
    assert level.count == 10
    assert level.theta == 1
    assert level.level_count == 1


def test_count_level_example_8851():
    level = max_count_level({"a": 8, "b": 8, "c": 5, "d": 1})
    assert level.index == 0
    assert set(level.members) == {"a", "b", "c"}
    assert level.level_count == 4  # theta = 1/8 needs four windows
    assert level.count * level.level_count >= 4


def test_count_level_tie_breaks_low():
    level = max_count_level({"a": 4, "b": 4, "c": 2, "d": 2})
    assert level.index == 0
    assert set(level.members) == {"a", "b"}
    assert level.count == 2
    assert level.count * level.level_count >= 4


def test_count_level_rejects_bad_input():
    with pytest.raises(LevelInputError):
        max_count_level({})
    with pytest.raises(LevelInputError):
        max_count_level({"a": 0})


def test_mass_level_constant():
    level = max_mass_level({i: 3 for i in range(7)})
    assert level.index == 0
    assert level.count == 7
    assert level.theta == 1


def test_mass_level_example_8110():
    level = max_mass_level({"a": 8, "b": 1, "c": 1, "d": 0})
    assert level.theta == Fraction(5, 16)
    assert floor_log2(2 / level.theta) == 2  # admissible indices 0..2
    assert level.index == 0
    assert level.mass == 8
    assert set(level.members) == {"a"}


def test_mass_level_example_4400():
    level = max_mass_level({"a": 4, "b": 4, "c": 0, "d": 0})
    assert level.theta == Fraction(1, 2)
    assert level.index == 0
    assert level.count == 2
    assert Fraction(level.count) >= Fraction(2) ** (level.index - 1) * level.theta * 4 / 3


def test_mass_level_rejects_all_zero():
    with pytest.raises(LevelInputError):
        max_mass_level({"a": 0, "b": 0})
    with pytest.raises(LevelInputError):
        max_mass_level({"a": -1, "b": 2})


def test_selector_guarantees_random():
    rng = SplitMix64(21)
    for trial in range(1000):
        size = 1 + rng.below(256)
        magnitude = 1 << (1 + rng.below(12))
        values = {i: 1 + rng.below(magnitude) for i in range(size)}
        level = max_count_level(values)
        assert level.count * level.level_count >= size
        assert all(level.lower < values[m] <= level.upper for m in level.members)

        mvalues = {i: rng.below(magnitude) for i in range(size)}
        if all(v == 0 for v in mvalues.values()):
            mvalues[0] = 1
        mlevel = max_mass_level(mvalues)
        assert mlevel.meets_guarantee()
        assert mlevel.index <= floor_log2(2 / mlevel.theta)
        mass, floor = admissible_mass(mvalues)
        assert mass >= floor


def test_exact_power_log2():
    assert exact_power_log2(Fraction(4)) == 2
    assert exact_power_log2(Fraction(1, 8)) == -3
    assert exact_power_log2(Fraction(64, 4)) == 4
    assert exact_power_log2(Fraction(3, 4)) is None


def test_invariance_subgroup_example():
    h = gen_subspace(F2n(8), 4)
    report = invariance_energy_bound(h, h, Fraction(1))
    assert report.hypothesis_ok
    assert report.log_exact and report.log_term == 2
    assert report.bound == Fraction(1, 64)
    assert report.actual == 1
    assert report.satisfied


def test_invariance_identity_always_heavy():
    b2 = gen_random(F2n(7), 23, 5)
    b1 = build_set(F2n(7), [0])
    report = invariance_energy_bound(b1, b2, Fraction(1))
    assert report.hypothesis_ok
    assert report.actual == 1
    assert report.satisfied


def test_invariance_hypothesis_violation_reported():
    b2 = build_set(Zint(), [0, 1, 3])
    b1 = build_set(Zint(), [1])  # r(1)=1 < (2/3)*3, so not rho-heavy
    report = invariance_energy_bound(b1, b2, Fraction(2, 3))
    assert not report.hypothesis_ok


def test_invariance_random_instances():
    rng = SplitMix64(33)
    group = F2n(10)
    for trial in range(60):
        b2 = gen_random(group, 20 + rng.below(41), rng.next_u64())
        rho = (Fraction(1, 8), Fraction(1, 4), Fraction(1, 2), Fraction(1))[rng.below(4)]
        heavy = translate_heavy_set(b2, rho)
        members = heavy.sorted_elements
        pick = 1 + rng.below(heavy.size)
        b1 = build_set(group, (members[i] for i in rng.sample_indices(heavy.size, pick)))
        report = invariance_energy_bound(b1, b2, rho)
        assert report.hypothesis_ok and report.satisfied
        # the lemma inequality, recomputed exactly
        lhs = energy_exact(b1).normalized * energy_exact(b2).normalized * b2.size
        log_term = 2 + 2 * floor_log2(1 / rho)
        assert lhs >= rho ** 4 * b1.size / Fraction(16 * log_term ** 2)


def test_overlap_sum_cs2():
    rng = SplitMix64(44)
    group = F2n(9)
    for trial in range(40):
        b2 = gen_random(group, 15 + rng.below(30), rng.next_u64())
        rho = (Fraction(1, 4), Fraction(1, 2), Fraction(1))[rng.below(3)]
        heavy = translate_heavy_set(b2, rho)
        members = heavy.sorted_elements
        pick = 1 + rng.below(heavy.size)
        b1 = build_set(group, (members[i] for i in rng.sample_indices(heavy.size, pick)))
        overlap = translate_overlap_sum(b1, b2)
        assert Fraction(overlap) >= rho ** 2 * b1.size ** 2 * b2.size


def test_overlap_sum_brute_force():
    z = Zint()
    b1 = build_set(z, [0, 1])
    b2 = build_set(z, [0, 1, 3])
    total = 0
    for b in b1.elements:
        for bp in b1.elements:
            shifted_b = {x + b for x in b2.elements}
            shifted_bp = {x + bp for x in b2.elements}
            total += len(shifted_b & shifted_bp & b2.elements)
    assert translate_overlap_sum(b1, b2) == total
