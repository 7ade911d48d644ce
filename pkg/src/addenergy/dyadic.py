"""Dyadic level selection and the translate-invariance energy bound.

Two pigeonhole selectors are provided.  Both partition the positive values
of a finite map f into windows (2^-j-1 * max, 2^-j * max]:

* max_count_level:  f strictly positive; returns the window holding the most
  points.  With theta = min/max and k the number of windows needed to cover
  [theta*max, max], the winner holds at least |S|/k points, and
  k <= 1 - log2(theta).
* max_mass_level:  f nonnegative, not identically zero; returns the window of
  largest total mass among indices 0..kmax, kmax = floor(log2(2/theta)) with
  theta = mean/max.  The winner's mass is at least (theta/2)*max*|S|/(kmax+1),
  so its cardinality is at least 2^(k-1)*theta*|S|/(kmax+1).

All selection and guarantee checks run in exact integer/rational arithmetic;
floats appear only in reporting helpers, rounded outward so a float check can
never fail where the exact one passes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .groups import GroupError
from .sets import EnergyReport, FiniteSet, diff_table, energy_exact, translate_heavy_set


class LevelInputError(GroupError):
    """Selector preconditions violated (empty, nonpositive, all-zero)."""


def floor_log2(ratio: Fraction) -> int:
    """Largest j with 2^j <= ratio, for ratio >= 1.  Exact."""
    t = ratio.numerator // ratio.denominator
    if t < 1:
        raise ValueError(f"floor_log2 needs ratio >= 1, got {ratio}")
    return t.bit_length() - 1


def window_index(value, vmax) -> int:
    """The j with 2^-j-1 * vmax < value <= 2^-j * vmax, for 0 < value <= vmax."""
    if type(value) is int and type(vmax) is int:
        # floor(vmax / value) and floor(log2) commute here; see floor_log2.
        return (vmax // value).bit_length() - 1
    return floor_log2(Fraction(vmax) / Fraction(value))


@dataclass(frozen=True)
class DyadicLevel:
    """One selected dyadic window and its exact pigeonhole certificate."""

    kind: str              # 'count' or 'mass'
    index: int
    lower: Fraction        # exclusive
    upper: Fraction        # inclusive
    members: tuple
    mass: Fraction         # sum of f over members (an int-valued Fraction for int maps)
    theta: Fraction
    domain_size: int
    level_count: int       # pigeonhole divisor: windows covering the relevant mass

    @property
    def count(self) -> int:
        return len(self.members)

    def meets_guarantee(self) -> bool:
        """Exact form of the selector's cardinality guarantee."""
        if self.kind == "count":
            return self.count * self.level_count >= self.domain_size
        return (
            Fraction(self.count * self.level_count)
            >= Fraction(2, 1) ** (self.index - 1) * self.theta * self.domain_size
        )


def _as_items(values) -> list:
    if isinstance(values, Mapping):
        items = list(values.items())
    else:
        items = list(values)
    if not items:
        raise LevelInputError("selector input is empty")
    return items


def _build_level(kind, index, vmax, by_level, theta, size, level_count) -> DyadicLevel:
    members, mass = by_level.get(index, ((), 0))
    level = DyadicLevel(
        kind=kind,
        index=index,
        lower=Fraction(vmax) / (1 << (index + 1)),
        upper=Fraction(vmax) / (1 << index),
        members=tuple(sorted(members)),
        mass=Fraction(mass),
        theta=theta,
        domain_size=size,
        level_count=level_count,
    )
    if not level.meets_guarantee():
        raise RuntimeError(f"dyadic {kind} guarantee failed; selector bug: {level}")
    return level


def _group_by_window(items, vmax):
    by_level: dict = {}
    for key, val in items:
        j = window_index(val, vmax)
        entry = by_level.setdefault(j, ([], 0))
        entry[0].append(key)
        by_level[j] = (entry[0], entry[1] + val)
    return by_level


def max_count_level(values) -> DyadicLevel:
    """Window with the most points; all values must be strictly positive."""
    items = _as_items(values)
    for _, v in items:
        if v <= 0:
            raise LevelInputError(f"max_count_level needs positive values, got {v}")
    vmax = max(v for _, v in items)
    vmin = min(v for _, v in items)
    theta = Fraction(vmin) / Fraction(vmax)
    level_count = floor_log2(1 / theta) + 1
    by_level = _group_by_window(items, vmax)
    best = min(by_level, key=lambda j: (-len(by_level[j][0]), j))
    return _build_level("count", best, vmax, by_level, theta, len(items), level_count)


def max_mass_level(values) -> DyadicLevel:
    """Window of largest mass among admissible indices; zeros are allowed."""
    items = _as_items(values)
    total = 0
    for _, v in items:
        if v < 0:
            raise LevelInputError(f"max_mass_level needs nonnegative values, got {v}")
        total += v
    if total == 0:
        raise LevelInputError("max_mass_level input is identically zero")
    vmax = max(v for _, v in items)
    size = len(items)
    theta = Fraction(total) / (size * Fraction(vmax))
    kmax = floor_log2(2 / theta)
    by_level = _group_by_window(((k, v) for k, v in items if v > 0), vmax)
    # Window 0 holds the maximum and kmax >= 1, so this is never empty.
    admissible = [j for j in by_level if j <= kmax]
    best = min(admissible, key=lambda j: (-by_level[j][1], j))
    return _build_level("mass", best, vmax, by_level, theta, size, kmax + 1)


def admissible_mass(values) -> tuple[Fraction, Fraction]:
    """(mass within admissible windows, the (theta/2)*max*|S| floor it must meet)."""
    items = _as_items(values)
    total = sum(v for _, v in items)
    vmax = max(v for _, v in items)
    size = len(items)
    theta = Fraction(total) / (size * Fraction(vmax))
    kmax = floor_log2(2 / theta)
    by_level = _group_by_window(((k, v) for k, v in items if v > 0), vmax)
    mass = sum((Fraction(by_level[j][1]) for j in by_level if j <= kmax), Fraction(0))
    return mass, theta / 2 * vmax * size


def stated_count_bound(theta: Fraction, size: int) -> float:
    """|S| / (1 - log2 theta) rounded down (outward for >= comparisons)."""
    denom = 1.0 - math.log2(theta)
    raw = size / denom if denom > 0 else float(size)
    return math.nextafter(raw * (1.0 - 1e-12), -math.inf)


def stated_mass_bound(theta: Fraction, size: int, index: int) -> float:
    """2^(k-1) * theta / log2(4/theta) * |S|, rounded down."""
    raw = 2.0 ** (index - 1) * float(theta) / math.log2(4.0 / float(theta)) * size
    return math.nextafter(raw * (1.0 - 1e-12), -math.inf)


def exact_power_log2(fr: Fraction) -> int | None:
    """log2 of fr when fr is an exact power of two, else None."""
    num, den = fr.numerator, fr.denominator
    if num & (num - 1) == 0 and den & (den - 1) == 0:
        return num.bit_length() - den.bit_length()
    return None


def translate_overlap_sum(b1: FiniteSet, b2: FiniteSet) -> int:
    """Sum over ordered pairs (b, b') of B1 of |(b+B2) ∩ (b'+B2) ∩ B2|.  Exact.

    Each term is the number of x in B2 with both x-b and x-b' in B2, so each
    b contributes a subset of B2 and the terms are pairwise intersection
    sizes, computed here with integer bitmasks.
    """
    if b1.group != b2.group:
        raise GroupError("translate_overlap_sum needs sets over one group")
    sub = b2.group.sub
    b2_index = {x: i for i, x in enumerate(b2.sorted_elements)}
    masks = []
    for b in b1.sorted_elements:
        mask = 0
        for x, i in b2_index.items():
            if sub(x, b) in b2.elements:
                mask |= 1 << i
        masks.append(mask)
    return sum((m & m2).bit_count() for m in masks for m2 in masks)


@dataclass(frozen=True)
class InvarianceBoundReport:
    """Outcome of the invariance-to-energy bound on a concrete pair (B1, B2).

    When every element of B1 is a rho-heavy translate of B2, the energy of B1
    is at least rho^4 / (16 * log2(4/rho^2)^2) * |B1| / (|B2| * E(B2)).
    """

    rho: Fraction
    log_term: Fraction | float
    log_exact: bool
    bound: Fraction | float
    actual: Fraction
    hypothesis_ok: bool
    satisfied: bool

    def as_dict(self) -> dict:
        return {
            "rho": [self.rho.numerator, self.rho.denominator],
            "log_term": float(self.log_term),
            "log_exact": self.log_exact,
            "bound": float(self.bound),
            "actual": float(self.actual),
            "hypothesis_ok": self.hypothesis_ok,
            "satisfied": self.satisfied,
        }


def invariance_energy_bound(
    b1: FiniteSet,
    b2: FiniteSet,
    rho: Fraction,
    check_hypothesis: bool = True,
    b2_table=None,
) -> InvarianceBoundReport:
    """Verify the invariance hypothesis and the resulting energy lower bound.

    A violated hypothesis is reported, not raised: callers feed empirically
    constructed B1 and then the bound simply carries no guarantee.  Passing a
    precomputed difference table for B2 avoids recomputation.
    """
    rho = Fraction(rho)
    if not 0 < rho <= 1:
        raise GroupError(f"rho must lie in (0, 1], got {rho}")
    if b1.group != b2.group:
        raise GroupError("invariance bound needs sets over one group")

    if b2_table is None:
        b2_table = diff_table(b2)
    if check_hypothesis:
        heavy = translate_heavy_set(b2, rho, table=b2_table)
        hypothesis_ok = b1.elements <= heavy.elements
    else:
        hypothesis_ok = True

    e1 = energy_exact(b1).normalized
    e2 = EnergyReport(b2_table.quadruple_count(), b2.size).normalized
    ratio = 4 / rho ** 2
    exact_log = exact_power_log2(ratio)
    if exact_log is not None:
        log_term: Fraction | float = Fraction(exact_log)
        bound: Fraction | float = (
            rho ** 4 / (16 * log_term ** 2) * Fraction(b1.size) / (b2.size * e2)
        )
        satisfied = e1 >= bound
    else:
        log_term = math.nextafter(math.log2(float(ratio)), math.inf)
        bound = (
            float(rho) ** 4 / (16.0 * log_term ** 2) * b1.size / (b2.size * float(e2))
        )
        bound = math.nextafter(bound * (1.0 - 1e-12), -math.inf)
        satisfied = float(e1) >= bound
    if check_hypothesis and hypothesis_ok and not satisfied:
        raise RuntimeError(
            "invariance energy bound violated on a hypothesis-satisfying instance; "
            "this indicates an arithmetic bug"
        )
    return InvarianceBoundReport(
        rho=rho,
        log_term=log_term,
        log_exact=exact_log is not None,
        bound=bound,
        actual=e1,
        hypothesis_ok=hypothesis_ok,
        satisfied=satisfied,
    )
