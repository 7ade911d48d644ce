"""Finite-set additive statistics: sumsets, difference tables, exact energy.

Everything here is exact.  Counts are integers, ratios are Fractions, and the
two energy routes (quadratic count-table vs dense transform) must agree to
the last digit -- the transform path certifies itself and the test suite
cross-checks both against a brute-force quadruple oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator

from . import transform
from .groups import Elem, Group, GroupError, GroupMismatchError, Zint


class EmptySetError(GroupError):
    """Analysis entry points require a nonempty set."""


class OracleCapError(GroupError):
    """Brute-force oracle asked to enumerate beyond its configured cap."""


@dataclass(frozen=True)
class FiniteSet:
    """A deduplicated, immutable collection of group elements."""

    group: Group
    elements: frozenset

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def size(self) -> int:
        return len(self.elements)

    def __contains__(self, a: Elem) -> bool:
        return a in self.elements

    def __iter__(self) -> Iterator[Elem]:
        return iter(self.sorted_elements)

    @cached_property
    def sorted_elements(self) -> tuple:
        key = self.group.sort_key
        return tuple(sorted(self.elements, key=key))


def build_set(group: Group, elems: Iterable[Elem]) -> FiniteSet:
    """Validate and deduplicate; insertion order never matters downstream."""
    members = frozenset(group.check(a) for a in elems)
    if not members:
        raise EmptySetError("refusing to build an empty set")
    return FiniteSet(group, members)


def _require_same_group(a: FiniteSet, b: FiniteSet) -> Group:
    if a.group != b.group:
        raise GroupMismatchError(f"group mismatch: {a.group} vs {b.group}")
    return a.group


def sum_set(a: FiniteSet, b: FiniteSet) -> FiniteSet:
    g = _require_same_group(a, b)
    add = g.add
    return FiniteSet(g, frozenset(add(x, y) for x in a.elements for y in b.elements))


def diff_set(a: FiniteSet, b: FiniteSet) -> FiniteSet:
    g = _require_same_group(a, b)
    sub = g.sub
    return FiniteSet(g, frozenset(sub(x, y) for x in a.elements for y in b.elements))


def translate(a: FiniteSet, t: Elem) -> FiniteSet:
    g = a.group
    g.check(t)
    add = g.add
    return FiniteSet(g, frozenset(add(x, t) for x in a.elements))


def translate_intersect(a: FiniteSet, t: Elem) -> FiniteSet:
    """The slice (A + t) `intersect` A; its size counts representations of t."""
    g = a.group
    g.check(t)
    add = g.add
    sliced = frozenset(x for x in (add(y, t) for y in a.elements) if x in a.elements)
    if not sliced:
        # t outside A - A: legal, but cannot be wrapped as a FiniteSet.
        return FiniteSet(g, frozenset())
    return FiniteSet(g, sliced)


@dataclass(frozen=True)
class DiffTable:
    """t -> r(t) = #{(a, b) in A^2 : a - b = t}, complete over A - A."""

    source: FiniteSet
    entries: dict

    def r(self, t: Elem) -> int:
        return self.entries.get(t, 0)

    @cached_property
    def support(self) -> FiniteSet:
        return FiniteSet(self.source.group, frozenset(self.entries))

    def quadruple_count(self) -> int:
        return sum(v * v for v in self.entries.values())


def diff_table(a: FiniteSet, method: str = "auto") -> DiffTable:
    """Exact difference-count table.

    method: 'pairs' (quadratic, always available), 'dense' (transform over
    the whole group, finite groups of order <= 2^24), or 'auto'.
    """
    if a.size == 0:
        raise EmptySetError("difference table of an empty set")
    if method == "auto":
        use_dense = (
            transform.dense_eligible(a.group)
            and a.size * a.size > a.group.order
        )
        method = "dense" if use_dense else "pairs"
    if method == "pairs":
        entries: dict = {}
        sub = a.group.sub
        elems = a.sorted_elements
        for x in elems:
            for y in elems:
                t = sub(x, y)
                entries[t] = entries.get(t, 0) + 1
        return DiffTable(a, entries)
    if method == "dense":
        counts = transform.autocorrelation(a.group, a.elements)
        unindex = a.group.unindex
        entries = {
            unindex(int(i)): int(counts[i]) for i in counts.nonzero()[0]
        }
        return DiffTable(a, entries)
    raise ValueError(f"unknown diff_table method {method!r}")


@dataclass(frozen=True)
class EnergyReport:
    """Exact additive energy: Q quadruples out of |A|^3 possible."""

    quadruple_count: int
    set_size: int

    @property
    def normalized(self) -> Fraction:
        return Fraction(self.quadruple_count, self.set_size ** 3)

    @property
    def value(self) -> float:
        return float(self.normalized)


def energy_exact(a: FiniteSet, method: str = "auto") -> EnergyReport:
    table = diff_table(a, method=method)
    return EnergyReport(table.quadruple_count(), a.size)


def energy_from_table(table: DiffTable) -> EnergyReport:
    return EnergyReport(table.quadruple_count(), table.source.size)


DEFAULT_ORACLE_CAP = 64


def energy_oracle(a: FiniteSet, cap: int = DEFAULT_ORACLE_CAP) -> EnergyReport:
    """Quadruple count by direct enumeration; the independent reference route.

    Iterates (a1, a2, a3) and tests membership of the forced fourth point,
    touching no difference table.
    """
    if a.size > cap:
        raise OracleCapError(f"oracle cap {cap} exceeded by set of size {a.size}")
    g = a.group
    add, sub = g.add, g.sub
    members = a.elements
    elems = a.sorted_elements
    count = 0
    for a1 in elems:
        for a2 in elems:
            d = sub(a1, a2)
            if isinstance(g, Zint):
                for a3 in elems:
                    # a4 = a3 - d may overflow int64 transiently; such a4
                    # cannot be a member, so plain arithmetic is safe here.
                    if a3 - d in members:
                        count += 1
            else:
                for a3 in elems:
                    if sub(a3, d) in members:
                        count += 1
    return EnergyReport(count, a.size)


def translate_heavy_set(b2: FiniteSet, rho: Fraction, table: DiffTable | None = None) -> FiniteSet:
    """All z whose translate of B2 keeps at least rho*|B2| of B2.

    |(z + B2) ∩ B2| equals r_B2(z), so the answer reads off the difference
    table; it always contains the identity.
    """
    rho = Fraction(rho)
    if not 0 < rho <= 1:
        raise GroupError(f"rho must lie in (0, 1], got {rho}")
    if table is None:
        table = diff_table(b2)
    need_num = rho.numerator * b2.size
    den = rho.denominator
    heavy = frozenset(t for t, r in table.entries.items() if r * den >= need_num)
    return FiniteSet(b2.group, heavy)


@dataclass(frozen=True)
class DoublingStats:
    """Exact sumset/difference-set sizes and their ratios to |A|."""

    set_size: int
    sum_size: int
    diff_size: int

    @property
    def k_sum(self) -> Fraction:
        return Fraction(self.sum_size, self.set_size)

    @property
    def k_diff(self) -> Fraction:
        return Fraction(self.diff_size, self.set_size)


def doubling_stats(a: FiniteSet) -> DoublingStats:
    if a.size == 0:
        raise EmptySetError("doubling stats of an empty set")
    return DoublingStats(a.size, sum_set(a, a).size, diff_set(a, a).size)


def is_coset(a: FiniteSet) -> bool:
    """True iff A is a coset of a subgroup (the translate test).

    A = c + H iff A - a0 equals A - A for any fixed a0 in A: the difference
    set is then closed under subtraction and contains the identity.
    """
    a0 = a.sorted_elements[0]
    shifted = translate(a, a.group.neg(a0))
    return shifted.elements == diff_set(a, a).elements
