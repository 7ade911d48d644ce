"""Seeded construction of structured families and random baselines.

All randomness flows through SplitMix64, a counter-based generator with a
fixed published mixing function, so corpora are reproducible byte-for-byte
on any platform.  Generators are pure functions of (spec, seed).
"""

from __future__ import annotations

from dataclasses import dataclass

from .groups import (
    INT64_MAX,
    INT64_MIN,
    F2n,
    Fpn,
    Group,
    GroupError,
    OverflowElementError,
    Zint,
)
from .sets import FiniteSet, build_set

_M64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64: state advances by a fixed odd constant, output is a mix."""

    def __init__(self, seed: int):
        self._state = seed & _M64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _M64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n), by rejection (no modulo bias)."""
        if n <= 0:
            raise ValueError("below() needs n >= 1")
        limit = _M64 + 1 - ((_M64 + 1) % n)
        while True:
            v = self.next_u64()
            if v < limit:
                return v % n

    def sample_indices(self, population: int, k: int) -> list[int]:
        """k distinct indices from range(population), partial Fisher-Yates."""
        if k > population:
            raise ValueError(f"cannot sample {k} from {population}")
        swapped: dict[int, int] = {}
        out = []
        for i in range(k):
            j = i + self.below(population - i)
            vi = swapped.get(i, i)
            vj = swapped.get(j, j)
            out.append(vj)
            swapped[j] = vi
        return out


def gen_random(group: Group, size: int, seed: int) -> FiniteSet:
    """Uniform sample without replacement from a finite group."""
    if not group.is_finite:
        raise GroupError("gen_random needs a finite group")
    if not 1 <= size <= group.order:
        raise GroupError(f"size {size} out of range [1, {group.order}]")
    rng = SplitMix64(seed)
    idx = rng.sample_indices(group.order, size)
    return build_set(group, (group.unindex(i) for i in idx))


def gen_subspace(group: Group, dim: int) -> FiniteSet:
    """Span of the first dim coordinate vectors (sizes p^dim)."""
    if isinstance(group, F2n):
        if not 0 <= dim <= group.n:
            raise GroupError(f"dimension {dim} out of range [0, {group.n}]")
        return build_set(group, range(1 << dim))
    if isinstance(group, Fpn):
        if not 0 <= dim <= group.n:
            raise GroupError(f"dimension {dim} out of range [0, {group.n}]")
        p, n = group.p, group.n
        elems = (group.unindex(i) for i in range(p ** dim))
        # unindex fills from the last coordinate; shift into the leading ones.
        return build_set(group, (e[n - dim:] + (0,) * (n - dim) for e in elems))
    raise GroupError(f"gen_subspace supports F2n/Fpn groups, not {group}")


@dataclass(frozen=True)
class RPlusHSpec:
    """Coset-representative sample plus a coordinate subspace in F2n."""

    n: int
    dh: int
    r_count: int
    seed: int

    def __post_init__(self):
        if not 0 < self.dh < self.n:
            raise GroupError(f"need 0 < dh < n, got dh={self.dh}, n={self.n}")
        if not 1 <= self.r_count <= (1 << (self.n - self.dh)):
            raise GroupError(
                f"r_count {self.r_count} exceeds {1 << (self.n - self.dh)} cosets"
            )


def gen_r_plus_h(spec: RPlusHSpec) -> FiniteSet:
    """A = R + H: |R| distinct coset representatives plus the low-dh subspace.

    Representatives carry zero low coordinates, so |A| = |R| * 2^dh exactly.
    """
    group = F2n(spec.n)
    rng = SplitMix64(spec.seed)
    reps = rng.sample_indices(1 << (spec.n - spec.dh), spec.r_count)
    members = [
        (rep << spec.dh) | h for rep in reps for h in range(1 << spec.dh)
    ]
    return build_set(group, members)


@dataclass(frozen=True)
class GapSpec:
    """Generalized arithmetic progression {base + sum x_i * step_i}."""

    base: int
    steps: tuple
    lengths: tuple

    def __post_init__(self):
        if len(self.steps) != len(self.lengths) or not self.steps:
            raise GroupError("steps and lengths must be equal-length, nonempty")
        if any(l < 1 for l in self.lengths):
            raise GroupError("lengths must be positive")

    @property
    def rank(self) -> int:
        return len(self.steps)

    @property
    def volume(self) -> int:
        v = 1
        for l in self.lengths:
            v *= l
        return v


def gen_gap(spec: GapSpec) -> tuple[FiniteSet, bool]:
    """The progression as a set over the integers, plus a properness flag.

    Proper means no two coordinate vectors collide, i.e. size == volume.
    """
    group = Zint()
    lo = spec.base + sum(min(0, s * (l - 1)) for s, l in zip(spec.steps, spec.lengths))
    hi = spec.base + sum(max(0, s * (l - 1)) for s, l in zip(spec.steps, spec.lengths))
    if lo < INT64_MIN or hi > INT64_MAX:
        raise OverflowElementError(
            f"progression spans [{lo}, {hi}], outside the 64-bit range"
        )
    values = [spec.base]
    for step, length in zip(spec.steps, spec.lengths):
        values = [v + step * x for v in values for x in range(length)]
    fs = build_set(group, values)
    return fs, fs.size == spec.volume
