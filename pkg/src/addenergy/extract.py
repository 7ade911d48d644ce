"""Candidate extraction: from a set with doubling K to high-energy subsets of A - A.

The pipeline evaluates candidates in a fixed order: the difference set (its
certificate doubles as the relaxed standing-threshold check), the base set
(translated into A - A), then the slice refinement followed by both branch
cascades, run unconditionally: the covering-count branch (large spread
exponent) and the slice-pair branch (small spread exponent).  Every candidate
is certified with its exact energy.

The chosen certificate maximizes energy among candidates that meet the size
floor and have at least two elements, with ties broken toward larger size
and then earlier emission.  Singletons stay in the report but are never
chosen: their energy is identically 1 (a single quadruple class), so they
witness nothing.

Hard guarantees (slice thresholds, dyadic windows, subset containment,
energy-threshold comparisons) are exact integer/rational arithmetic; the
asymptotic exponents alpha/beta/gamma/eta are measured floats recorded for
reporting only.  F2n inputs of order up to 2^24 run on a numpy fast path
whose reports are byte-identical to the portable object path.
"""

from __future__ import annotations

import hashlib
import math
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .dyadic import (
    DyadicLevel,
    floor_log2,
    invariance_energy_bound,
    max_count_level,
    max_mass_level,
)
from .generate import SplitMix64
from .groups import Elem, F2n, Group, GroupError
from .sets import (
    DiffTable,
    EmptySetError,
    FiniteSet,
    diff_table,
    energy_from_table,
    translate,
    translate_intersect,
)

DEFAULT_EPS = Fraction(1, 37)
DEGENERATE_SLACK = Fraction(1, 1 << 20)
_VEC_MAX_ORDER = 1 << 24
_VEC_CHUNK = 1 << 25


class PipelineError(GroupError):
    """Unrecoverable pipeline failure (no certificate could be produced)."""


@dataclass(frozen=True)
class PipelineConfig:
    """Caps and reporting knobs; fully echoed into every report."""

    c_max: int = 8
    slice_cap: int = 4096
    pair_cap: int = 10 ** 6
    seed: int = 0
    vectorized: bool | None = None  # None: auto (F2n of order <= 2^24)
    report_elements_cap: int = 4096

    def as_dict(self) -> dict:
        return {
            "c_max": self.c_max,
            "slice_cap": self.slice_cap,
            "pair_cap": self.pair_cap,
            "seed": self.seed,
            "vectorized": self.vectorized,
            "report_elements_cap": self.report_elements_cap,
        }


def _flog(x) -> float:
    """Natural log of an int or Fraction, safe for huge numerators."""
    fr = Fraction(x)
    return math.log(fr.numerator) - math.log(fr.denominator)


def _geomean_log(values) -> float:
    """Mean log of a multiset, summed over sorted distinct values.

    The canonical order makes the float result independent of how callers
    enumerate the multiset, which keeps fast and portable paths bit-equal.
    """
    counts = Counter(values)
    total = 0
    acc = 0.0
    for value in sorted(counts):
        mult = counts[value]
        acc += mult * _flog(value)
        total += mult
    return acc / total


def _clamp(x: float, lo: float, hi: float) -> float:
    return min(hi, max(lo, x))


@dataclass(frozen=True)
class SliceStats:
    """One slice's exact size and spread, with its measured spread exponent."""

    t: Elem
    slice_size: int
    spread: int
    base_size: int
    k: Fraction

    @property
    def beta(self) -> float:
        """log_K(spread / |A|), clamped to [0, 1]; exact inputs retained."""
        if self.k == 1:
            return 0.0
        raw = (math.log(self.spread) - math.log(self.base_size)) / _flog(self.k)
        return _clamp(raw, 0.0, 1.0)

    def as_dict(self, group: Group) -> dict:
        return {
            "t": group.format(self.t),
            "size": self.slice_size,
            "spread": self.spread,
            "beta": self.beta,
        }


@dataclass(frozen=True)
class RefinementResult:
    """Heavy slices binned by spread: the set T and its common exponent."""

    k: Fraction
    base_size: int
    diff_size: int
    heavy_count: int
    sampled: tuple
    truncated: bool
    stats: dict
    level: DyadicLevel
    selected: tuple
    beta: float
    coverage: Fraction
    coverage_target: float
    threshold_ok: bool

    def as_dict(self, group: Group) -> dict:
        return {
            "heavy_count": self.heavy_count,
            "sampled": len(self.sampled),
            "truncated": self.truncated,
            "selected": [group.format(t) for t in self.selected],
            "beta": self.beta,
            "coverage": float(self.coverage),
            "coverage_target": self.coverage_target,
            "threshold_ok": self.threshold_ok,
            "spread_window": [float(self.level.lower), float(self.level.upper)],
        }


@dataclass(frozen=True)
class CandidateCertificate:
    """An explicit subset of A - A with exact size, energy, and exponents."""

    label: str
    candidate: FiniteSet
    size: int
    quadruples: int
    energy: Fraction
    e_size: float
    e_energy: float
    meets_theorem: bool
    meets_size_floor: bool

    def as_dict(self, elements_cap: int) -> dict:
        group = self.candidate.group
        lines = [group.format(a) for a in self.candidate.sorted_elements]
        digest = hashlib.sha256("\n".join(lines).encode()).hexdigest()
        out = {
            "label": self.label,
            "size": self.size,
            "energy": {
                "q": self.quadruples,
                "cube": self.size ** 3,
                "value": float(self.energy),
            },
            "e_size": self.e_size,
            "e_energy": self.e_energy,
            "meets_theorem": self.meets_theorem,
            "meets_size_floor": self.meets_size_floor,
            "sha256": digest,
        }
        if self.size <= elements_cap:
            out["elements"] = lines
        return out


def meets_energy_threshold(energy: Fraction, k: Fraction, eps: Fraction, relax: int = 1) -> bool:
    """Exact test of E >= K^-(1 - relax*eps), done in integer arithmetic."""
    p, q = eps.numerator, eps.denominator
    return energy ** q * k ** (q - relax * p) >= 1


def evaluate_candidate(
    label: str,
    candidate: FiniteSet,
    base_size: int,
    k: Fraction,
    eps: Fraction,
    parent_diff: FiniteSet | None = None,
    c_max: int = 8,
    table: DiffTable | None = None,
) -> CandidateCertificate:
    """Certify a candidate: exact energy, measured exponents, threshold flags."""
    if candidate.size == 0:
        raise EmptySetError(f"candidate {label} is empty")
    if parent_diff is not None and not candidate.elements <= parent_diff.elements:
        raise RuntimeError(f"pipeline bug: candidate {label} escapes the difference set")
    report = energy_from_table(table) if table is not None else energy_from_table(diff_table(candidate))
    energy = report.normalized
    if k == 1:
        e_size = 0.0
        e_energy = 0.0
    else:
        log_k = _flog(k)
        e_size = (math.log(base_size) - math.log(candidate.size)) / log_k
        e_energy = -_flog(energy) / log_k
    return CandidateCertificate(
        label=label,
        candidate=candidate,
        size=candidate.size,
        quadruples=report.quadruple_count,
        energy=energy,
        e_size=e_size,
        e_energy=e_energy,
        meets_theorem=meets_energy_threshold(energy, k, eps),
        meets_size_floor=Fraction(candidate.size) * k ** c_max >= base_size,
    )


class _F2Vectors:
    """numpy-backed slice statistics for F2n groups of moderate order.

    Results are bit-identical to the object path; this only changes speed.
    """

    def __init__(self, a: FiniteSet, dt: DiffTable):
        import numpy as np

        self._np = np
        self.order = a.group.order
        self.a_idx = np.fromiter(a.sorted_elements, dtype=np.int64, count=a.size)
        self._mask = np.zeros(self.order, dtype=bool)
        self._r_dense = np.zeros(self.order, dtype=np.int64)
        for t, r in dt.entries.items():
            self._r_dense[t] = r

    def _fill_mask(self, slice_idx) -> None:
        np = self._np
        self._mask[:] = False
        rows = max(1, _VEC_CHUNK // max(1, len(self.a_idx)))
        for start in range(0, len(slice_idx), rows):
            block = slice_idx[start : start + rows]
            self._mask[(block[:, None] ^ self.a_idx[None, :]).ravel()] = True

    def _slice_idx(self, sliced: FiniteSet):
        return self._np.fromiter(sliced.sorted_elements, dtype=self._np.int64, count=sliced.size)

    def spread(self, sliced: FiniteSet) -> int:
        """|A[t] - A| via a dense membership mask."""
        self._fill_mask(self._slice_idx(sliced))
        return int(self._np.count_nonzero(self._mask))

    def accumulate_cover(self, sliced: FiniteSet, counts) -> None:
        """counts[x] += 1 for every x in A[t] - A."""
        self._fill_mask(self._slice_idx(sliced))
        counts += self._mask

    def new_counts(self):
        return self._np.zeros(self.order, dtype=self._np.int32)

    # Dyadic window machinery on integer arrays.  floor(log2(vmax // v)) is
    # computed with frexp, which is exact for integers below 2^53; the guards
    # keep every sum inside exact int64 range so selections match the
    # object-path selectors bit for bit.

    def _window_indices(self, values):
        np = self._np
        vmax = int(values.max())
        if vmax >= 1 << 53:
            raise GroupError("values too large for the vectorized window path")
        _, exponents = np.frexp((vmax // values).astype(np.float64))
        return (exponents - 1).astype(np.int64)

    def mass_window(self, values):
        """Twin of max_mass_level on a positive int array: (index, member mask)."""
        np = self._np
        vmax = int(values.max())
        if values.size * vmax >= 1 << 62:
            raise GroupError("pair mass too large for the vectorized path; disable vectorization")
        total = int(values.sum(dtype=np.int64))
        theta = Fraction(total, values.size * vmax)
        kmax = floor_log2(2 / theta)
        windows = self._window_indices(values)
        masses = np.zeros(int(windows.max()) + 1, dtype=np.int64)
        np.add.at(masses, windows, values)
        index = int(np.argmax(masses[: kmax + 1]))
        return index, windows == index, Fraction(vmax, 1 << (index + 1))

    def count_window(self, values):
        """Twin of max_count_level on a positive int array: (index, member mask)."""
        np = self._np
        windows = self._window_indices(values)
        index = int(np.argmax(np.bincount(windows)))
        return index, windows == index


def _make_vectors(a: FiniteSet, dt: DiffTable, config: PipelineConfig):
    want = config.vectorized
    eligible = isinstance(a.group, F2n) and a.group.order <= _VEC_MAX_ORDER
    if want is False or not eligible:
        if want is True:
            raise GroupError("vectorized path requires an F2n group of order <= 2^24")
        return None
    return _F2Vectors(a, dt)


def _spread_of(a: FiniteSet, sliced: FiniteSet, vectors) -> int:
    if vectors is not None:
        return vectors.spread(sliced)
    sub = a.group.sub
    return len({sub(x, y) for x in sliced.elements for y in a.elements})


def first_refinement(
    a: FiniteSet,
    eps: Fraction = DEFAULT_EPS,
    config: PipelineConfig = PipelineConfig(),
    table: DiffTable | None = None,
    vectors=None,
) -> RefinementResult:
    """Select the heavy slices and bin them into one dyadic spread window.

    Heavy means r(t) >= |A| / (2K), checked as 2 r(t) |A-A| >= |A|^2.  The
    spreads |A[t] - A| of (up to slice_cap) heavy slices are then binned and
    the most populous window becomes T, with the common spread exponent beta.
    """
    dt = table if table is not None else diff_table(a)
    diff_size = len(dt.entries)
    k = Fraction(diff_size, a.size)
    if k <= 1:
        raise PipelineError("refinement needs K > 1; degenerate inputs exit earlier")
    base_sq = a.size * a.size
    heavy = [t for t in dt.support.sorted_elements if 2 * dt.entries[t] * diff_size >= base_sq]
    heavy_count = len(heavy)

    truncated = heavy_count > config.slice_cap
    if truncated:
        rng = SplitMix64(config.seed)
        picks = rng.sample_indices(heavy_count, config.slice_cap)
        sampled = sorted((heavy[i] for i in picks), key=a.group.sort_key)
    else:
        sampled = heavy

    if vectors is None:
        vectors = _make_vectors(a, dt, config)
    stats = {}
    spreads = {}
    for t in sampled:
        sliced = translate_intersect(a, t)
        spread = _spread_of(a, sliced, vectors)
        stats[t] = SliceStats(t, sliced.size, spread, a.size, k)
        spreads[t] = spread

    level = max_count_level(spreads)
    selected = level.members
    beta = _clamp(
        (_geomean_log(spreads[t] for t in selected) - math.log(a.size)) / _flog(k),
        0.0,
        1.0,
    )
    threshold_ok = all(2 * dt.entries[t] * diff_size >= base_sq for t in selected)
    return RefinementResult(
        k=k,
        base_size=a.size,
        diff_size=diff_size,
        heavy_count=heavy_count,
        sampled=tuple(sampled),
        truncated=truncated,
        stats=stats,
        level=level,
        selected=selected,
        beta=beta,
        coverage=Fraction(len(selected), diff_size),
        coverage_target=float(k) ** (-float(eps)),
        threshold_ok=threshold_ok,
    )


def large_beta_candidate(
    a: FiniteSet,
    dt: DiffTable,
    refinement: RefinementResult,
    eps: Fraction = DEFAULT_EPS,
    config: PipelineConfig = PipelineConfig(),
    diff_dt: DiffTable | None = None,
    vectors=None,
) -> tuple[CandidateCertificate, dict]:
    """Covering-count branch: select the x covered by many slice spreads.

    N(x) counts the slices t in T with x in A[t] - A; the max-mass window of
    N over A - A becomes the candidate X.  Every x in X is then an
    N(x)-heavy translate of A - A, which feeds the invariance energy bound
    with the measured rho = window_lower / |A - A|.
    """
    group = a.group
    diff = dt.support
    k = refinement.k
    selected = refinement.selected
    if not selected:
        raise PipelineError("covering-count branch needs a nonempty T")

    if vectors is None:
        vectors = _make_vectors(a, dt, config)
    if vectors is not None:
        dense = vectors.new_counts()
        for t in selected:
            vectors.accumulate_cover(translate_intersect(a, t), dense)
        counts = {x: int(dense[group.index(x)]) for x in diff.sorted_elements}
    else:
        counts = {x: 0 for x in diff.sorted_elements}
        sub = group.sub
        for t in selected:
            sliced = translate_intersect(a, t)
            for x in {sub(s, y) for s in sliced.elements for y in a.elements}:
                if x in counts:
                    counts[x] += 1

    if all(v == 0 for v in counts.values()):
        raise RuntimeError("pipeline bug: every t in T witnesses itself, counts cannot all vanish")

    level = max_mass_level(counts)
    x_set = FiniteSet(group, frozenset(level.members))
    alpha = _flog(Fraction(diff.size, x_set.size)) / _flog(k)
    rho = level.lower / diff.size
    invariance = invariance_energy_bound(x_set, diff, rho, b2_table=diff_dt)
    certificate = evaluate_candidate(
        "X_large_beta", x_set, a.size, k, eps, parent_diff=diff, c_max=config.c_max
    )
    trace = {
        "stage": "large-beta branch",
        "alpha": alpha,
        "window_index": level.index,
        "rho": [rho.numerator, rho.denominator],
        "invariance": invariance.as_dict(),
    }
    return certificate, trace


@dataclass
class _SlicePairData:
    """Per-slice results of the pair refinement, identical on both paths."""

    sliced: FiniteSet
    ratio: Fraction          # |G1| / |A[t]|^2
    pair_lower: Fraction     # selected pair-value window lower bound
    slice_entries: dict      # within-slice difference counts
    neg_projection: tuple    # -(G): difference projection of retained pairs
    gamma: float


def _slice_pair_object(group, sliced: FiniteSet, dt: DiffTable, log_k: float) -> _SlicePairData:
    sub = group.sub
    elems = sliced.sorted_elements
    pair_values = {(x, y): dt.entries[sub(x, y)] for x in elems for y in elems}
    level1 = max_mass_level(pair_values)
    pairs = level1.members

    slice_table = diff_table(sliced, method="pairs")
    projection = {sub(x, y) for x, y in pairs}
    proj_size = len(projection)
    kept = {
        (x, y): slice_table.entries[sub(x, y)]
        for x, y in pairs
        if 2 * slice_table.entries[sub(x, y)] * proj_size >= len(pairs)
    }
    refined = max_count_level(kept)
    refined_values = [kept[p] for p in refined.members]
    neg_projection = tuple(sorted({sub(x, y) for x, y in refined.members}, key=group.sort_key))
    gamma = (math.log(sliced.size) - _geomean_log(refined_values)) / log_k
    return _SlicePairData(
        sliced=sliced,
        ratio=Fraction(level1.count, sliced.size ** 2),
        pair_lower=level1.lower,
        slice_entries=slice_table.entries,
        neg_projection=neg_projection,
        gamma=gamma,
    )


def _slice_pair_vector(group, sliced: FiniteSet, vectors: _F2Vectors, log_k: float) -> _SlicePairData:
    np = vectors._np
    idx = vectors._slice_idx(sliced)
    diffs = idx[:, None] ^ idx[None, :]
    values = vectors._r_dense[diffs]

    _, mask1, lower1 = vectors.mass_window(values.ravel())
    mask1 = mask1.reshape(values.shape)
    g1_count = int(np.count_nonzero(mask1))

    slice_counts = np.bincount(diffs.ravel(), minlength=vectors.order)
    rt_values = slice_counts[diffs]
    proj_size = int(np.unique(diffs[mask1]).size)
    kept = mask1 & (2 * rt_values * proj_size >= g1_count)
    _, refined_mask = vectors.count_window(rt_values[kept])
    full_refined = np.zeros(diffs.shape, dtype=bool)
    full_refined[kept] = refined_mask
    refined_values = rt_values[full_refined]

    neg_projection = tuple(int(x) for x in np.unique(diffs[full_refined]))
    gamma = (
        math.log(sliced.size)
        - _geomean_log(int(v) for v in refined_values)
    ) / log_k
    support = np.nonzero(slice_counts)[0]
    slice_entries = {int(x): int(slice_counts[x]) for x in support}
    return _SlicePairData(
        sliced=sliced,
        ratio=Fraction(g1_count, sliced.size ** 2),
        pair_lower=lower1,
        slice_entries=slice_entries,
        neg_projection=neg_projection,
        gamma=gamma,
    )


def small_beta_chain(
    a: FiniteSet,
    dt: DiffTable,
    refinement: RefinementResult,
    eps: Fraction = DEFAULT_EPS,
    config: PipelineConfig = PipelineConfig(),
    diff_dt: DiffTable | None = None,
    vectors=None,
) -> tuple[list[CandidateCertificate], dict]:
    """Slice-pair branch: per-slice pair refinement, then the union candidate.

    For each slice: the pair map (a, a') -> r_A(a - a') over A[t]^2 is
    mass-binned into G1; slices are then count-binned by |G1|/|A[t]|^2 into
    T'.  Within each retained slice, pairs whose within-slice difference
    count is heavy are kept (G), each slice is certified as a candidate, and
    the union X' of difference projections -(G) is mass-binned by the
    covering count g(x) into the final candidate X with two recorded
    invariance checks (against A - A and against A).
    """
    group = a.group
    diff = dt.support
    k = refinement.k
    log_k = _flog(k)
    base_a0 = group.neg(a.sorted_elements[0])
    certificates: list[CandidateCertificate] = []
    trace: dict = {"stage": "small-beta branch", "skipped_slices": []}

    if vectors is None:
        vectors = _make_vectors(a, dt, config)
    slice_data: dict = {}
    for t in refinement.selected:
        sliced = translate_intersect(a, t)
        if sliced.size * sliced.size > config.pair_cap:
            trace["skipped_slices"].append(group.format(t))
            continue
        if vectors is not None:
            slice_data[t] = _slice_pair_vector(group, sliced, vectors, log_k)
        else:
            slice_data[t] = _slice_pair_object(group, sliced, dt, log_k)

    if not slice_data:
        trace["note"] = "all slices skipped under the pair cap; no union candidate"
        return certificates, trace

    bin_level = max_count_level({t: d.ratio for t, d in slice_data.items()})
    t_prime = bin_level.members
    alpha = -_geomean_log(slice_data[t].ratio for t in t_prime) / log_k
    trace["alpha"] = alpha
    trace["t_prime"] = [group.format(t) for t in t_prime]

    cover: Counter = Counter()
    min_pair_lower: Fraction | None = None
    gammas = {}
    for t in t_prime:
        data = slice_data[t]
        gammas[group.format(t)] = data.gamma
        cover.update(data.neg_projection)
        if min_pair_lower is None or data.pair_lower < min_pair_lower:
            min_pair_lower = data.pair_lower
        certificates.append(
            evaluate_candidate(
                f"A[{group.format(t)}]",
                translate(data.sliced, base_a0),
                a.size,
                k,
                eps,
                parent_diff=diff,
                c_max=config.c_max,
                table=DiffTable(data.sliced, data.slice_entries),
            )
        )
    trace["gamma"] = gammas

    union_level = max_mass_level({x: cover[x] for x in sorted(cover, key=group.sort_key)})
    x_set = FiniteSet(group, frozenset(union_level.members))
    eta = (_flog(Fraction(diff.size)) - _geomean_log(cover[x] for x in union_level.members)) / log_k
    trace["eta"] = eta
    trace["union_size"] = len(cover)

    rho_diff = union_level.lower / diff.size
    invariance_diff = invariance_energy_bound(x_set, diff, rho_diff, b2_table=diff_dt)
    rho_base = min_pair_lower / a.size
    invariance_base = invariance_energy_bound(x_set, a, rho_base, b2_table=dt)
    trace["rho_vs_diff"] = [rho_diff.numerator, rho_diff.denominator]
    trace["invariance_vs_diff"] = invariance_diff.as_dict()
    trace["rho_vs_base"] = [rho_base.numerator, rho_base.denominator]
    trace["invariance_vs_base"] = invariance_base.as_dict()

    certificates.append(
        evaluate_candidate(
            "X_small_beta", x_set, a.size, k, eps, parent_diff=diff, c_max=config.c_max
        )
    )
    return certificates, trace


@dataclass
class PipelineReport:
    """Complete record of one extraction run; serializes to schema-1 JSON."""

    group: Group
    set_size: int
    k: Fraction
    eps: Fraction
    config: PipelineConfig
    energy_a: Fraction
    energy_a_q: int
    energy_diff: Fraction
    energy_diff_q: int
    diff_size: int
    degenerate: bool
    early_exit: str | None
    refinement: RefinementResult | None
    certificates: list
    chosen_index: int
    trace: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    @property
    def chosen(self) -> CandidateCertificate:
        return self.certificates[self.chosen_index]

    @property
    def truncated(self) -> bool:
        if self.refinement is not None and self.refinement.truncated:
            return True
        return any(entry.get("skipped_slices") for entry in self.trace if isinstance(entry, dict))

    def as_dict(self) -> dict:
        cap = self.config.report_elements_cap
        return {
            "schema": 1,
            "group": self.group.describe(),
            "set_size": self.set_size,
            "k": {
                "num": self.k.numerator,
                "den": self.k.denominator,
                "value": float(self.k),
            },
            "eps": {"num": self.eps.numerator, "den": self.eps.denominator},
            "config": self.config.as_dict(),
            "energy_a": {
                "q": self.energy_a_q,
                "cube": self.set_size ** 3,
                "value": float(self.energy_a),
            },
            "energy_diff": {
                "q": self.energy_diff_q,
                "cube": self.diff_size ** 3,
                "value": float(self.energy_diff),
            },
            "degenerate": self.degenerate,
            "early_exit": self.early_exit,
            "truncated": self.truncated,
            "refinement": self.refinement.as_dict(self.group) if self.refinement else None,
            "slices": [
                self.refinement.stats[t].as_dict(self.group)
                for t in self.refinement.sampled
            ]
            if self.refinement
            else [],
            "certificates": [c.as_dict(cap) for c in self.certificates],
            "chosen": {"index": self.chosen_index, "label": self.chosen.label},
            "trace": self.trace,
            "timings": self.timings,
        }


def _choose(certificates) -> int:
    eligible = [
        i for i, c in enumerate(certificates) if c.meets_size_floor and c.size >= 2
    ]
    pool = eligible if eligible else range(len(certificates))
    return min(pool, key=lambda i: (-certificates[i].energy, -certificates[i].size, i))


def run_pipeline(
    a: FiniteSet,
    eps: Fraction = DEFAULT_EPS,
    config: PipelineConfig = PipelineConfig(),
) -> PipelineReport:
    """Run the full extraction and return the report with all certificates."""
    eps = Fraction(eps)
    if not 0 < eps < Fraction(1, 2):
        raise GroupError(f"eps must lie in (0, 1/2), got {eps}")
    if a.size == 0:
        raise EmptySetError("pipeline needs a nonempty set")
    timings: dict = {}
    trace: list = []
    t_start = time.perf_counter()

    dt = diff_table(a)
    diff = dt.support
    diff_size = diff.size
    k = Fraction(diff_size, a.size)
    energy_a_rep = energy_from_table(dt)
    timings["difference_table"] = time.perf_counter() - t_start

    degenerate = k <= 1 + DEGENERATE_SLACK
    t_stage = time.perf_counter()
    diff_dt = diff_table(diff)
    energy_diff_rep = energy_from_table(diff_dt)
    cert_diff = evaluate_candidate(
        "A-A", diff, a.size, k, eps, parent_diff=diff, c_max=config.c_max, table=diff_dt
    )
    timings["difference_certificate"] = time.perf_counter() - t_stage

    certificates = [cert_diff]
    early_exit = None
    refinement = None

    if degenerate:
        early_exit = "degenerate: K is 1 (coset input), the difference set is a subgroup"
        trace.append({"stage": "degenerate-exit", "k": float(k)})
    else:
        trace.append(
            {
                "stage": "difference-set check",
                "relaxed_threshold_met": meets_energy_threshold(cert_diff.energy, k, eps, relax=2),
                "energy": float(cert_diff.energy),
            }
        )
        base_a0 = a.group.neg(a.sorted_elements[0])
        cert_a = evaluate_candidate(
            "A",
            translate(a, base_a0),
            a.size,
            k,
            eps,
            parent_diff=diff,
            c_max=config.c_max,
            table=dt,
        )
        certificates.append(cert_a)
        trace.append(
            {
                "stage": "base-set check",
                "meets_theorem": cert_a.meets_theorem,
                "energy": float(cert_a.energy),
            }
        )

        vectors = _make_vectors(a, dt, config)
        t_stage = time.perf_counter()
        refinement = first_refinement(a, eps, config, table=dt, vectors=vectors)
        timings["refinement"] = time.perf_counter() - t_stage
        trace.append({"stage": "refinement", **refinement.as_dict(a.group)})
        if len(refinement.selected) < 2:
            trace.append(
                {"stage": "refinement", "warning": "fewer than 2 slices selected under caps"}
            )

        if refinement.selected:
            t_stage = time.perf_counter()
            cert_large, large_trace = large_beta_candidate(
                a, dt, refinement, eps, config, diff_dt=diff_dt, vectors=vectors
            )
            certificates.append(cert_large)
            trace.append(large_trace)
            timings["large_beta"] = time.perf_counter() - t_stage

            t_stage = time.perf_counter()
            small_certs, small_trace = small_beta_chain(
                a, dt, refinement, eps, config, diff_dt=diff_dt, vectors=vectors
            )
            certificates.extend(small_certs)
            trace.append(small_trace)
            timings["small_beta"] = time.perf_counter() - t_stage

    chosen_index = _choose(certificates)
    timings["total"] = time.perf_counter() - t_start
    return PipelineReport(
        group=a.group,
        set_size=a.size,
        k=k,
        eps=eps,
        config=config,
        energy_a=energy_a_rep.normalized,
        energy_a_q=energy_a_rep.quadruple_count,
        energy_diff=energy_diff_rep.normalized,
        energy_diff_q=energy_diff_rep.quadruple_count,
        diff_size=diff_size,
        degenerate=degenerate,
        early_exit=early_exit,
        refinement=refinement,
        certificates=certificates,
        chosen_index=chosen_index,
        trace=trace,
        timings=timings,
    )
