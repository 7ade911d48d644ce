"""Property suites: exact oracle equivalence, selector/overlap bounds, pipeline.

Each suite runs a seeded corpus and returns a result with failure strings
(one per violated check, carrying the counterexample) and per-category
counters.  The CLI and the acceptance tests both drive these functions, so
there is a single source of truth for what is checked.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .dyadic import (
    admissible_mass,
    floor_log2,
    invariance_energy_bound,
    max_count_level,
    max_mass_level,
    stated_count_bound,
    stated_mass_bound,
    translate_overlap_sum,
)
from .extract import PipelineConfig, run_pipeline
from .generate import RPlusHSpec, SplitMix64, gen_r_plus_h, gen_random, gen_subspace
from .groups import F2n, Fpn, Zint, Zmod
from .sets import (
    build_set,
    diff_table,
    energy_exact,
    energy_oracle,
    translate_heavy_set,
    translate_intersect,
)
from .transform import dense_eligible


@dataclass
class SuiteResult:
    name: str
    checks: int = 0
    failures: list = field(default_factory=list)
    by_category: Counter = field(default_factory=Counter)
    failed_categories: Counter = field(default_factory=Counter)

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, ok: bool, category: str, message: str) -> None:
        self.checks += 1
        self.by_category[category] += 1
        if not ok:
            self.failures.append(f"{category}: {message}")
            self.failed_categories[category] += 1

    def category_passed(self, category: str) -> bool:
        return self.by_category[category] > 0 and self.failed_categories[category] == 0

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.name}: {self.checks - len(self.failures)}/{self.checks} checks passed [{status}]"


ORACLE_VARIANTS = (F2n(8), Fpn(3, 4), Zmod(97), Zint())


def _random_zint_set(rng: SplitMix64, size: int):
    span = 2_000_001
    idx = rng.sample_indices(span, size)
    return build_set(Zint(), (i - span // 2 for i in idx))


def oracle_suite(trials: int = 200, seed: int = 1, max_size: int = 30) -> SuiteResult:
    """Per group variant: oracle equality, dense agreement, table identities."""
    result = SuiteResult("oracle")
    rng = SplitMix64(seed)
    for group in ORACLE_VARIANTS:
        cap = max_size if group.order is None else min(max_size, group.order)
        for trial in range(trials):
            size = 1 + rng.below(cap)
            if isinstance(group, Zint):
                fs = _random_zint_set(rng, size)
            else:
                fs = gen_random(group, size, rng.next_u64())
            tag = f"{group.describe()} trial {trial} size {fs.size}"

            table = diff_table(fs, method="pairs")
            exact = energy_exact(fs, method="pairs")
            oracle = energy_oracle(fs)
            result.check(
                exact.quadruple_count == oracle.quadruple_count,
                "oracle-equality",
                f"{tag}: exact={exact.quadruple_count} oracle={oracle.quadruple_count}",
            )
            if dense_eligible(fs.group):
                dense = diff_table(fs, method="dense")
                result.check(
                    dense.entries == table.entries,
                    "oracle-equality",
                    f"{tag}: dense table disagrees with pairwise table",
                )

            n = fs.size
            q = exact.quadruple_count
            diff_size = len(table.entries)
            result.check(
                q * diff_size >= n ** 4 and q <= n ** 3,
                "energy-bounds",
                f"{tag}: q={q} |A|={n} |A-A|={diff_size}",
            )
            result.check(
                sum(table.entries.values()) == n * n,
                "table-identities",
                f"{tag}: sum of counts != |A|^2",
            )
            result.check(
                table.entries.get(fs.group.zero) == n,
                "table-identities",
                f"{tag}: r(0) != |A|",
            )
            neg = fs.group.neg
            result.check(
                all(table.entries.get(neg(t)) == r for t, r in table.entries.items()),
                "table-identities",
                f"{tag}: r(t) != r(-t) somewhere",
            )
            result.check(
                all(
                    translate_intersect(fs, t).size == r
                    for t, r in table.entries.items()
                ),
                "table-identities",
                f"{tag}: slice size != r(t) somewhere",
            )
    return result


def selector_checks(result: SuiteResult, trials: int, rng: SplitMix64) -> None:
    for trial in range(trials):
        size = 1 + rng.below(256)
        magnitude = 1 << (1 + rng.below(12))
        values = {i: 1 + rng.below(magnitude) for i in range(size)}
        level = max_count_level(values)
        tag = f"trial {trial} |S|={size}"
        result.check(level.meets_guarantee(), "count-selector", f"{tag}: exact guarantee: {level}")
        result.check(
            level.count >= stated_count_bound(level.theta, size),
            "count-selector",
            f"{tag}: stated bound",
        )
        result.check(
            all(level.lower < values[m] <= level.upper for m in level.members),
            "count-selector",
            f"{tag}: member outside its window",
        )
        result.check(
            level.index <= floor_log2(1 / level.theta),
            "count-selector",
            f"{tag}: window index out of range",
        )

        zero_rate = rng.below(4)
        mvalues = {
            i: 0 if rng.below(4) < zero_rate else 1 + rng.below(magnitude)
            for i in range(size)
        }
        if all(v == 0 for v in mvalues.values()):
            mvalues[0] = 1
        mlevel = max_mass_level(mvalues)
        result.check(mlevel.meets_guarantee(), "mass-selector", f"{tag}: exact guarantee: {mlevel}")
        result.check(
            mlevel.count >= stated_mass_bound(mlevel.theta, size, mlevel.index),
            "mass-selector",
            f"{tag}: stated bound",
        )
        result.check(
            mlevel.index <= floor_log2(2 / mlevel.theta),
            "mass-selector",
            f"{tag}: window index beyond admissible range",
        )
        result.check(
            all(mlevel.lower < mvalues[m] <= mlevel.upper for m in mlevel.members),
            "mass-selector",
            f"{tag}: member outside its window",
        )
        mass, floor = admissible_mass(mvalues)
        result.check(
            mass >= floor,
            "mass-selector",
            f"{tag}: admissible mass {mass} below floor {floor}",
        )


INVARIANCE_RHOS = (Fraction(1, 8), Fraction(1, 4), Fraction(1, 2), Fraction(1))


def invariance_checks(result: SuiteResult, trials: int, rng: SplitMix64) -> None:
    group = F2n(10)
    for trial in range(trials):
        size = 20 + rng.below(41)
        b2 = gen_random(group, size, rng.next_u64())
        rho = INVARIANCE_RHOS[rng.below(len(INVARIANCE_RHOS))]
        heavy = translate_heavy_set(b2, rho)
        pick = 1 + rng.below(heavy.size)
        members = heavy.sorted_elements
        b1 = build_set(group, (members[i] for i in rng.sample_indices(heavy.size, pick)))
        tag = f"trial {trial} |B2|={b2.size} rho={rho} |B1|={b1.size}"

        report = invariance_energy_bound(b1, b2, rho)
        result.check(report.hypothesis_ok, "invariance", f"{tag}: hypothesis violated")
        result.check(report.satisfied, "invariance", f"{tag}: energy bound failed")
        result.check(report.log_exact, "invariance", f"{tag}: expected an exact dyadic log")
        # Independent exact recomputation of the inequality.
        e1 = energy_exact(b1).normalized
        e2 = energy_exact(b2).normalized
        log_term = 2 + 2 * floor_log2(1 / rho)  # rho is a power of two here
        lhs = e1 * e2 * b2.size
        rhs = rho ** 4 * b1.size / Fraction(16 * log_term ** 2)
        result.check(lhs >= rhs, "invariance", f"{tag}: exact inequality {lhs} < {rhs}")

        overlap = translate_overlap_sum(b1, b2)
        need = rho ** 2 * b1.size ** 2 * b2.size
        result.check(
            Fraction(overlap) >= need,
            "overlap",
            f"{tag}: pairwise overlap sum {overlap} below {need}",
        )


def lemma_suite(trials: int = 1000, seed: int = 1, invariance_trials: int | None = None) -> SuiteResult:
    """Dyadic selector guarantees plus the overlap and invariance inequalities."""
    result = SuiteResult("lemmas")
    rng = SplitMix64(seed)
    selector_checks(result, trials, rng)
    invariance_checks(result, invariance_trials if invariance_trials is not None else max(1, trials // 5), rng)
    return result


def _strip_timings(report_dict: dict, drop_vectorized: bool = False) -> dict:
    out = dict(report_dict)
    out.pop("timings", None)
    if drop_vectorized:
        config = dict(out.get("config", {}))
        config.pop("vectorized", None)
        out["config"] = config
    return out


def pipeline_suite(seed: int = 1) -> SuiteResult:
    """Hand-checked values, determinism, subset and range invariants."""
    result = SuiteResult("pipeline")
    zint = Zint()

    fs = build_set(zint, [0, 1, 3])
    report = run_pipeline(fs)
    result.check(report.k == Fraction(7, 3), "hand-values", f"K = {report.k}, want 7/3")
    result.check(report.energy_a == Fraction(5, 9), "hand-values", f"E(A) = {report.energy_a}")
    result.check(
        report.energy_diff == Fraction(231, 343),
        "hand-values",
        f"E(A-A) = {report.energy_diff}",
    )
    result.check(report.chosen.label == "A-A", "hand-values", f"chosen = {report.chosen.label}")
    result.check(report.chosen.meets_theorem, "hand-values", "chosen A-A fails the threshold")

    sub = gen_subspace(F2n(12), 6)
    sub_report = run_pipeline(sub)
    result.check(sub_report.k == 1, "degenerate", f"subgroup K = {sub_report.k}")
    result.check(sub_report.chosen.energy == 1, "degenerate", "subgroup chosen energy != 1")
    result.check(sub_report.chosen.e_energy == 0.0, "degenerate", "subgroup e_energy != 0")

    spec = RPlusHSpec(n=10, dh=4, r_count=6, seed=seed)
    fs2 = gen_r_plus_h(spec)
    config = PipelineConfig(slice_cap=32, seed=seed)
    rep_a = run_pipeline(fs2, config=config)
    rep_b = run_pipeline(fs2, config=config)
    dump_a = json.dumps(_strip_timings(rep_a.as_dict()), sort_keys=False)
    dump_b = json.dumps(_strip_timings(rep_b.as_dict()), sort_keys=False)
    result.check(dump_a == dump_b, "determinism", "repeated runs differ beyond timings")

    rep_obj = run_pipeline(fs2, config=PipelineConfig(slice_cap=32, seed=seed, vectorized=False))
    dump_obj = json.dumps(_strip_timings(rep_obj.as_dict(), drop_vectorized=True), sort_keys=False)
    rep_vec = run_pipeline(fs2, config=PipelineConfig(slice_cap=32, seed=seed, vectorized=True))
    dump_vec = json.dumps(_strip_timings(rep_vec.as_dict(), drop_vectorized=True), sort_keys=False)
    result.check(dump_obj == dump_vec, "determinism", "vectorized and object paths disagree")

    diff_elems = diff_table(fs2).support.elements
    for cert in rep_a.certificates:
        result.check(
            cert.candidate.elements <= diff_elems,
            "containment",
            f"certificate {cert.label} escapes A-A",
        )
    if rep_a.refinement is not None:
        ref = rep_a.refinement
        dt = diff_table(fs2)
        for t in ref.selected:
            result.check(
                2 * dt.entries[t] * ref.diff_size >= ref.base_size ** 2,
                "refinement",
                "selected slice below the heavy threshold",
            )
        spreads = [ref.stats[t].spread for t in ref.selected]
        result.check(
            max(spreads) <= 2 * min(spreads),
            "refinement",
            "selected spreads span more than a factor 2",
        )
        for t in ref.sampled:
            st = ref.stats[t]
            result.check(
                ref.base_size <= st.spread <= ref.diff_size,
                "refinement",
                f"spread {st.spread} outside [|A|, |A-A|]",
            )
            result.check(0.0 <= st.beta <= 1.0, "refinement", f"beta {st.beta} out of range")

    # Pair-value identity: |(a - a' + A) ∩ A| = r_A(a - a').
    rng = SplitMix64(seed)
    small = gen_random(F2n(6), 12, rng.next_u64())
    table = diff_table(small)
    elems = small.sorted_elements
    for a in elems[:6]:
        for b in elems[:6]:
            d = small.group.sub(a, b)
            result.check(
                translate_intersect(small, d).size == table.entries[d],
                "pair-identity",
                "pair-value identity failed",
            )
    return result


SUITES = {
    "oracle": oracle_suite,
    "lemmas": lemma_suite,
    "pipeline": pipeline_suite,
}
