"""Exact additive-set statistics and high-energy candidate extraction."""

from .dyadic import (
    DyadicLevel,
    InvarianceBoundReport,
    invariance_energy_bound,
    max_count_level,
    max_mass_level,
    translate_overlap_sum,
)
from .extract import (
    CandidateCertificate,
    PipelineConfig,
    PipelineReport,
    RefinementResult,
    SliceStats,
    evaluate_candidate,
    first_refinement,
    large_beta_candidate,
    run_pipeline,
    small_beta_chain,
)
from .generate import (
    GapSpec,
    RPlusHSpec,
    SplitMix64,
    gen_gap,
    gen_r_plus_h,
    gen_random,
    gen_subspace,
)
from .groups import F2n, Fpn, Group, GroupError, Zint, Zmod, parse_group
from .setfiles import format_set, read_set_file, write_set_file
from .sets import (
    DiffTable,
    DoublingStats,
    EnergyReport,
    FiniteSet,
    build_set,
    diff_set,
    diff_table,
    doubling_stats,
    energy_exact,
    energy_oracle,
    is_coset,
    sum_set,
    translate,
    translate_heavy_set,
    translate_intersect,
)

__version__ = "0.1.0"
