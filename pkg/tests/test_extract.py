import json
from fractions import Fraction

import pytest

from addenergy.extract import (
    PipelineConfig,
    PipelineError,
    evaluate_candidate,
    first_refinement,
    large_beta_candidate,
    meets_energy_threshold,
    run_pipeline,
    small_beta_chain,
)
from addenergy.generate import RPlusHSpec, gen_r_plus_h, gen_random, gen_subspace
from addenergy.groups import F2n, Zint, Zmod
from addenergy.sets import build_set, diff_table, energy_oracle, translate

A013 = build_set(Zint(), [0, 1, 3])


def test_meets_energy_threshold_exact():
    k = Fraction(7, 3)
    eps = Fraction(1, 37)
    assert meets_energy_threshold(Fraction(231, 343), k, eps)
    assert meets_energy_threshold(Fraction(5, 9), k, eps)
    # (7/3)^(-36/37) is about 0.4385: values just below fail
    assert not meets_energy_threshold(Fraction(43, 100), k, eps)
    assert meets_energy_threshold(Fraction(44, 100), k, eps)


def test_evaluate_candidate_basic():
    diff = diff_table(A013).support
    cert = evaluate_candidate("A-A", diff, A013.size, Fraction(7, 3), Fraction(1, 37))
    assert cert.energy == Fraction(231, 343)
    assert cert.meets_theorem
    assert cert.meets_size_floor
    assert cert.e_size == pytest.approx(-1.0)

    coset = translate(gen_subspace(F2n(8), 4), 0b10000000)
    sub_cert = evaluate_candidate("A-A", coset, 16, Fraction(1), Fraction(1, 37))
    assert sub_cert.energy == 1 and sub_cert.e_energy == 0.0


def test_evaluate_candidate_subset_guard():
    diff = diff_table(A013).support
    stranger = build_set(Zint(), [100])
    with pytest.raises(RuntimeError):
        evaluate_candidate("X", stranger, 3, Fraction(7, 3), Fraction(1, 37), parent_diff=diff)


def test_first_refinement_hand_instance():
    ref = first_refinement(A013)
    # threshold |A|/(2K) = 9/14 < 1, so all seven differences are heavy
    assert ref.heavy_count == 7
    assert not ref.truncated
    # slice spreads: t=0 gives 7, every other t gives 3
    assert {t: ref.stats[t].spread for t in ref.sampled} == {
        0: 7, 1: 3, -1: 3, 2: 3, -2: 3, 3: 3, -3: 3,
    }
    assert set(ref.selected) == {-3, -2, -1, 1, 2, 3}
    assert ref.beta == 0.0
    assert ref.coverage == Fraction(6, 7)
    assert ref.threshold_ok


def test_first_refinement_requires_doubling():
    with pytest.raises(PipelineError):
        first_refinement(gen_subspace(F2n(6), 3))


def test_first_refinement_sampling_cap():
    fs = gen_random(Zmod(997), 60, 5)
    config = PipelineConfig(slice_cap=20, seed=9)
    ref = first_refinement(fs, config=config)
    assert ref.truncated
    assert len(ref.sampled) == 20
    assert set(ref.selected) <= set(ref.sampled)
    # identical seeds resample identically
    again = first_refinement(fs, config=config)
    assert again.sampled == ref.sampled


def test_large_beta_hand_instance():
    dt = diff_table(A013)
    ref = first_refinement(A013, table=dt)
    cert, trace = large_beta_candidate(A013, dt, ref)
    # N is 6 at x=0 and 2 elsewhere; the mass window keeps the six x != 0
    assert cert.candidate.elements == frozenset({-3, -2, -1, 1, 2, 3})
    assert cert.energy == Fraction(61, 108)
    assert cert.energy == energy_oracle(cert.candidate).normalized
    assert trace["rho"] == [3, 14]
    assert trace["invariance"]["hypothesis_ok"]
    assert trace["invariance"]["satisfied"]


def test_small_beta_hand_instance():
    dt = diff_table(A013)
    ref = first_refinement(A013, table=dt)
    certs, trace = small_beta_chain(A013, dt, ref)
    slice_certs = [c for c in certs if c.label.startswith("A[")]
    assert len(slice_certs) == 6
    for cert in slice_certs:
        assert cert.size == 1
        assert cert.energy == 1
        assert cert.e_size == pytest.approx(1.2966069431192226)
    union = certs[-1]
    assert union.label == "X_small_beta"
    assert union.candidate.elements == frozenset({0})
    assert trace["invariance_vs_diff"]["hypothesis_ok"]
    assert trace["invariance_vs_base"]["hypothesis_ok"]
    assert all(g == 0.0 for g in trace["gamma"].values())


def test_small_beta_pair_cap_skips():
    dt = diff_table(A013)
    ref = first_refinement(A013, table=dt)
    certs, trace = small_beta_chain(A013, dt, ref, config=PipelineConfig(pair_cap=0))
    assert certs == []
    assert "note" in trace
    assert len(trace["skipped_slices"]) == 6


def test_pipeline_hand_instance():
    report = run_pipeline(A013)
    assert report.k == Fraction(7, 3)
    assert report.energy_a == Fraction(5, 9)
    assert report.energy_diff == Fraction(231, 343)
    assert report.chosen.label == "A-A"
    assert report.chosen.meets_theorem
    assert not report.degenerate
    labels = [c.label for c in report.certificates]
    assert labels[:3] == ["A-A", "A", "X_large_beta"]
    assert "X_small_beta" in labels
    # singletons are reported but never chosen
    assert all(c.size == 1 for c in report.certificates if c.energy == 1)


def test_pipeline_degenerate_cases():
    for fs in (
        gen_subspace(F2n(12), 6),
        translate(gen_subspace(F2n(12), 6), 1 << 11),
        build_set(Zint(), [5]),
        build_set(Zmod(12), range(12)),
    ):
        report = run_pipeline(fs)
        assert report.degenerate
        assert report.k == 1
        assert report.chosen.label == "A-A"
        assert report.chosen.energy == 1
        assert report.chosen.e_energy == 0.0
        assert report.early_exit is not None


def test_pipeline_certificates_inside_difference_set():
    fs = gen_r_plus_h(RPlusHSpec(n=10, dh=3, r_count=9, seed=2))
    report = run_pipeline(fs, config=PipelineConfig(slice_cap=24, seed=2))
    diff = diff_table(fs).support
    for cert in report.certificates:
        assert cert.candidate.elements <= diff.elements
    chosen = report.chosen
    assert chosen.meets_size_floor and chosen.size >= 2
    for cert in report.certificates:
        if cert.meets_size_floor and cert.size >= 2:
            assert chosen.energy >= cert.energy


def test_pipeline_gap_input():
    from addenergy.generate import GapSpec, gen_gap

    fs, proper = gen_gap(GapSpec(base=0, steps=(1, 100), lengths=(5, 5)))
    assert proper
    report = run_pipeline(fs)
    assert report.k == Fraction(81, 25)
    assert report.chosen.meets_theorem  # progressions have high difference-set energy


def test_pipeline_report_roundtrip_and_determinism():
    fs = gen_r_plus_h(RPlusHSpec(n=10, dh=4, r_count=6, seed=8))
    config = PipelineConfig(slice_cap=16, seed=8)
    d1 = run_pipeline(fs, config=config).as_dict()
    d2 = run_pipeline(fs, config=config).as_dict()
    d1.pop("timings"), d2.pop("timings")
    assert json.dumps(d1) == json.dumps(d2)
    assert d1["schema"] == 1
    assert Fraction(d1["k"]["num"], d1["k"]["den"]) == Fraction(
        diff_table(fs).support.size, fs.size
    )
    assert d1["certificates"][0]["label"] == "A-A"
    assert "sha256" in d1["certificates"][0]


def test_pipeline_vector_object_paths_agree():
    fs = gen_r_plus_h(RPlusHSpec(n=10, dh=4, r_count=7, seed=5))
    reports = []
    for vectorized in (True, False):
        config = PipelineConfig(slice_cap=16, seed=5, vectorized=vectorized)
        d = run_pipeline(fs, config=config).as_dict()
        d.pop("timings")
        d["config"].pop("vectorized")
        reports.append(json.dumps(d))
    assert reports[0] == reports[1]


def test_pipeline_eps_validation():
    with pytest.raises(Exception):
        run_pipeline(A013, eps=Fraction(1, 2))
    with pytest.raises(Exception):
        run_pipeline(A013, eps=Fraction(0))


def test_beta_range_exact():
    fs = gen_random(Zmod(499), 40, 17)
    ref = first_refinement(fs, config=PipelineConfig(slice_cap=64, seed=17))
    for t in ref.sampled:
        st = ref.stats[t]
        assert ref.base_size <= st.spread <= ref.diff_size
        assert 0.0 <= st.beta <= 1.0
