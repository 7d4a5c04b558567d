import json

import numpy as np
import pytest

from sparsegap.dictionary import AtomSet, build_random_tight_frame, build_spikes_sines
from sparsegap.rank_bounds import DependentSetError
from sparsegap.signals import (
    Verdict,
    draw_generic_signal,
    equivalence_experiment,
    gap_experiment,
    make_signal,
    rank_condition,
    residual_over,
    test_representability,
)


class TestDrawGenericSignal:
    def test_deterministic(self):
        d = build_spikes_sines(8)
        s_set = AtomSet.of([0, 3, 9])
        a = draw_generic_signal(d, s_set, seed=42)
        b = draw_generic_signal(d, s_set, seed=42)
        assert np.array_equal(a.signal, b.signal)
        assert np.array_equal(a.coefficients, b.coefficients)

    def test_single_spike_is_scaled_basis_vector(self):
        d = build_spikes_sines(4)
        sig = draw_generic_signal(d, AtomSet.of([2]), seed=0)
        expected = np.zeros(4, dtype=complex)
        expected[2] = sig.coefficients[0]
        assert np.allclose(sig.signal, expected)

    def test_coefficient_mean_near_zero(self):
        d = build_spikes_sines(4)
        draws = np.array([
            draw_generic_signal(d, AtomSet.of([0]), seed=i).coefficients[0]
            for i in range(10_000)
        ])
        # complex standard normal: SE of the mean is 1/sqrt(n) per part
        se = 1 / np.sqrt(len(draws) * 2)
        assert abs(draws.real.mean()) < 5 * se
        assert abs(draws.imag.mean()) < 5 * se

    def test_rejects_dependent_support(self):
        d = build_spikes_sines(4)
        with pytest.raises(DependentSetError):
            draw_generic_signal(d, AtomSet.of([0, 1, 2, 3, 4]), seed=0)


class TestRankCondition:
    def test_t_equals_s_fails(self):
        d = build_spikes_sines(8)
        s_set = AtomSet.of([0, 1, 2])
        holds, report = rank_condition(d, s_set, s_set)
        assert not holds and report.exact_rank == 3

    def test_disjoint_orthonormal_holds(self):
        d = build_spikes_sines(8)
        holds, report = rank_condition(d, AtomSet.of([0, 1]), AtomSet.of([2, 3]))
        assert holds and report.exact_rank == 4

    def test_dirac_comb_union_rank(self):
        # comb spikes vs comb sines: the two 4-dim spans meet only on the
        # comb line, so the union has rank 7 and the condition holds even
        # though the comb itself lives in both ranges
        d = build_spikes_sines(16)
        spikes = AtomSet.of([0, 4, 8, 12])
        sines = AtomSet.of([16, 20, 24, 28])
        holds, report = rank_condition(d, spikes, sines)
        assert report.exact_rank == 7
        assert holds


class TestRepresentability:
    def test_superset_representable(self):
        d = build_spikes_sines(8)
        sig = draw_generic_signal(d, AtomSet.of([0, 1]), seed=1)
        verdict = test_representability(d, AtomSet.of([0, 1, 2]), sig)
        assert verdict.residual <= 1e-10
        assert verdict.verdict is Verdict.REPRESENTABLE

    def test_disjoint_orthonormal_not_representable(self):
        d = build_spikes_sines(8)
        sig = draw_generic_signal(d, AtomSet.of([0, 1]), seed=2)
        verdict = test_representability(d, AtomSet.of([2, 3]), sig)
        assert verdict.verdict is Verdict.NOT_REPRESENTABLE

    def test_dirac_comb_measure_zero_exception(self):
        # the equal-coefficient comb is representable over the comb sines
        # although a generic signal on the comb spikes almost surely is not
        d = build_spikes_sines(16)
        spikes = AtomSet.of([0, 4, 8, 12])
        sines = AtomSet.of([16, 20, 24, 28])
        comb = make_signal(d, spikes, [1, 1, 1, 1])
        verdict = test_representability(d, sines, comb)
        assert verdict.residual <= 1e-10
        assert verdict.verdict is Verdict.REPRESENTABLE
        assert verdict.rank_condition_holds
        generic = draw_generic_signal(d, spikes, seed=3)
        assert test_representability(d, sines, generic).verdict is Verdict.NOT_REPRESENTABLE

    def test_zero_signal_rejected(self):
        d = build_spikes_sines(4)
        sig = make_signal(d, AtomSet.of([0]), [0.0])
        with pytest.raises(ValueError):
            test_representability(d, AtomSet.of([1]), sig)


class TestEquivalenceExperiment:
    def test_disjoint_orthonormal_all_blocked(self):
        d = build_spikes_sines(8)
        rep = equivalence_experiment(d, AtomSet.of([0, 1]), AtomSet.of([2, 3]),
                                     trials=100, seed=5)
        assert rep.summary["rank_condition_holds"]
        assert all(r["verdict"] == "NOT_REPRESENTABLE" for r in rep.trials)
        assert rep.summary["consistent"]

    def test_superset_all_representable(self):
        d = build_spikes_sines(8)
        rep = equivalence_experiment(d, AtomSet.of([0, 1]), AtomSet.of([0, 1, 2]),
                                     trials=100, seed=6)
        assert rep.summary["range_containment"]
        assert all(r["verdict"] == "REPRESENTABLE" for r in rep.trials)
        assert rep.summary["consistent"]

    def test_deterministic_payload(self):
        d = build_spikes_sines(8)
        a = equivalence_experiment(d, AtomSet.of([0, 1]), AtomSet.of([2, 3]), 10, seed=7)
        b = equivalence_experiment(d, AtomSet.of([0, 1]), AtomSet.of([2, 3]), 10, seed=7)
        assert a.to_json() == b.to_json()
        assert a.to_csv() == b.to_csv()


class TestGapExperiment:
    def test_spikes_sines_no_violations(self):
        d = build_spikes_sines(64)
        rep = gap_experiment(d, s=16, t=16, delta=0, pairs=5, trials_per_pair=4, seed=8)
        assert rep.summary["predicted_blocked"]
        assert abs(rep.summary["overlap_rhs"] - 11.0) < 1e-12
        assert rep.summary["violations"] == 0
        assert rep.summary["n_inconclusive"] == 0

    def test_tight_frame_no_representable(self):
        d = build_random_tight_frame(32, 128, seed=11)
        rep = gap_experiment(d, s=8, t=8, delta=0, pairs=5, trials_per_pair=4, seed=9)
        assert all(r["verdict"] == "NOT_REPRESENTABLE" for r in rep.trials)

    def test_zero_t_vacuous(self):
        d = build_spikes_sines(8)
        rep = gap_experiment(d, s=2, t=0, delta=0, pairs=3, trials_per_pair=3, seed=1)
        assert rep.trials == [] and rep.summary["n_trials"] == 0

    def test_threads_match_serial(self):
        d = build_spikes_sines(16)
        serial = gap_experiment(d, 4, 4, 1, pairs=4, trials_per_pair=3, seed=10, threads=1)
        parallel = gap_experiment(d, 4, 4, 1, pairs=4, trials_per_pair=3, seed=10, threads=4)
        assert serial.to_json() == parallel.to_json()

    def test_exact_overlap_sampling(self):
        d = build_spikes_sines(16)
        rep = gap_experiment(d, 4, 6, 2, pairs=6, trials_per_pair=1, seed=12)
        assert rep.summary["n_trials"] == 6

    def test_csv_columns_fixed(self):
        d = build_spikes_sines(8)
        rep = gap_experiment(d, 2, 2, 0, pairs=2, trials_per_pair=2, seed=13)
        header = rep.to_csv().splitlines()[0]
        assert header == "pair,trial,residual,verdict,rank_condition,predicted_blocked,t_redraws"

    def test_json_csv_same_residuals(self):
        d = build_spikes_sines(8)
        rep = gap_experiment(d, 2, 2, 0, pairs=2, trials_per_pair=2, seed=14)
        from_json = [r["residual"] for r in json.loads(rep.to_json())["trials"]]
        from_csv = [float(line.split(",")[2]) for line in rep.to_csv().splitlines()[1:]]
        assert from_json == from_csv
