"""Bound specs, suite verification, lower-bound evaluation, and search."""

from fractions import Fraction

import pytest

from distortion_lab import (
    BUILTIN_BOUNDS,
    MechanismSpec,
    Objective,
    brute_force_centralized_distortion,
    evaluate_lower_bound,
    gen_random,
    gen_randdet_avgavg,
    gen_randdet_maxavg,
    gen_randrand_maxx,
    search_worst_case,
    verify_suite,
    verify_upper_bound,
)
from distortion_lab.audit import SuiteParams, eval_bound_expr
from distortion_lab.errors import InvalidParams, MismatchedRuleClass
from distortion_lab.model import Instance
from helpers import line_instance

F = Fraction


class TestBoundExpressions:
    def test_arithmetic(self):
        assert eval_bound_expr("alpha + 2", {"alpha": 3}) == 5
        assert eval_bound_expr("alpha + 2 - 2/k", {"alpha": 3, "k": 4}) == F(9, 2)
        assert eval_bound_expr("3 - 2/(k*nstar)", {"k": 2, "nstar": 3}) == F(8, 3)
        assert eval_bound_expr("2*beta + 3", {"beta": 2}) == 7

    def test_unknown_symbol(self):
        with pytest.raises(InvalidParams):
            eval_bound_expr("gamma + 1", {"alpha": 3})

    def test_registry_has_nine_bounds(self):
        assert len(BUILTIN_BOUNDS) == 9

    def test_bound_value_tracks_instance_parameters(self):
        inst = gen_random(6, 4, 3, kind="line", seed="bv")
        assert BUILTIN_BOUNDS["fpm-fur-avgavg"].value(inst) == 5 - F(2, 3)
        assert BUILTIN_BOUNDS["frd-fur-avgavg"].value(inst) == 3 - F(2, 3 * inst.partition.max_size)


class TestVerify:
    def test_single_candidate_suite_all_ratio_one(self):
        instances = [
            line_instance([0, 1], [F(1, 2)], [(0,), (1,)], [(0,), (0,)]),
            line_instance([2, 2], [0], [(0, 1)], [(0,), (0,)]),
        ]
        report = verify_upper_bound(BUILTIN_BOUNDS["frd-fur-maxmax"], instances)
        assert report.ok
        assert all(row.ratio == 1 for row in report.rows)

    def test_small_random_suite_has_no_violations(self):
        params = SuiteParams(count=120, seed="auditsmoke", max_n=8, max_m=6, max_k=4)
        reports = verify_suite(list(BUILTIN_BOUNDS.values()), params)
        for report in reports.values():
            assert report.ok, report.summary()

    def test_family_suite_margin_zero(self):
        instances = [gen_randdet_avgavg(k).instance for k in range(2, 11)]
        report = verify_upper_bound(BUILTIN_BOUNDS["fpm-fur-avgavg"], instances)
        assert report.ok
        assert report.min_margin == 0
        assert all(row.margin == 0 for row in report.rows)

    def test_parallel_matches_serial(self):
        params = SuiteParams(count=40, seed="par", max_n=6, max_m=5, max_k=3)
        serial = verify_suite([BUILTIN_BOUNDS["frd-fur-avgavg"]], params, workers=1)
        parallel = verify_suite([BUILTIN_BOUNDS["frd-fur-avgavg"]], params, workers=3)
        key = "frd-fur-avgavg"
        assert [(r.index, r.digest, r.ratio) for r in serial[key].rows] == [
            (r.index, r.digest, r.ratio) for r in parallel[key].rows
        ]


class TestLowerBounds:
    def test_rule_class_mismatch(self):
        gi = gen_randdet_maxavg("fpm")
        with pytest.raises(MismatchedRuleClass):
            evaluate_lower_bound(gi, MechanismSpec("dictator", "fur"), Objective.MAX_AVG)

    def test_objective_mismatch(self):
        with pytest.raises(InvalidParams):
            evaluate_lower_bound(gen_randrand_maxx(), MechanismSpec("frd", "fur"), Objective.AVG_AVG)

    def test_exact_ratio(self):
        value = evaluate_lower_bound(gen_randrand_maxx(), MechanismSpec("frd", "fur"), Objective.MAX_MAX)
        assert value == 3 and isinstance(value, Fraction)


class TestSearch:
    def test_single_iteration_is_that_instance(self):
        spec = MechanismSpec("frd", "fur")
        report = search_worst_case(spec, Objective.MAX_MAX, 1, seed="one", sampler="line")
        assert report.best_index == 0
        assert len(report.rows) == 1

    def test_reproducible(self):
        spec = MechanismSpec("frd", "fur")
        a = search_worst_case(spec, Objective.MAX_MAX, 60, seed=5, sampler="line")
        b = search_worst_case(spec, Objective.MAX_MAX, 60, seed=5, sampler="line")
        assert a.best_index == b.best_index
        assert a.rows == b.rows
        assert a.witness == b.witness

    def test_parallel_matches_serial(self):
        spec = MechanismSpec("fpm", "fur")
        a = search_worst_case(spec, Objective.MAX_AVG, 40, seed=2, sampler="graph")
        b = search_worst_case(spec, Objective.MAX_AVG, 40, seed=2, sampler="graph", workers=4)
        assert a.rows == b.rows and a.best_index == b.best_index

    def test_bounded_by_proved_ceiling(self):
        spec = MechanismSpec("fpm", "fur")
        report = search_worst_case(spec, Objective.MAX_AVG, 300, seed=11, sampler="graph")
        assert report.best_ratio <= 5

    def test_line_sampler_finds_near_tight_witnesses(self):
        spec = MechanismSpec("frd", "fur")
        report = search_worst_case(spec, Objective.MAX_MAX, 1000, seed="cal", sampler="line")
        assert F(5, 2) <= report.best_ratio <= 3


class TestCentralizedOracle:
    def test_unanimous_instance(self):
        inst = line_instance([0, 0], [0, 4], [(0, 1)], [(0, 1), (0, 1)])
        assert brute_force_centralized_distortion(inst, "fpm") == 1

    def test_equidistant_pair(self):
        inst = line_instance([F(-1, 2), F(1, 2)], [0, 1], [(0, 1)], [(0, 1), (1, 0)])
        assert brute_force_centralized_distortion(inst, "fpm") <= 3

    @pytest.mark.parametrize("kind", ["line", "graph"])
    def test_fpm_within_three(self, kind):
        for seed in range(150):
            inst = gen_random(5, 4, 2, kind=kind, seed=f"alpha:{seed}")
            assert brute_force_centralized_distortion(inst, "fpm") <= 3

    def test_pareto_matching_beta_on_self_top_instances(self):
        # Representative-style electorates: every voter sits exactly on a
        # candidate, realizing the zero-distance-to-top premise.
        for seed in range(150):
            base = gen_random(4, 6, 2, kind="line", seed=f"beta:{seed}")
            voter_points = base.candidate_points[: base.n]
            inst = Instance(
                partition=base.partition,
                profile=tuple(
                    tuple(sorted(range(base.m), key=lambda c: (base.metric.exact_key(p, base.candidate_points[c]), c)))
                    for p in voter_points
                ),
                metric=base.metric,
                voter_points=voter_points,
                candidate_points=base.candidate_points,
            )
            assert brute_force_centralized_distortion(inst, "fpmpar") <= 2

    def test_randomized_rule_rejected(self):
        inst = line_instance([0], [1], [(0,)], [(0,)])
        with pytest.raises(InvalidParams):
            brute_force_centralized_distortion(inst, "frd")
