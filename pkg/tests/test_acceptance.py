"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s``.  Rational-family checks
use exact arithmetic (tolerance zero); Euclidean checks use 1e-9.
"""

import math
import random
import subprocess
import sys
import time
from contextlib import contextmanager
from fractions import Fraction

from distortion_lab import (
    BUILTIN_BOUNDS,
    MechanismSpec,
    Objective,
    brute_force_centralized_distortion,
    build_bias_tournament,
    check_consistency,
    detdet_positional_witness,
    evaluate_lower_bound,
    euclidean_randdet_ratio,
    euclidean_randrand_ratio,
    gen_cyclic_avgmax,
    gen_detdet_maxavg,
    gen_euclidean_randdet,
    gen_euclidean_randrand,
    gen_randdet_avgavg,
    gen_randdet_maxavg,
    gen_randdet_xmax,
    gen_randrand_avgavg,
    gen_randrand_maxx,
    is_pareto_efficient,
    plurality_matching,
    plurality_matching_pareto,
    shortest_path_closure,
    validate_metric,
    verify_suite,
    verify_upper_bound,
)
from distortion_lab.audit import SuiteParams
from distortion_lab.metrics import GraphMetric
from distortion_lab.rules import _admits_perfect_matching

F = Fraction
FPM_FUR = MechanismSpec("fpm", "fur")
FRD_FUR = MechanismSpec("frd", "fur")

SUITE_10K = SuiteParams(count=10_000, seed="acceptance", max_n=8, max_m=6, max_k=4)


@contextmanager
def criterion(number: int, description: str, budget_seconds: float):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"criterion {number}: FAIL: {description}")
        raise
    elapsed = time.perf_counter() - start
    print(f"criterion {number}: PASS ({elapsed:.1f}s / budget {budget_seconds:.0f}s): {description}")
    assert elapsed < budget_seconds, f"criterion {number} exceeded its runtime budget"


def test_criterion_1_lower_bound_exactness():
    with criterion(1, "rational lower-bound families reproduce their ratios exactly", 5.0):
        pair = gen_randdet_xmax()
        assert evaluate_lower_bound(pair, FPM_FUR, Objective.MAX_MAX) == 3
        assert evaluate_lower_bound(pair, FPM_FUR, Objective.AVG_MAX) == 3

        cases = set()
        for sigma in ((0, 1, 2, 3), (0, 2, 1, 3), (2, 0, 1, 3)):
            gi = gen_randdet_maxavg("fpm", sigma)
            cases.add(gi.case)
            assert evaluate_lower_bound(gi, FPM_FUR, Objective.MAX_AVG) == 5
        assert cases == {"case1", "case2", "case3"}

        for k in range(2, 11):
            value = evaluate_lower_bound(gen_randdet_avgavg(k), FPM_FUR, Objective.AVG_AVG)
            assert value == 5 - F(2, k)

        assert evaluate_lower_bound(gen_randrand_maxx(), FRD_FUR, Objective.MAX_MAX) == 3
        assert evaluate_lower_bound(gen_randrand_maxx(), FRD_FUR, Objective.MAX_AVG) == 3

        for m in range(2, 11):
            value = evaluate_lower_bound(gen_cyclic_avgmax(m), FRD_FUR, Objective.AVG_MAX)
            assert value == 3 - F(2, m)

        for n in range(2, 11):
            value = evaluate_lower_bound(gen_randrand_avgavg(n), FRD_FUR, Objective.AVG_AVG)
            assert value == 3 - F(2, n)

        gi, stage_two = gen_detdet_maxavg("fpm")
        assert detdet_positional_witness(gi, stage_two) == 5


def test_criterion_2_euclidean_limits():
    with criterion(2, "Euclidean families match closed forms and approach their limits", 10.0):
        for t in range(1, 51):
            achieved = evaluate_lower_bound(gen_euclidean_randrand(t), FRD_FUR, Objective.AVG_AVG)
            assert abs(achieved - euclidean_randrand_ratio(t)) <= 1e-9
        assert euclidean_randrand_ratio(1000) > math.sqrt(5) - 0.01

        for m in range(2, 21):
            achieved = evaluate_lower_bound(gen_euclidean_randdet(m), FPM_FUR, Objective.AVG_AVG)
            assert abs(achieved - euclidean_randdet_ratio(m)) <= 1e-9
        assert euclidean_randdet_ratio(200) > 2 + math.sqrt(5) - 0.05


def test_criterion_3_upper_bound_property_suite():
    with criterion(3, "all nine built-in bounds hold on 10,000 random instances", 120.0):
        reports = verify_suite(list(BUILTIN_BOUNDS.values()), SUITE_10K)
        assert len(reports) == 9
        for name, report in reports.items():
            assert report.checked == 10_000
            assert report.ok, f"{name}: {len(report.violations)} violations"
            print(f"  {name}: max ratio {report.max_ratio}")


def test_criterion_4_plurality_matching_oracle():
    with criterion(4, "matching candidate exists; fpm <= 3; fpmpar keeps both properties", 60.0):
        for index, instance in SUITE_10K.instances():
            candidates = tuple(range(instance.m))
            winner = plurality_matching(instance.profile, candidates)
            assert winner in candidates
            ratio = brute_force_centralized_distortion(instance, "fpm")
            if isinstance(ratio, Fraction):
                assert ratio <= 3
            else:
                assert ratio <= 3 + 1e-9
            efficient = plurality_matching_pareto(instance.profile, candidates)
            assert is_pareto_efficient(instance.profile, efficient)
            assert _admits_perfect_matching(instance.profile, efficient)


def test_criterion_5_bias_tournament():
    with criterion(5, "tournaments complete with the pigeonhole in-degree bound", 30.0):
        def lowest_index_top(ballots, candidates, sizes=()):
            return min(b[0] for b in ballots)

        example = build_bias_tournament(lowest_index_top, range(3), (0, 1, 2))
        assert example.edges == frozenset({(0, 1), (0, 2), (1, 2)})

        for rule in ("fpm", "fpmpar", "dictator"):
            for m in range(3, 9):
                rng = random.Random(f"acceptance-tournament:{rule}:{m}")
                for _ in range(100):
                    sigma = tuple(rng.sample(range(m), m))
                    tour = build_bias_tournament(rule, range(m), sigma)
                    assert len(tour.edges) == m * (m - 1) // 2
                    _, degree = tour.max_indegree_candidate()
                    assert degree >= math.ceil((m - 1) / 2)


def test_criterion_6_tightness_margins():
    with criterion(6, "adversarial-family ratios meet their upper bounds with margin zero", 10.0):
        avgavg = verify_upper_bound(
            BUILTIN_BOUNDS["fpm-fur-avgavg"],
            [gen_randdet_avgavg(k).instance for k in range(2, 11)],
        )
        assert avgavg.ok and all(row.margin == 0 for row in avgavg.rows)

        maxavg = verify_upper_bound(
            BUILTIN_BOUNDS["fpm-fur-maxavg"],
            [gen_randdet_maxavg("fpm", sigma).instance
             for sigma in ((0, 1, 2, 3), (0, 2, 1, 3), (2, 0, 1, 3))],
        )
        assert maxavg.ok and all(row.margin == 0 for row in maxavg.rows)


def test_criterion_7_validators_and_mutations():
    with criterion(7, "metric/consistency validators pass; adjacent-swap mutations flip", 90.0):
        for index, instance in SUITE_10K.instances():
            assert validate_metric(instance.metric) is None
            if isinstance(instance.metric, GraphMetric):
                closed = shortest_path_closure(instance.metric.graph)
                assert validate_metric(closed) is None

        members = [gen_randdet_xmax(), gen_randdet_maxavg(), gen_randdet_avgavg(4),
                   gen_randrand_maxx(), gen_randrand_avgavg(4), gen_detdet_maxavg()[0],
                   gen_euclidean_randrand(3), gen_euclidean_randdet(3)]
        members.extend(gen_cyclic_avgmax(5))
        for gi in members:
            for inst in gi.variants:
                assert check_consistency(inst.profile, inst.metric, inst.voter_points, inst.candidate_points)

        flips, attempts = 0, 0
        rng = random.Random("acceptance-mutations")
        while flips < 100:
            attempts += 1
            assert attempts < 5000, "could not find 100 strictly separated pairs"
            instance = SUITE_10K.instance(10_000 + attempts)
            v = rng.randrange(instance.n)
            ballot = list(instance.profile[v])
            strict = [
                i for i in range(len(ballot) - 1)
                if instance.voter_key(v, ballot[i]) < instance.voter_key(v, ballot[i + 1])
            ]
            if not strict:
                continue
            i = rng.choice(strict)
            ballot[i], ballot[i + 1] = ballot[i + 1], ballot[i]
            mutated = instance.profile[:v] + (tuple(ballot),) + instance.profile[v + 1:]
            assert not check_consistency(
                mutated, instance.metric, instance.voter_points, instance.candidate_points
            )
            flips += 1
        assert flips == 100


def test_criterion_8_cli_determinism(tmp_path):
    with criterion(8, "seeded CLI runs produce byte-identical CSV/JSON outputs", 60.0):
        def run_twice(*argv_template):
            blobs = []
            for tag in ("r1", "r2"):
                outdir = tmp_path / tag
                outdir.mkdir(exist_ok=True)
                argv = [arg.format(dir=outdir) for arg in argv_template]
                proc = subprocess.run(
                    [sys.executable, "-m", "distortion_lab.cli", *argv],
                    capture_output=True, text=True,
                )
                assert proc.returncode == 0, proc.stderr
                blobs.append(b"".join(sorted(p.read_bytes() for p in outdir.iterdir())))
            assert blobs[0] == blobs[1]

        run_twice("gen", "--family", "random", "--n", "6", "--m", "4", "--k", "2",
                  "--seed", "7", "--kind", "graph", "--out", "{dir}/inst.json")
        run_twice("gen", "--family", "randdet-avgavg", "--k", "4", "--out", "{dir}/tree.json")
        run_twice("verify", "--bound", "all", "--count", "40", "--seed", "5",
                  "--csv", "{dir}/v.csv", "--json", "{dir}/v.json")
        run_twice("search", "--in", "frd", "--over", "fur", "--objective", "maxmax",
                  "--sampler", "mixed", "--iterations", "40", "--seed", "5",
                  "--csv", "{dir}/s.csv", "--out", "{dir}/s.json")
        run_twice("tournament", "--rule", "fpm", "--m", "5", "--sigma", "random:3",
                  "--out", "{dir}/t.json")
