"""Voting rules: domination graphs, matchings, Pareto chains, dictatorships."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distortion_lab import (
    domination_graph,
    gen_cyclic_avgmax,
    gen_randrand_avgavg,
    is_pareto_efficient,
    pareto_improve,
    plurality_matching,
    plurality_matching_pareto,
    random_dictatorship,
    uniform_over_groups,
)
from distortion_lab.rules import arbitrary_dictator, uniform_selection
from helpers import brute_force_pm_winner

F = Fraction


def random_profile(rng, n, m):
    return tuple(tuple(rng.sample(range(m), m)) for _ in range(n))


class TestDominationGraph:
    def test_two_voter_definition(self):
        ballots = ((0, 1), (1, 0))
        assert domination_graph(ballots, 0) == {(0, 0), (0, 1), (1, 0)}

    def test_everyones_top_is_complete(self):
        ballots = ((2, 0, 1), (2, 1, 0), (2, 0, 1))
        assert domination_graph(ballots, 2) == {(u, v) for u in range(3) for v in range(3)}

    def test_star_tree_hub_edges(self):
        gi = gen_randrand_avgavg(4)
        hub = gi.claimed_optimal
        edges = domination_graph(gi.instance.profile, hub)
        for i in range(4):
            for j in range(4):
                if i != j:
                    assert (i, j) in edges  # hub precedes voter j's top in ballot i


class TestPluralityMatching:
    def test_two_voter_tie_prefers_low_index(self):
        assert plurality_matching(((0, 1), (1, 0)), (0, 1)) == 0

    def test_unanimous_top_wins(self):
        ballots = ((2, 0, 1), (2, 1, 0))
        assert plurality_matching(ballots, (0, 1, 2)) == 2

    @pytest.mark.parametrize("seed", range(60))
    def test_matches_brute_force(self, seed):
        rng = random.Random(f"pm:{seed}")
        ballots = random_profile(rng, rng.randint(1, 5), rng.randint(1, 5))
        assert plurality_matching(ballots, ballots[0]) == brute_force_pm_winner(ballots)

    def test_winner_always_exists(self):
        rng = random.Random("pm-exists")
        for _ in range(500):
            ballots = random_profile(rng, rng.randint(1, 7), rng.randint(1, 6))
            plurality_matching(ballots, ballots[0])  # would raise on failure

    def test_tree_family_group_election(self):
        from distortion_lab import gen_randdet_avgavg

        gi = gen_randdet_avgavg(2)
        ballots = gi.instance.group_ballots(0)
        winner = plurality_matching(ballots, tuple(range(4)))
        assert winner == brute_force_pm_winner(ballots)
        assert winner in {gi.forced_representatives[0], gi.claimed_optimal}


class TestParetoEfficiency:
    def test_someones_top_is_efficient(self):
        ballots = ((0, 1, 2), (2, 1, 0))
        assert is_pareto_efficient(ballots, 0)
        assert is_pareto_efficient(ballots, 2)

    def test_unanimously_dominated(self):
        ballots = ((0, 1), (0, 1))
        assert not is_pareto_efficient(ballots, 1)

    def test_improve_is_identity_on_efficient(self):
        ballots = ((0, 1, 2), (2, 1, 0))
        assert pareto_improve(ballots, 0) == 0

    def test_improve_walks_unanimous_chain(self):
        ballots = ((0, 1, 2), (0, 1, 2))
        assert pareto_improve(ballots, 2) == 0

    @pytest.mark.parametrize("seed", range(40))
    def test_improve_output_is_efficient(self, seed):
        rng = random.Random(f"pi:{seed}")
        ballots = random_profile(rng, 5, 4)
        start = rng.randrange(4)
        assert is_pareto_efficient(ballots, pareto_improve(ballots, start))

    def test_pm_pareto_keeps_both_properties(self):
        rng = random.Random("fpmpar")
        for _ in range(1000):
            ballots = random_profile(rng, rng.randint(1, 5), 4)
            winner = plurality_matching_pareto(ballots, (0, 1, 2, 3))
            assert is_pareto_efficient(ballots, winner)
            # the perfect-matching property is asserted inside the rule

    def test_pm_pareto_two_voter(self):
        assert plurality_matching_pareto(((0, 1), (1, 0)), (0, 1)) == 0


class TestRandomizedRules:
    def test_random_dictatorship_counts_tops(self):
        dist = random_dictatorship(((0, 1), (0, 1), (1, 0)), (0, 1))
        assert dist == {0: F(2, 3), 1: F(1, 3)}

    def test_single_voter_point_mass(self):
        assert random_dictatorship(((1, 0),), (0, 1)) == {1: F(1)}

    def test_cyclic_profile_is_uniform(self):
        member = gen_cyclic_avgmax(5)[2]
        dist = random_dictatorship(member.instance.profile, tuple(range(5)))
        assert dist == {c: F(1, 5) for c in range(5)}

    def test_uniform_selection(self):
        assert uniform_selection((), (3, 5)) == {3: F(1, 2), 5: F(1, 2)}

    @given(st.lists(st.integers(0, 5), min_size=1, max_size=8))
    @settings(max_examples=60)
    def test_uniform_over_groups_accumulates(self, reps):
        dist = uniform_over_groups(reps)
        assert sum(dist.values()) == 1
        k = len(reps)
        for c, p in dist.items():
            assert p == F(reps.count(c), k)

    def test_uniform_over_groups_examples(self):
        assert uniform_over_groups((1, 2)) == {1: F(1, 2), 2: F(1, 2)}
        assert uniform_over_groups((0, 0)) == {0: F(1)}
        assert uniform_over_groups((0, 1, 1, 2)) == {0: F(1, 4), 1: F(1, 2), 2: F(1, 4)}

    @pytest.mark.parametrize("seed", range(20))
    def test_distributions_sum_to_one_exactly(self, seed):
        rng = random.Random(f"sum:{seed}")
        ballots = random_profile(rng, rng.randint(1, 6), rng.randint(1, 5))
        assert sum(random_dictatorship(ballots, ballots[0]).values()) == 1


class TestArbitraryDictator:
    def test_lowest_voter_top(self):
        assert arbitrary_dictator(((2, 0, 1), (1, 0, 2)), (0, 1, 2)) == 2

    def test_single_voter(self):
        assert arbitrary_dictator(((1, 0),), (0, 1)) == 1
