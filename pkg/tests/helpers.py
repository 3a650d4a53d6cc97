"""Shared test helpers: tiny instance builders and independent oracles.

Oracles here stay deliberately naive (exhaustive enumeration, raw coordinate
arithmetic) so they cannot share a bug with the code paths they check.
"""

from fractions import Fraction
from itertools import permutations

from distortion_lab import GroupPartition, Instance, LineMetric


def line_instance(voter_positions, candidate_positions, groups, profile) -> Instance:
    voters = tuple(Fraction(p) for p in voter_positions)
    candidates = tuple(Fraction(p) for p in candidate_positions)
    return Instance(
        partition=GroupPartition(tuple(tuple(g) for g in groups)),
        profile=tuple(tuple(b) for b in profile),
        metric=LineMetric(voters + candidates),
        voter_points=tuple(range(len(voters))),
        candidate_points=tuple(range(len(voters), len(voters) + len(candidates))),
    )


def pair_on_line() -> Instance:
    """Two candidates at 0 and 1, voters at -1/2 and 1/2, one group."""
    return line_instance([Fraction(-1, 2), Fraction(1, 2)], [0, 1], [(0, 1)], [(0, 1), (1, 0)])


def three_on_line() -> Instance:
    """Three candidates at -1, 0, 1 with two single-voter groups."""
    return line_instance(
        [Fraction(-1, 2), Fraction(1, 2)], [-1, 0, 1], [(0,), (1,)], [(0, 1, 2), (2, 1, 0)]
    )


def brute_force_pm_winner(ballots):
    """Lowest-indexed candidate whose domination graph has a perfect
    matching, found by trying every right-side permutation."""
    n = len(ballots)
    pos = [{c: i for i, c in enumerate(b)} for b in ballots]
    tops = [b[0] for b in ballots]
    for c in sorted(ballots[0]):
        ok = any(
            all(pos[u][c] <= pos[u][tops[assignment[u]]] for u in range(n))
            for assignment in permutations(range(n))
        )
        if ok:
            return c
    return None


def raw_squared_distance(p, q) -> Fraction:
    return sum((a - b) * (a - b) for a, b in zip(p, q))
