"""Centralized voting rules used as in-group or over-group components.

A rule sees only ordinal data: the ballots of the voters it serves, the
candidate set, and group-size context (carried for future rules; none of the
implemented rules read it).  Deterministic rules return a candidate id;
randomized rules return an exact outcome distribution whose rational weights
sum to one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .errors import CycleDetected, NoMatchingCandidate
from .model import Ballot, Profile

OutcomeDistribution = dict[int, Fraction]


def _positions(ballot: Ballot) -> dict[int, int]:
    return {c: i for i, c in enumerate(ballot)}


def domination_graph(ballots: Sequence[Ballot], c: int) -> set[tuple[int, int]]:
    """Bipartite voter-by-voter edge set for candidate ``c``: edge ``(u, v)``
    iff voter ``u`` weakly prefers ``c`` to voter ``v``'s top choice (weakly
    includes the case where ``c`` is that top choice)."""
    pos = [_positions(b) for b in ballots]
    tops = [b[0] for b in ballots]
    return {
        (u, v)
        for u in range(len(ballots))
        for v in range(len(ballots))
        if pos[u][c] <= pos[u][tops[v]]
    }


def _has_perfect_matching(n: int, adj: Sequence[Sequence[int]]) -> bool:
    """Augmenting-path matching on an n-by-n bipartite graph; O(V*E) is
    plenty at desk scale."""
    match_right = [-1] * n

    def augment(u: int, seen: list[bool]) -> bool:
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                if match_right[v] == -1 or augment(match_right[v], seen):
                    match_right[v] = u
                    return True
        return False

    for u in range(n):
        if not augment(u, [False] * n):
            return False
    return True


def _admits_perfect_matching(ballots: Sequence[Ballot], c: int) -> bool:
    n = len(ballots)
    pos = [_positions(b) for b in ballots]
    tops = [b[0] for b in ballots]
    adj = [[v for v in range(n) if pos[u][c] <= pos[u][tops[v]]] for u in range(n)]
    return _has_perfect_matching(n, adj)


def plurality_matching(ballots: Profile, candidates: Sequence[int], sizes: Sequence[int] = ()) -> int:
    """Lowest-indexed candidate whose domination graph admits a perfect
    matching.  Such a candidate always exists; its absence is surfaced as
    :class:`NoMatchingCandidate` rather than swallowed."""
    for c in sorted(candidates):
        if _admits_perfect_matching(ballots, c):
            return c
    raise NoMatchingCandidate(f"no candidate among {sorted(candidates)} admits a perfect matching")


def is_pareto_efficient(ballots: Sequence[Ballot], c: int) -> bool:
    """True iff no candidate is preferred to ``c`` by every voter."""
    pos = [_positions(b) for b in ballots]
    for x in ballots[0]:
        if x != c and all(p[x] < p[c] for p in pos):
            return False
    return True


def pareto_improve(ballots: Sequence[Ballot], c: int) -> int:
    """Follow unanimous improvements from ``c`` until reaching an efficient
    candidate (``c`` itself when already efficient).  Each step moves
    strictly up every ballot, so the chain of length > m would be a bug."""
    pos = [_positions(b) for b in ballots]
    for _ in range(len(ballots[0]) + 1):
        dominators = [x for x in ballots[0] if x != c and all(p[x] < p[c] for p in pos)]
        if not dominators:
            return c
        c = min(dominators)
    raise CycleDetected("unanimous-improvement chain did not terminate")


def plurality_matching_pareto(ballots: Profile, candidates: Sequence[int], sizes: Sequence[int] = ()) -> int:
    """Pareto-efficient variant: unanimous improvements preserve the perfect
    matching, so the result keeps both properties (asserted)."""
    winner = pareto_improve(ballots, plurality_matching(ballots, candidates, sizes))
    assert is_pareto_efficient(ballots, winner)
    assert _admits_perfect_matching(ballots, winner)
    return winner


def random_dictatorship(ballots: Profile, candidates: Sequence[int], sizes: Sequence[int] = ()) -> OutcomeDistribution:
    """Uniformly random voter's top choice, as an exact distribution."""
    n = len(ballots)
    dist: OutcomeDistribution = {}
    for b in ballots:
        dist[b[0]] = dist.get(b[0], Fraction(0)) + Fraction(1, n)
    return dist


def uniform_selection(ballots: Profile, candidates: Sequence[int], sizes: Sequence[int] = ()) -> OutcomeDistribution:
    """Uniform over the candidate set."""
    m = len(candidates)
    return {c: Fraction(1, m) for c in candidates}


def uniform_over_groups(representatives: Sequence[int]) -> OutcomeDistribution:
    """Uniform weight 1/k per group slot; duplicate representatives
    accumulate mass."""
    k = len(representatives)
    dist: OutcomeDistribution = {}
    for rep in representatives:
        dist[rep] = dist.get(rep, Fraction(0)) + Fraction(1, k)
    return dist


def arbitrary_dictator(ballots: Profile, candidates: Sequence[int], sizes: Sequence[int] = ()) -> int:
    """Top choice of the lowest-indexed voter (the fixed 'arbitrary' pick,
    so outputs are reproducible)."""
    return ballots[0][0]


@dataclass(frozen=True)
class Rule:
    name: str
    randomized: bool
    fn: Callable


RULES: Mapping[str, Rule] = {
    "fpm": Rule("fpm", False, plurality_matching),
    "fpmpar": Rule("fpmpar", False, plurality_matching_pareto),
    "frd": Rule("frd", True, random_dictatorship),
    "fur": Rule("fur", True, uniform_selection),
    "dictator": Rule("dictator", False, arbitrary_dictator),
}


def get_rule(name: str) -> Rule:
    try:
        return RULES[name]
    except KeyError:
        raise KeyError(f"unknown rule {name!r}; known: {', '.join(sorted(RULES))}") from None
