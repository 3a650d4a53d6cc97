"""Bias tournament of a deterministic rule.

For each candidate pair (u, w) the rule is queried on a two-voter election
whose ballots promote u resp. w to the front of a shared ordering sigma; the
winner receives the directed edge.  A candidate with many incoming edges is
one the rule's tie-breaking tends to reject, which is exactly what the
adversarial instance families exploit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import IndecisiveRule
from .model import Ballot, promote
from .rules import RULES, Rule


@dataclass(frozen=True)
class BiasTournament:
    """Complete directed graph over candidates: one edge per unordered pair,
    no self-loops."""

    candidates: tuple[int, ...]
    sigma: Ballot
    edges: frozenset[tuple[int, int]]

    def in_degree(self, c: int) -> int:
        return sum(1 for _, w in self.edges if w == c)

    def max_indegree_candidate(self) -> tuple[int, int]:
        """Candidate of maximum in-degree (ties lowest index).  Pigeonhole
        over m(m-1)/2 edges guarantees in-degree >= ceil((m-1)/2)."""
        best = min(self.candidates, key=lambda c: (-self.in_degree(c), c))
        degree = self.in_degree(best)
        assert degree >= len(self.candidates) // 2, "pigeonhole bound violated"
        return best, degree

    def losers_against(self, c: int) -> set[int]:
        """Candidates with a directed edge into ``c`` (they defeat it)."""
        return {u for u, w in self.edges if w == c}


def build_bias_tournament(
    rule: str | Rule | Callable,
    candidates: Sequence[int],
    sigma: Ballot,
) -> BiasTournament:
    """Query ``rule`` on every promoted pair election and collect the edges.

    Pairs are enumerated index-ascending (u < w) with the u-top ballot
    first; a rule returning anything outside the pair raises
    :class:`IndecisiveRule`.
    """
    if isinstance(rule, str):
        rule = RULES[rule]
    fn = rule.fn if isinstance(rule, Rule) else rule
    candidates = tuple(sorted(candidates))
    if set(sigma) != set(candidates):
        raise ValueError("sigma must order exactly the tournament candidates")
    edges = set()
    for i, u in enumerate(candidates):
        for w in candidates[i + 1 :]:
            ballots = (promote(promote(sigma, w), u), promote(promote(sigma, u), w))
            winner = fn(ballots, candidates, (2,))
            if winner == u:
                edges.add((u, w))
            elif winner == w:
                edges.add((w, u))
            else:
                raise IndecisiveRule(u, w, winner)
    return BiasTournament(candidates, tuple(sigma), frozenset(edges))
