"""Core domain model: voters, candidates, groups, profiles, instances.

Indices are 0-based everywhere in code; report renderers add 1 so that
printed names (``c1``, ``v2``) match the usual convention.  All values are
immutable after construction and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidParams, UnknownCandidate
from .metrics import Metric

Ballot = tuple[int, ...]
Profile = tuple[Ballot, ...]


def promote(ordering: Ballot, c: int) -> Ballot:
    """Move ``c`` to the front of a strict order, keeping all other relative
    positions.  Idempotent; raises :class:`UnknownCandidate` if absent."""
    if c not in ordering:
        raise UnknownCandidate(f"candidate {c} not in ordering {ordering}")
    return (c,) + tuple(x for x in ordering if x != c)


@dataclass(frozen=True)
class GroupPartition:
    """Partition of voters ``0..n-1`` into k disjoint non-empty groups."""

    groups: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen: set[int] = set()
        for g in self.groups:
            if not g:
                raise InvalidParams("empty group")
            if tuple(sorted(g)) != g:
                raise InvalidParams(f"group {g} not sorted")
            if seen.intersection(g):
                raise InvalidParams("groups are not disjoint")
            seen.update(g)
        if seen != set(range(len(seen))):
            raise InvalidParams("group union is not a dense voter range")

    @property
    def k(self) -> int:
        return len(self.groups)

    @property
    def num_voters(self) -> int:
        return sum(len(g) for g in self.groups)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(g) for g in self.groups)

    @property
    def max_size(self) -> int:
        return max(self.sizes)


@dataclass(frozen=True)
class Instance:
    """A distributed-voting instance: partitioned voters, candidates, a
    preference profile, and a metric placement for every entity."""

    partition: GroupPartition
    profile: Profile
    metric: Metric
    voter_points: tuple[int, ...]
    candidate_points: tuple[int, ...]

    def __post_init__(self):
        n, m = len(self.voter_points), len(self.candidate_points)
        if self.partition.num_voters != n:
            raise InvalidParams(f"partition covers {self.partition.num_voters} voters, expected {n}")
        if len(self.profile) != n:
            raise InvalidParams(f"profile has {len(self.profile)} ballots, expected {n}")
        full = tuple(range(m))
        for v, ballot in enumerate(self.profile):
            if tuple(sorted(ballot)) != full:
                raise InvalidParams(f"ballot of voter {v} is not a permutation of 0..{m - 1}")
        for p in self.voter_points + self.candidate_points:
            if not 0 <= p < self.metric.num_points:
                raise InvalidParams(f"placement point {p} outside metric with {self.metric.num_points} points")

    @property
    def n(self) -> int:
        return len(self.voter_points)

    @property
    def m(self) -> int:
        return len(self.candidate_points)

    @property
    def k(self) -> int:
        return self.partition.k

    def d(self, voter: int, candidate: int) -> Fraction | float:
        """Cost of ``candidate`` for ``voter`` (float only for Euclidean)."""
        return self.metric.distance(self.voter_points[voter], self.candidate_points[candidate])

    def voter_key(self, voter: int, candidate: int) -> Fraction:
        """Exact rational key ordering candidates by distance from ``voter``."""
        return self.metric.exact_key(self.voter_points[voter], self.candidate_points[candidate])

    def candidate_key(self, a: int, b: int) -> Fraction:
        """Exact rational key for the distance between two candidates."""
        return self.metric.exact_key(self.candidate_points[a], self.candidate_points[b])

    def top(self, voter: int) -> int:
        return self.profile[voter][0]

    def group_of(self, voter: int) -> int:
        for gid, g in enumerate(self.partition.groups):
            if voter in g:
                return gid
        raise InvalidParams(f"voter {voter} not in any group")

    def group_ballots(self, gid: int) -> Profile:
        return tuple(self.profile[v] for v in self.partition.groups[gid])


def derive_profile(
    metric: Metric,
    voter_points: tuple[int, ...],
    candidate_points: tuple[int, ...],
) -> Profile:
    """Rank candidates per voter by increasing distance; exact ties broken by
    ascending candidate index."""
    m = len(candidate_points)
    return tuple(
        tuple(sorted(range(m), key=lambda c: (metric.exact_key(vp, candidate_points[c]), c)))
        for vp in voter_points
    )


def check_consistency(
    profile: Profile,
    metric: Metric,
    voter_points: tuple[int, ...],
    candidate_points: tuple[int, ...],
) -> bool:
    """Weak consistency: a strictly closer candidate must come first; exact
    ties may appear in either order.

    Equivalent to distances being non-decreasing along each ballot, so hand
    specified profiles that pick a side at tie points are accepted.
    """
    for v, ballot in enumerate(profile):
        vp = voter_points[v]
        keys = [metric.exact_key(vp, candidate_points[c]) for c in ballot]
        for a, b in zip(keys, keys[1:]):
            if a > b:
                return False
    return True
