"""The four cost objectives and optimal-candidate computation.

Every objective composes an in-group aggregator with an across-group
aggregator, each either the mean or the max, so all four share a single
implementation.  Costs are exact rationals on rational metrics and floats on
Euclidean ones.  Ties in any argmin/argmax resolve to the lowest index.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction

from .model import Instance

CostValue = Fraction | float


def _mean(values) -> CostValue:
    values = list(values)
    return sum(values) / len(values)


def _max(values) -> CostValue:
    return max(values)


class Objective(Enum):
    AVG_AVG = "avgavg"
    AVG_MAX = "avgmax"
    MAX_AVG = "maxavg"
    MAX_MAX = "maxmax"

    @property
    def inner(self):
        """Aggregator applied within each group."""
        return _max if self in (Objective.AVG_MAX, Objective.MAX_MAX) else _mean

    @property
    def outer(self):
        """Aggregator applied across groups."""
        return _max if self in (Objective.MAX_AVG, Objective.MAX_MAX) else _mean

    @classmethod
    def parse(cls, name: str) -> "Objective":
        return cls(name.lower())


ALL_OBJECTIVES = tuple(Objective)


def group_cost(objective: Objective, instance: Instance, gid: int, c: int) -> CostValue:
    """Cost of candidate ``c`` restricted to one group (mean or max of the
    member distances, as the objective dictates)."""
    return objective.inner(instance.d(v, c) for v in instance.partition.groups[gid])


def cost(objective: Objective, instance: Instance, c: int) -> CostValue:
    return objective.outer(group_cost(objective, instance, gid, c) for gid in range(instance.k))


def optimal_candidate(objective: Objective, instance: Instance) -> tuple[int, CostValue]:
    """Candidate minimizing the objective; ties broken by ascending index."""
    best, best_cost = 0, cost(objective, instance, 0)
    for c in range(1, instance.m):
        value = cost(objective, instance, c)
        if value < best_cost:
            best, best_cost = c, value
    return best, best_cost


def farthest_voter(instance: Instance, c: int, gid: int | None = None) -> int:
    """Voter at maximum distance from ``c``, within group ``gid`` or overall;
    ties broken by ascending voter index."""
    voters = instance.partition.groups[gid] if gid is not None else range(instance.n)
    best, best_d = None, None
    for v in voters:
        dv = instance.voter_key(v, c)
        if best_d is None or dv > best_d:
            best, best_d = v, dv
    assert best is not None
    return best


def worst_group(instance: Instance, c: int) -> int:
    """Group with the highest average cost of ``c``; ties to the lowest id."""
    best, best_cost = 0, group_cost(Objective.AVG_AVG, instance, 0, c)
    for gid in range(1, instance.k):
        value = group_cost(Objective.AVG_AVG, instance, gid, c)
        if value > best_cost:
            best, best_cost = gid, value
    return best


def cost_table(instance: Instance) -> dict[Objective, list[CostValue]]:
    """All four objective costs for every candidate, computed off a single
    distance pass (the hot path for audits over many instances)."""
    groups = instance.partition.groups
    table: dict[Objective, list[CostValue]] = {obj: [] for obj in ALL_OBJECTIVES}
    for c in range(instance.m):
        by_group = [[instance.d(v, c) for v in g] for g in groups]
        avg = [sum(ds) / len(ds) for ds in by_group]
        mx = [max(ds) for ds in by_group]
        table[Objective.AVG_AVG].append(sum(avg) / len(avg))
        table[Objective.AVG_MAX].append(sum(mx) / len(mx))
        table[Objective.MAX_AVG].append(max(avg))
        table[Objective.MAX_MAX].append(max(mx))
    return table
