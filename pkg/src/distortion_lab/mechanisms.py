"""Two-stage distributed mechanisms and their exact outcome distributions.

Stage one applies the in-group rule to each group's ballots over all
candidates.  Stage two aggregates: the uniform over-group rule mixes the
per-group distributions with weight 1/k each (so everything stays in closed
form even with a randomized first stage), while profile-dependent second
stages require concrete representatives and therefore a deterministic first
stage.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .errors import UnsupportedComposition
from .model import Ballot, Instance
from .objectives import CostValue, Objective, cost, optimal_candidate
from .rules import OutcomeDistribution, get_rule
from .serialize import instance_digest


class Scope(Enum):
    REPRESENTATIVES = "reps"
    ALL_CANDIDATES = "all"

    @classmethod
    def parse(cls, name: str) -> "Scope":
        return cls(name.lower())


@dataclass(frozen=True)
class MechanismSpec:
    """In-group rule + over-group rule + second-stage candidate scope."""

    in_rule: str
    over_rule: str
    scope: Scope = Scope.REPRESENTATIVES

    def validate(self) -> None:
        in_r, over_r = get_rule(self.in_rule), get_rule(self.over_rule)
        if self.scope is Scope.ALL_CANDIDATES and (in_r.randomized or over_r.randomized):
            raise UnsupportedComposition(
                "all-candidates scope is defined for deterministic stages only"
            )

    def label(self) -> str:
        suffix = "" if self.scope is Scope.REPRESENTATIVES else "/all"
        return f"({self.in_rule},{self.over_rule}){suffix}"


StageOneResult = tuple[OutcomeDistribution, ...]


def run_first_stage(instance: Instance, in_rule: str) -> StageOneResult:
    """Per-group distribution over representatives (point masses for a
    deterministic in-group rule)."""
    rule = get_rule(in_rule)
    results = []
    all_candidates = tuple(range(instance.m))
    for gid in range(instance.k):
        ballots = instance.group_ballots(gid)
        sizes = (len(ballots),)
        try:
            out = rule.fn(ballots, all_candidates, sizes)
        except Exception as exc:
            exc.args = (f"group {gid}: {exc}",)
            raise
        results.append(out if rule.randomized else {out: Fraction(1)})
    return tuple(results)


def _mix_uniformly(stage_one: StageOneResult) -> OutcomeDistribution:
    k = len(stage_one)
    mixed: OutcomeDistribution = {}
    for dist in stage_one:
        for c, p in dist.items():
            mixed[c] = mixed.get(c, Fraction(0)) + p / k
    return mixed


def _representative_ballot(instance: Instance, rep: int, candidates: tuple[int, ...], self_first: bool) -> Ballot:
    """Metric-induced ballot of a representative over ``candidates``; exact
    ties broken by index, except that with ``self_first`` the representative
    ranks itself first (its own distance is zero anyway)."""
    def key(c: int):
        if self_first:
            return (c != rep, instance.candidate_key(rep, c), c)
        return (instance.candidate_key(rep, c), c)

    return tuple(sorted(candidates, key=key))


def run_mechanism(
    instance: Instance, spec: MechanismSpec, stage_one: StageOneResult | None = None
) -> OutcomeDistribution:
    """Exact outcome distribution of the two-stage mechanism.

    ``stage_one`` may be supplied by callers that evaluate several
    mechanisms sharing an in-group rule on the same instance.
    """
    spec.validate()
    in_rule, over_rule = get_rule(spec.in_rule), get_rule(spec.over_rule)
    if stage_one is None:
        stage_one = run_first_stage(instance, spec.in_rule)

    if spec.over_rule == "fur":
        # Uniform over group slots: linear in the stage-one distributions.
        return _mix_uniformly(stage_one)
    if in_rule.randomized:
        raise UnsupportedComposition(
            f"randomized first stage ({spec.in_rule}) requires the uniform over-group rule, "
            f"not {spec.over_rule}"
        )

    reps = tuple(next(iter(dist)) for dist in stage_one)
    if spec.scope is Scope.ALL_CANDIDATES:
        candidates = tuple(range(instance.m))
        ballots = tuple(_representative_ballot(instance, r, candidates, self_first=False) for r in reps)
    else:
        candidates = tuple(sorted(set(reps)))
        ballots = tuple(_representative_ballot(instance, r, candidates, self_first=True) for r in reps)
    out = over_rule.fn(ballots, candidates, instance.partition.sizes)
    if over_rule.randomized:
        return dict(out)
    return {out: Fraction(1)}


def expected_cost(distribution: OutcomeDistribution, objective: Objective, instance: Instance) -> CostValue:
    """Probability-weighted objective cost; exact when both factors are
    rational."""
    total: CostValue = Fraction(0)
    for c in sorted(distribution):
        total += distribution[c] * cost(objective, instance, c)
    return total


@dataclass(frozen=True)
class DistortionReport:
    """Single-instance ratio of a mechanism's expected cost to the optimum."""

    mechanism: MechanismSpec
    objective: Objective
    expected: CostValue
    optimal: int
    optimal_cost: CostValue
    ratio: CostValue | None
    unbounded: bool
    exact: bool
    digest: str

    def to_dict(self) -> dict:
        def fmt(x):
            return str(x) if isinstance(x, Fraction) else x

        return {
            "mechanism": {"in": self.mechanism.in_rule, "over": self.mechanism.over_rule,
                          "scope": self.mechanism.scope.value},
            "objective": self.objective.value,
            "expected_cost": fmt(self.expected),
            "optimal_candidate": f"c{self.optimal + 1}",
            "optimal_cost": fmt(self.optimal_cost),
            "ratio": fmt(self.ratio) if self.ratio is not None else None,
            "unbounded": self.unbounded,
            "exact": self.exact,
            "instance": self.digest,
        }


def distortion(instance: Instance, spec: MechanismSpec, objective: Objective) -> DistortionReport:
    """Evaluate the mechanism and compare against the optimal candidate."""
    outcome = run_mechanism(instance, spec)
    expected = expected_cost(outcome, objective, instance)
    opt, opt_cost = optimal_candidate(objective, instance)
    unbounded = False
    ratio: CostValue | None
    if opt_cost == 0:
        if expected == 0:
            ratio = Fraction(1)
        else:
            ratio, unbounded = None, True
    else:
        ratio = expected / opt_cost
    exact = isinstance(expected, Fraction) and isinstance(opt_cost, Fraction)
    return DistortionReport(
        mechanism=spec,
        objective=objective,
        expected=expected,
        optimal=opt,
        optimal_cost=opt_cost,
        ratio=ratio,
        unbounded=unbounded,
        exact=exact,
        digest=instance_digest(instance),
    )
