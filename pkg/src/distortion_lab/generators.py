"""Adversarial instance families and the random-instance sampler.

Each family constructor re-derives its claimed costs through the objectives
module before returning, so a generated instance that disagrees with its own
claims never escapes.  Profiles at tie points are emitted explicitly (not
derived): the constructions rely on a specific choice among the consistent
orders, which the weak consistency checker accepts.

Tournament-driven families take the deterministic in-group rule they are
tailored to plus a base ordering sigma; the rule's bias tournament picks the
"losing" candidate that the construction buries.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import GeneratorClaimError, InvalidParams
from .mechanisms import run_first_stage
from .metrics import EuclideanMetric, Graph, GraphMetric, LineMetric, validate_metric
from .model import Ballot, GroupPartition, Instance, Profile, check_consistency, derive_profile, promote
from .objectives import CostValue, Objective, cost, optimal_candidate
from .tournament import build_bias_tournament

_EUCLID_TOL = 1e-9


def _close(a: CostValue, b: CostValue) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(float(a) - float(b)) <= _EUCLID_TOL


@dataclass(frozen=True)
class GeneratedInstance:
    """An instance family member together with its construction claims.

    ``variants`` lists the adversary's interchangeable metric/profile
    choices (usually one); a mechanism is scored against the worst of them.
    """

    family: str
    variants: tuple[Instance, ...]
    objectives: tuple[Objective, ...]
    claimed_optimal: int
    claimed_optimal_cost: CostValue
    claimed_ratio: CostValue
    forced_representatives: tuple[int, ...] | None = None
    in_rule: str | None = None
    case: str | None = None
    params: dict = field(default_factory=dict, compare=False)

    @property
    def instance(self) -> Instance:
        return self.variants[0]


def _verify_claims(gi: GeneratedInstance, check_rep_ratio: bool = True) -> GeneratedInstance:
    for idx, inst in enumerate(gi.variants):
        violation = validate_metric(inst.metric)
        if violation is not None:
            raise GeneratorClaimError(f"{gi.family}: variant {idx} metric invalid: {violation}")
        if not check_consistency(inst.profile, inst.metric, inst.voter_points, inst.candidate_points):
            raise GeneratorClaimError(f"{gi.family}: variant {idx} profile inconsistent with metric")
    primary = gi.instance
    for obj in gi.objectives:
        opt, opt_cost = optimal_candidate(obj, primary)
        if opt != gi.claimed_optimal or not _close(opt_cost, gi.claimed_optimal_cost):
            raise GeneratorClaimError(
                f"{gi.family}: optimum under {obj.value} is c{opt + 1} at {opt_cost}, "
                f"claimed c{gi.claimed_optimal + 1} at {gi.claimed_optimal_cost}"
            )
    if gi.forced_representatives is not None:
        if gi.in_rule is not None:
            stage = run_first_stage(primary, gi.in_rule)
            if any(len(dist) != 1 for dist in stage):
                raise GeneratorClaimError(f"{gi.family}: in-rule {gi.in_rule} is not deterministic")
            reps = tuple(next(iter(dist)) for dist in stage)
        else:
            # Single-voter groups: any finite-distortion in-group rule must
            # return the member's top choice.
            reps = tuple(primary.top(g[0]) for g in primary.partition.groups)
        if reps != gi.forced_representatives:
            raise GeneratorClaimError(
                f"{gi.family}: stage one picked {reps}, construction needs {gi.forced_representatives}"
            )
        if check_rep_ratio:
            for obj in gi.objectives:
                for rep in gi.forced_representatives:
                    ratio = cost(obj, primary, rep) / gi.claimed_optimal_cost
                    if not _close(ratio, gi.claimed_ratio):
                        raise GeneratorClaimError(
                            f"{gi.family}: representative c{rep + 1} achieves {ratio} under "
                            f"{obj.value}, claimed {gi.claimed_ratio}"
                        )
    return gi


def _line_instance(
    voter_positions: tuple[Fraction, ...],
    candidate_positions: tuple[Fraction, ...],
    groups: tuple[tuple[int, ...], ...],
    profile: Profile,
) -> Instance:
    n = len(voter_positions)
    return Instance(
        partition=GroupPartition(groups),
        profile=profile,
        metric=LineMetric(voter_positions + candidate_positions),
        voter_points=tuple(range(n)),
        candidate_points=tuple(range(n, n + len(candidate_positions))),
    )


def _default_sigma(m: int, sigma: Ballot | None) -> Ballot:
    if sigma is None:
        return tuple(range(m))
    if tuple(sorted(sigma)) != tuple(range(m)):
        raise InvalidParams(f"sigma must be a permutation of 0..{m - 1}")
    return tuple(sigma)


# ---------------------------------------------------------------------------
# Deterministic first stage, randomized second stage
# ---------------------------------------------------------------------------

def gen_randdet_xmax() -> GeneratedInstance:
    """Two candidates on a line with one voter at the midpoint tie.

    Whichever candidate a mechanism makes representative, one of the two
    mirror-image metrics consistent with the same profile makes that choice
    three times worse than the optimum, for both max-family objectives.
    """
    half = Fraction(1, 2)
    profile: Profile = ((0, 1), (1, 0))
    groups = ((0, 1),)
    primary = _line_instance((-half, half), (Fraction(0), Fraction(1)), groups, profile)
    mirror = _line_instance((half, -half), (Fraction(1), Fraction(0)), groups, profile)
    gi = GeneratedInstance(
        family="randdet-xmax",
        variants=(primary, mirror),
        objectives=(Objective.AVG_MAX, Objective.MAX_MAX),
        claimed_optimal=0,
        claimed_optimal_cost=half,
        claimed_ratio=Fraction(3),
    )
    _verify_claims(gi)
    for obj in gi.objectives:
        if cost(obj, primary, 1) / cost(obj, primary, 0) != 3:
            raise GeneratorClaimError("randdet-xmax: primary ratio is not 3")
        if cost(obj, mirror, 0) / cost(obj, mirror, 1) != 3:
            raise GeneratorClaimError("randdet-xmax: mirror ratio is not 3")
    return gi


def gen_randdet_maxavg(in_rule: str = "fpm", sigma: Ballot | None = None) -> GeneratedInstance:
    """Four candidates, two two-voter groups on a line.

    The in-group rule's bias tournament yields a candidate defeated by two
    others; those defeaters are wedged around it so both group
    representatives cost five times the buried optimum under max-of-averages.
    The fourth candidate's position depends on where sigma ranks it, keeping
    the promoted ballots consistent; the fired case is recorded.
    """
    sigma = _default_sigma(4, sigma)
    tour = build_bias_tournament(in_rule, range(4), sigma)
    loser, degree = tour.max_indegree_candidate()
    if degree < 2:
        raise InvalidParams(f"{in_rule}: no candidate with in-degree >= 2")
    first, second = sorted(tour.losers_against(loser))[:2]
    spos = {c: i for i, c in enumerate(sigma)}
    a, b = sorted((first, second), key=spos.get)
    rest = ({0, 1, 2, 3} - {loser, a, b}).pop()
    if spos[rest] > spos[b]:
        case, rest_pos = "case1", Fraction(10)
    elif spos[rest] > spos[a]:
        case, rest_pos = "case2", Fraction(-1)
    else:
        case, rest_pos = "case3", Fraction(1)
    candidate_pos = {a: Fraction(-1), loser: Fraction(0), b: Fraction(1), rest: rest_pos}
    half = Fraction(1, 2)
    profile = (
        promote(promote(sigma, loser), a),
        promote(promote(sigma, a), loser),
        promote(promote(sigma, b), loser),
        promote(promote(sigma, loser), b),
    )
    instance = _line_instance(
        (-half, Fraction(0), Fraction(0), half),
        tuple(candidate_pos[c] for c in range(4)),
        ((0, 1), (2, 3)),
        profile,
    )
    return _verify_claims(
        GeneratedInstance(
            family="randdet-maxavg",
            variants=(instance,),
            objectives=(Objective.MAX_AVG,),
            claimed_optimal=loser,
            claimed_optimal_cost=Fraction(1, 4),
            claimed_ratio=Fraction(5),
            forced_representatives=(a, b),
            in_rule=in_rule,
            case=case,
        )
    )


def gen_randdet_avgavg(k: int, in_rule: str = "fpm", sigma: Ballot | None = None) -> GeneratedInstance:
    """2k candidates and k two-voter groups on a tree metric.

    The tournament loser sits on the hub next to half of each group; the k
    defeaters sit one edge past the other half, costing (5 - 2/k)/2 each
    against the loser's 1/2.
    """
    if k < 2:
        raise InvalidParams("k must be at least 2")
    m = 2 * k
    sigma = _default_sigma(m, sigma)
    tour = build_bias_tournament(in_rule, range(m), sigma)
    loser, degree = tour.max_indegree_candidate()
    if degree < k:
        raise InvalidParams(f"{in_rule}: no candidate with in-degree >= {k}")
    defeaters = tuple(sorted(tour.losers_against(loser))[:k])
    extras = tuple(sorted(set(range(m)) - {loser} - set(defeaters)))

    edges = []
    for branch in range(k + 1):
        edges.append((0, 2 * branch + 1, Fraction(1)))
        edges.append((2 * branch + 1, 2 * branch + 2, Fraction(1)))
    metric = GraphMetric(Graph(2 * k + 3, tuple(edges)))

    candidate_vertex = {loser: 0}
    for j, d in enumerate(defeaters):
        candidate_vertex[d] = 2 * j + 2
    for e in extras:
        candidate_vertex[e] = 2 * k + 2

    voter_points, ballots, groups = [], [], []
    for j, d in enumerate(defeaters):
        voter_points += [0, 2 * j + 1]
        ballots.append(promote(promote(sigma, d), loser))
        ballots.append(promote(promote(sigma, loser), d))
        groups.append((2 * j, 2 * j + 1))

    instance = Instance(
        partition=GroupPartition(tuple(groups)),
        profile=tuple(ballots),
        metric=metric,
        voter_points=tuple(voter_points),
        candidate_points=tuple(candidate_vertex[c] for c in range(m)),
    )
    return _verify_claims(
        GeneratedInstance(
            family="randdet-avgavg",
            variants=(instance,),
            objectives=(Objective.AVG_AVG,),
            claimed_optimal=loser,
            claimed_optimal_cost=Fraction(1, 2),
            claimed_ratio=Fraction(5 * k - 2, k),
            forced_representatives=defeaters,
            in_rule=in_rule,
            params={"k": k},
        )
    )


# ---------------------------------------------------------------------------
# Randomized both stages
# ---------------------------------------------------------------------------

def gen_randrand_maxx() -> GeneratedInstance:
    """Three candidates on a line, two single-voter groups.

    The representatives are pinned to the outer candidates, each three times
    as bad as the middle one under both max-family objectives.
    """
    half = Fraction(1, 2)
    instance = _line_instance(
        (-half, half),
        (Fraction(-1), Fraction(0), Fraction(1)),
        ((0,), (1,)),
        ((0, 1, 2), (2, 1, 0)),
    )
    return _verify_claims(
        GeneratedInstance(
            family="randrand-maxx",
            variants=(instance,),
            objectives=(Objective.MAX_AVG, Objective.MAX_MAX),
            claimed_optimal=1,
            claimed_optimal_cost=half,
            claimed_ratio=Fraction(3),
            forced_representatives=(0, 2),
        )
    )


def gen_cyclic_avgmax(m: int) -> list[GeneratedInstance]:
    """One cyclic profile shared by m single-group line instances.

    Instance i makes candidate i optimal at cost 1/2 and every other
    candidate cost 3/2, so a mechanism's expected cost on instance i is
    3/2 - p_i; some instance in the family forces a ratio of 3 - 2/m.
    """
    if m < 2:
        raise InvalidParams("m must be at least 2")
    half = Fraction(1, 2)
    profile = tuple(tuple((i + j) % m for j in range(m)) for i in range(m))
    group = (tuple(range(m)),)
    family = []
    for i in range(m):
        instance = _line_instance(
            tuple(-half if v == i else half for v in range(m)),
            tuple(Fraction(0) if c == i else Fraction(1) for c in range(m)),
            group,
            profile,
        )
        family.append(
            _verify_claims(
                GeneratedInstance(
                    family="cyclic-avgmax",
                    variants=(instance,),
                    objectives=(Objective.AVG_MAX,),
                    claimed_optimal=i,
                    claimed_optimal_cost=half,
                    claimed_ratio=Fraction(3 * m - 2, m),
                    params={"m": m, "i": i},
                )
            )
        )
    return family


def gen_randrand_avgavg(k: int, sigma: Ballot | None = None) -> GeneratedInstance:
    """k single-voter groups on a star tree with a hub candidate.

    Every representative is the member's own branch candidate at average
    cost 3 - 2/n, while the hub candidate nobody represents costs 1.
    """
    if k < 2:
        raise InvalidParams("k must be at least 2")
    m = k + 1
    sigma = _default_sigma(m, sigma)
    hub = k
    edges = []
    for j in range(k):
        edges.append((0, 2 * j + 1, Fraction(1)))
        edges.append((2 * j + 1, 2 * j + 2, Fraction(1)))
    metric = GraphMetric(Graph(2 * k + 1, tuple(edges)))
    candidate_points = tuple(2 * j + 2 for j in range(k)) + (0,)
    voter_points = tuple(2 * j + 1 for j in range(k))
    profile = tuple(promote(promote(sigma, hub), j) for j in range(k))
    instance = Instance(
        partition=GroupPartition(tuple((j,) for j in range(k))),
        profile=profile,
        metric=metric,
        voter_points=voter_points,
        candidate_points=candidate_points,
    )
    return _verify_claims(
        GeneratedInstance(
            family="randrand-avgavg",
            variants=(instance,),
            objectives=(Objective.AVG_AVG,),
            claimed_optimal=hub,
            claimed_optimal_cost=Fraction(1),
            claimed_ratio=Fraction(3 * k - 2, k),
            forced_representatives=tuple(range(k)),
            params={"k": k},
        )
    )


# ---------------------------------------------------------------------------
# Deterministic both stages (second stage over all candidates)
# ---------------------------------------------------------------------------

def gen_detdet_maxavg(
    in_rule: str = "fpm", sigma: Ballot | None = None
) -> tuple[GeneratedInstance, tuple[Profile, Profile]]:
    """Four candidates, two two-voter groups on a 9-vertex cycle-with-chord
    graph, plus the two consistent second-stage representative profiles.

    The tournament loser is optimal at max-of-averages cost 1/2 while every
    other candidate costs 5/2.  The representative preferences tie between
    the loser and the spare candidate; the two second-stage profile variants
    resolve the tie both ways, and any fixed positional selection lands on a
    cost-5/2 winner in at least one of them.
    """
    sigma = _default_sigma(4, sigma)
    tour = build_bias_tournament(in_rule, range(4), sigma)
    loser, degree = tour.max_indegree_candidate()
    if degree < 2:
        raise InvalidParams(f"{in_rule}: no candidate with in-degree >= 2")
    a, b = sorted(tour.losers_against(loser))[:2]
    rest = ({0, 1, 2, 3} - {loser, a, b}).pop()

    ring = [(0, 1), (1, 2), (2, 7), (7, 6), (6, 8), (8, 4), (4, 5), (5, 0)]
    chord = [(0, 3), (3, 6)]
    metric = GraphMetric(Graph(9, tuple((u, v, Fraction(1)) for u, v in ring + chord)))
    candidate_vertex = {loser: 0, a: 2, b: 4, rest: 6}
    profile = (
        promote(promote(sigma, a), loser),
        promote(promote(sigma, loser), a),
        promote(promote(sigma, b), loser),
        promote(promote(sigma, loser), b),
    )
    instance = Instance(
        partition=GroupPartition(((0, 1), (2, 3))),
        profile=profile,
        metric=metric,
        voter_points=(0, 1, 0, 5),
        candidate_points=tuple(candidate_vertex[c] for c in range(4)),
    )
    gi = _verify_claims(
        GeneratedInstance(
            family="detdet-maxavg",
            variants=(instance,),
            objectives=(Objective.MAX_AVG,),
            claimed_optimal=loser,
            claimed_optimal_cost=Fraction(1, 2),
            claimed_ratio=Fraction(5),
            forced_representatives=(a, b),
            in_rule=in_rule,
        ),
        check_rep_ratio=False,
    )
    for c in (a, b, rest):
        if cost(Objective.MAX_AVG, instance, c) != Fraction(5, 2):
            raise GeneratorClaimError(f"detdet-maxavg: c{c + 1} does not cost 5/2")

    stage_two_variants = (
        ((a, loser, rest, b), (b, loser, rest, a)),
        ((a, rest, loser, b), (b, rest, loser, a)),
    )
    for variant in stage_two_variants:
        for rep, ballot in zip((a, b), variant):
            keys = [instance.candidate_key(rep, c) for c in ballot]
            if any(x > y for x, y in zip(keys, keys[1:])):
                raise GeneratorClaimError("detdet-maxavg: second-stage profile inconsistent")
    return gi, stage_two_variants


# ---------------------------------------------------------------------------
# Euclidean simplex families
# ---------------------------------------------------------------------------

def euclidean_randrand_ratio(t: int) -> float:
    """Closed-form adversarial ratio of the randomized-stages simplex family;
    increases toward sqrt(5)."""
    s = math.sqrt(t / (t + 1))
    far = math.sqrt((5 * t + 4) / (4 * t + 4))
    return (t / (t + 1) * far + s / (2 * (t + 1))) / (s / 2)


def euclidean_randdet_ratio(m: int) -> float:
    """Closed-form adversarial ratio of the deterministic-first-stage simplex
    family; increases toward 2 + sqrt(5)."""
    return 2 + (m - 1) / m * math.sqrt((5 * m + 4) / m) + 1 / m


def _unit_point(dim: int, axis: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(1) if i == axis else Fraction(0) for i in range(dim))


def gen_euclidean_randrand(t: int) -> GeneratedInstance:
    """t+2 candidates and t+1 single-voter groups in R^(t+1): unit vectors,
    their centroid, and voters at the midpoints between the two."""
    if t < 1:
        raise InvalidParams("t must be at least 1")
    dim, k = t + 1, t + 1
    m, hub = t + 2, t + 1
    centroid = tuple(Fraction(1, dim) for _ in range(dim))
    voters = [
        tuple(Fraction(t + 2, 2 * dim) if i == j else Fraction(1, 2 * dim) for i in range(dim))
        for j in range(k)
    ]
    points = tuple(voters) + tuple(_unit_point(dim, j) for j in range(t + 1)) + (centroid,)
    metric = EuclideanMetric(points)
    profile = tuple(
        (j, hub) + tuple(c for c in range(m) if c not in (j, hub)) for j in range(k)
    )
    instance = Instance(
        partition=GroupPartition(tuple((j,) for j in range(k))),
        profile=profile,
        metric=metric,
        voter_points=tuple(range(k)),
        candidate_points=tuple(range(k, k + m)),
    )
    return _verify_claims(
        GeneratedInstance(
            family="euclid-randrand",
            variants=(instance,),
            objectives=(Objective.AVG_AVG,),
            claimed_optimal=hub,
            claimed_optimal_cost=0.5 * math.sqrt(t / (t + 1)),
            claimed_ratio=euclidean_randrand_ratio(t),
            forced_representatives=tuple(range(k)),
            params={"t": t},
        )
    )


def gen_euclidean_randdet(m: int, in_rule: str = "fpm", sigma: Ballot | None = None) -> GeneratedInstance:
    """2m candidates and m two-voter groups in R^(m+1).

    The tournament loser sits at the centroid with one voter per group on
    top of it; defeaters occupy unit vectors with the second voter halfway
    out, and the spare candidates share the last axis.
    """
    if m < 2:
        raise InvalidParams("m must be at least 2")
    num_candidates = 2 * m
    sigma = _default_sigma(num_candidates, sigma)
    tour = build_bias_tournament(in_rule, range(num_candidates), sigma)
    loser, degree = tour.max_indegree_candidate()
    if degree < m:
        raise InvalidParams(f"{in_rule}: no candidate with in-degree >= {m}")
    defeaters = tuple(sorted(tour.losers_against(loser))[:m])
    extras = tuple(sorted(set(range(num_candidates)) - {loser} - set(defeaters)))

    dim = m + 1
    centroid = tuple(Fraction(1, dim) for _ in range(dim))
    candidate_coord: dict[int, tuple[Fraction, ...]] = {loser: centroid}
    for axis, d in enumerate(defeaters):
        candidate_coord[d] = _unit_point(dim, axis)
    for e in extras:
        candidate_coord[e] = _unit_point(dim, m)

    voter_coords, ballots, groups = [], [], []
    for axis, d in enumerate(defeaters):
        midpoint = tuple(
            Fraction(m + 2, 2 * dim) if i == axis else Fraction(1, 2 * dim) for i in range(dim)
        )
        voter_coords += [centroid, midpoint]
        ballots.append(promote(promote(sigma, d), loser))
        ballots.append(promote(promote(sigma, loser), d))
        groups.append((2 * axis, 2 * axis + 1))

    n = 2 * m
    metric = EuclideanMetric(tuple(voter_coords) + tuple(candidate_coord[c] for c in range(num_candidates)))
    instance = Instance(
        partition=GroupPartition(tuple(groups)),
        profile=tuple(ballots),
        metric=metric,
        voter_points=tuple(range(n)),
        candidate_points=tuple(range(n, n + num_candidates)),
    )
    return _verify_claims(
        GeneratedInstance(
            family="euclid-randdet",
            variants=(instance,),
            objectives=(Objective.AVG_AVG,),
            claimed_optimal=loser,
            claimed_optimal_cost=0.25 * math.sqrt(m / (m + 1)),
            claimed_ratio=euclidean_randdet_ratio(m),
            forced_representatives=defeaters,
            in_rule=in_rule,
            params={"m": m},
        )
    )


# ---------------------------------------------------------------------------
# Random sampler
# ---------------------------------------------------------------------------

RANDOM_KINDS = ("line", "graph", "euclidean")


def gen_random(
    n: int,
    m: int,
    k: int,
    kind: str = "line",
    dimension: int = 2,
    seed: int | str = 0,
) -> Instance:
    """Reproducible random instance; the profile is derived from the metric
    with index tie-breaking."""
    if n < 1 or m < 1:
        raise InvalidParams("need at least one voter and one candidate")
    if not 1 <= k <= n:
        raise InvalidParams(f"k={k} must be in 1..{n}")
    if kind not in RANDOM_KINDS:
        raise InvalidParams(f"unknown metric kind {kind!r}; choose from {RANDOM_KINDS}")
    if kind == "euclidean" and dimension < 1:
        raise InvalidParams("dimension must be at least 1")
    rng = random.Random(f"random-instance:{seed}")

    cuts = sorted(rng.sample(range(1, n), k - 1)) if k > 1 else []
    bounds = [0] + cuts + [n]
    groups = tuple(tuple(range(bounds[i], bounds[i + 1])) for i in range(k))

    if kind == "line":
        positions = tuple(Fraction(rng.randint(-12, 12), 2) for _ in range(n + m))
        metric = LineMetric(positions)
        voter_points = tuple(range(n))
        candidate_points = tuple(range(n, n + m))
    elif kind == "euclidean":
        pts = tuple(
            tuple(Fraction(rng.randint(-6, 6)) for _ in range(dimension)) for _ in range(n + m)
        )
        metric = EuclideanMetric(pts)
        voter_points = tuple(range(n))
        candidate_points = tuple(range(n, n + m))
    else:
        vertices = rng.randint(2, 8)
        edges: list[tuple[int, int, Fraction]] = []
        present: set[tuple[int, int]] = set()
        for v in range(1, vertices):
            u = rng.randrange(v)
            edges.append((u, v, Fraction(rng.randint(1, 8), rng.choice((1, 2)))))
            present.add((u, v))
        for _ in range(rng.randint(0, 3)):
            u, v = rng.randrange(vertices), rng.randrange(vertices)
            if u == v:
                continue
            key = (min(u, v), max(u, v))
            if key in present:
                continue
            present.add(key)
            edges.append((key[0], key[1], Fraction(rng.randint(1, 8), rng.choice((1, 2)))))
        metric = GraphMetric(Graph(vertices, tuple(edges)))
        voter_points = tuple(rng.randrange(vertices) for _ in range(n))
        candidate_points = tuple(rng.randrange(vertices) for _ in range(m))

    profile = derive_profile(metric, voter_points, candidate_points)
    return Instance(
        partition=GroupPartition(groups),
        profile=profile,
        metric=metric,
        voter_points=voter_points,
        candidate_points=candidate_points,
    )
