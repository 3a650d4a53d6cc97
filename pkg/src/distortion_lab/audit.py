"""Bound verification, lower-bound evaluation, and worst-case search.

A :class:`BoundSpec` pairs a mechanism with an objective and a distortion
ceiling expressed over instance parameters (k, n, n*, m) plus rule-quality
symbols alpha and beta.  Verifying a bound means evaluating the mechanism's
single-instance ratio on a suite and flagging any exceedance: every built-in
bound encodes a proven guarantee, so a violation is treated as a bug, never
tolerated.

Comparisons are exact rational arithmetic on rational metrics; Euclidean
ratios use an explicit 1e-9 absolute tolerance recorded in the report.
"""

from __future__ import annotations

import ast
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import InvalidParams, MismatchedRuleClass
from .generators import RANDOM_KINDS, GeneratedInstance, gen_random
from .mechanisms import MechanismSpec, Scope, run_first_stage, run_mechanism
from .model import Instance, Profile
from .objectives import CostValue, Objective, cost_table
from .rules import get_rule
from .serialize import instance_digest, instance_to_dict

FLOAT_TOL = 1e-9


def eval_bound_expr(expr: str, params: Mapping[str, int | Fraction]) -> Fraction:
    """Evaluate a bound expression (+, -, *, /, parentheses, integers, and
    parameter names) exactly."""
    def ev(node) -> Fraction:
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.BinOp):
            left, right = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div):
                return left / right
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return Fraction(node.value)
        if isinstance(node, ast.Name):
            if node.id in params:
                return Fraction(params[node.id])
            raise InvalidParams(f"unknown symbol {node.id!r} in bound expression")
        raise InvalidParams(f"unsupported syntax in bound expression {expr!r}")

    return ev(ast.parse(expr, mode="eval"))


@dataclass(frozen=True)
class BoundSpec:
    """A mechanism, the objectives it is bounded under, and the ceiling."""

    name: str
    mechanism: MechanismSpec
    objectives: tuple[Objective, ...]
    expression: str
    bindings: Mapping[str, int] = field(default_factory=dict)

    def value(self, instance: Instance) -> Fraction:
        params = dict(self.bindings)
        params.update(
            k=instance.k,
            n=instance.n,
            m=instance.m,
            nstar=instance.partition.max_size,
        )
        bound = eval_bound_expr(self.expression, params)
        if bound <= 0:
            raise InvalidParams(f"bound {self.expression!r} evaluated to {bound}")
        return bound


BUILTIN_BOUNDS: dict[str, BoundSpec] = {
    b.name: b
    for b in (
        BoundSpec("fpm-fur-maxavg", MechanismSpec("fpm", "fur"), (Objective.MAX_AVG,),
                  "alpha + 2", {"alpha": 3}),
        BoundSpec("fpm-fur-avgavg", MechanismSpec("fpm", "fur"), (Objective.AVG_AVG,),
                  "alpha + 2 - 2/k", {"alpha": 3}),
        BoundSpec("fpmpar-fur-xmax", MechanismSpec("fpmpar", "fur"),
                  (Objective.AVG_MAX, Objective.MAX_MAX), "3"),
        BoundSpec("frd-fur-maxmax", MechanismSpec("frd", "fur"), (Objective.MAX_MAX,), "3"),
        BoundSpec("frd-fur-avgmax", MechanismSpec("frd", "fur"), (Objective.AVG_MAX,), "3"),
        BoundSpec("frd-fur-maxavg", MechanismSpec("frd", "fur"), (Objective.MAX_AVG,), "3"),
        BoundSpec("frd-fur-avgavg", MechanismSpec("frd", "fur"), (Objective.AVG_AVG,),
                  "3 - 2/(k*nstar)"),
        BoundSpec("mad-maxmax", MechanismSpec("dictator", "dictator"), (Objective.MAX_MAX,), "3"),
        BoundSpec("fpmpar-fpmpar-avgmax",
                  MechanismSpec("fpmpar", "fpmpar", Scope.ALL_CANDIDATES),
                  (Objective.AVG_MAX,), "2*beta + 3", {"beta": 2}),
    )
}


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SuiteParams:
    """Seeded random-instance suite; kinds rotate per index and every
    instance derives its own RNG stream from (seed, index)."""

    count: int
    seed: int | str = 0
    max_n: int = 10
    max_m: int = 8
    max_k: int = 5
    kinds: tuple[str, ...] = RANDOM_KINDS
    max_dimension: int = 3

    def describe(self) -> str:
        kinds = "+".join(self.kinds)
        return (f"random[{kinds}] count={self.count} seed={self.seed} "
                f"n<={self.max_n} m<={self.max_m} k<={self.max_k}")

    def instance(self, index: int) -> Instance:
        rng = random.Random(f"suite:{self.seed}:{index}")
        n = rng.randint(1, self.max_n)
        m = rng.randint(1, self.max_m)
        k = rng.randint(1, min(n, self.max_k))
        dimension = rng.randint(1, self.max_dimension)
        kind = self.kinds[index % len(self.kinds)]
        return gen_random(n, m, k, kind=kind, dimension=dimension, seed=f"{self.seed}:{index}")

    def instances(self) -> Iterable[tuple[int, Instance]]:
        for index in range(self.count):
            yield index, self.instance(index)


class _InstanceEval:
    """Per-instance cache of cost tables and stage-one results so several
    bounds share one pass."""

    def __init__(self, instance: Instance):
        self.instance = instance
        self._costs: dict[Objective, list[CostValue]] | None = None
        self._stage_one: dict[str, tuple] = {}
        self._digest: str | None = None

    @property
    def digest(self) -> str:
        if self._digest is None:
            self._digest = instance_digest(self.instance)
        return self._digest

    def costs(self) -> dict[Objective, list[CostValue]]:
        if self._costs is None:
            self._costs = cost_table(self.instance)
        return self._costs

    def optimal(self, objective: Objective) -> tuple[int, CostValue]:
        values = self.costs()[objective]
        best = min(range(len(values)), key=lambda c: (values[c], c))
        return best, values[best]

    def stage_one(self, in_rule: str):
        if in_rule not in self._stage_one:
            self._stage_one[in_rule] = run_first_stage(self.instance, in_rule)
        return self._stage_one[in_rule]

    def ratio(self, spec: MechanismSpec, objective: Objective) -> tuple[CostValue, bool]:
        """Single-instance distortion ratio; the flag marks an unbounded
        ratio (zero optimum, positive expected cost)."""
        outcome = run_mechanism(self.instance, spec, stage_one=self.stage_one(spec.in_rule))
        values = self.costs()[objective]
        expected: CostValue = Fraction(0)
        for c in sorted(outcome):
            expected += outcome[c] * values[c]
        _, opt_cost = self.optimal(objective)
        if opt_cost == 0:
            return (Fraction(1), False) if expected == 0 else (float("inf"), True)
        return expected / opt_cost, False


@dataclass(frozen=True)
class BoundCheckRow:
    index: int
    digest: str
    objective: Objective
    ratio: CostValue
    bound: Fraction
    unbounded: bool

    @property
    def margin(self) -> CostValue:
        return self.bound - self.ratio

    @property
    def violated(self) -> bool:
        if self.unbounded:
            return True
        if isinstance(self.ratio, Fraction):
            return self.ratio > self.bound
        return self.ratio > float(self.bound) + FLOAT_TOL


@dataclass
class AuditReport:
    bound: str
    suite: str
    checked: int
    rows: list[BoundCheckRow]
    elapsed: float
    tolerance: float = FLOAT_TOL

    @property
    def violations(self) -> list[BoundCheckRow]:
        return [r for r in self.rows if r.violated]

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def max_ratio(self) -> CostValue | None:
        return max((r.ratio for r in self.rows), default=None)

    @property
    def min_margin(self) -> CostValue | None:
        return min((r.margin for r in self.rows), default=None)

    def summary(self) -> dict:
        def fmt(x):
            if isinstance(x, Fraction):
                return str(x)
            return x

        # elapsed time stays off the payload: serialized reports must be
        # byte-identical across reruns of the same seed
        return {
            "bound": self.bound,
            "suite": self.suite,
            "checked": self.checked,
            "violations": len(self.violations),
            "max_ratio": fmt(self.max_ratio),
            "min_margin": fmt(self.min_margin),
            "tolerance": self.tolerance,
        }


def _check_instance(bounds: Sequence[BoundSpec], index: int, instance: Instance) -> dict[str, list[BoundCheckRow]]:
    ev = _InstanceEval(instance)
    out: dict[str, list[BoundCheckRow]] = {b.name: [] for b in bounds}
    for bound in bounds:
        ceiling = bound.value(instance)
        for objective in bound.objectives:
            ratio, unbounded = ev.ratio(bound.mechanism, objective)
            out[bound.name].append(
                BoundCheckRow(index, ev.digest, objective, ratio, ceiling, unbounded)
            )
    return out


def _verify_chunk(args) -> dict[str, list[BoundCheckRow]]:
    bound_names, params, start, stop = args
    bounds = [BUILTIN_BOUNDS[name] for name in bound_names]
    merged: dict[str, list[BoundCheckRow]] = {name: [] for name in bound_names}
    for index in range(start, stop):
        rows = _check_instance(bounds, index, params.instance(index))
        for name, rs in rows.items():
            merged[name].extend(rs)
    return merged


def verify_suite(
    bounds: Sequence[BoundSpec],
    params: SuiteParams,
    workers: int = 1,
) -> dict[str, AuditReport]:
    """Check several bounds against one shared random suite (each instance
    is generated once; reports are merged deterministically by index)."""
    start_time = time.perf_counter()
    names = [b.name for b in bounds]
    merged: dict[str, list[BoundCheckRow]] = {name: [] for name in names}
    if workers > 1 and params.count > 1:
        from multiprocessing import Pool

        step = max(1, -(-params.count // workers))
        chunks = [(names, params, lo, min(lo + step, params.count)) for lo in range(0, params.count, step)]
        with Pool(processes=workers) as pool:
            for part in pool.map(_verify_chunk, chunks):
                for name, rs in part.items():
                    merged[name].extend(rs)
        for name in names:
            merged[name].sort(key=lambda r: (r.index, r.objective.value))
    else:
        for index, instance in params.instances():
            for name, rs in _check_instance(bounds, index, instance).items():
                merged[name].extend(rs)
    elapsed = time.perf_counter() - start_time
    return {
        name: AuditReport(name, params.describe(), params.count, merged[name], elapsed)
        for name in names
    }


def verify_upper_bound(
    bound: BoundSpec,
    suite: SuiteParams | Iterable[Instance],
    workers: int = 1,
) -> AuditReport:
    """Evaluate one bound over a random suite or an explicit instance list."""
    if isinstance(suite, SuiteParams):
        return verify_suite([bound], suite, workers=workers)[bound.name]
    start_time = time.perf_counter()
    rows: list[BoundCheckRow] = []
    count = 0
    for index, instance in enumerate(suite):
        count += 1
        rows.extend(_check_instance([bound], index, instance)[bound.name])
    return AuditReport(bound.name, "explicit", count, rows, time.perf_counter() - start_time)


# ---------------------------------------------------------------------------
# Lower bounds
# ---------------------------------------------------------------------------

def evaluate_lower_bound(
    generated: GeneratedInstance | Sequence[GeneratedInstance],
    spec: MechanismSpec,
    objective: Objective,
) -> CostValue:
    """Worst ratio the mechanism suffers across the generated family (all
    members, all metric/profile variants); asserted to reach the claim."""
    items = list(generated) if isinstance(generated, (list, tuple)) else [generated]
    if not items:
        raise InvalidParams("empty generated family")
    best: CostValue | None = None
    for gi in items:
        if gi.in_rule is not None and gi.in_rule != spec.in_rule:
            raise MismatchedRuleClass(
                f"{gi.family} was built for in-rule {gi.in_rule!r}, mechanism uses {spec.in_rule!r}"
            )
        if objective not in gi.objectives:
            raise InvalidParams(f"{gi.family} makes no claim under {objective.value}")
        for inst in gi.variants:
            ev = _InstanceEval(inst)
            ratio, _ = ev.ratio(spec, objective)
            if best is None or ratio > best:
                best = ratio
    claimed = items[0].claimed_ratio
    if isinstance(best, Fraction) and isinstance(claimed, Fraction):
        reached = best >= claimed
    else:
        reached = float(best) >= float(claimed) - FLOAT_TOL
    if not reached:
        raise AssertionError(
            f"{items[0].family}: achieved ratio {best} below claimed {claimed} for {spec.label()}"
        )
    return best


def detdet_positional_witness(
    gi: GeneratedInstance, stage_two_variants: tuple[Profile, Profile]
) -> Fraction:
    """Adversarial guarantee of the deterministic-stages construction against
    any fixed positional second-stage selection: for each ballot position,
    at least one second-stage profile variant steers the winner away from
    the optimum; returns the worst ratio the adversary can force across all
    four positions (their minimum)."""
    instance = gi.instance
    values = cost_table(instance)[Objective.MAX_AVG]
    opt_cost = values[gi.claimed_optimal]
    forced: list[Fraction] = []
    for position in range(instance.m):
        best: Fraction | None = None
        for variant in stage_two_variants:
            winner = variant[0][position]
            if winner == gi.claimed_optimal:
                continue
            ratio = values[winner] / opt_cost
            if best is None or ratio > best:
                best = ratio
        if best is None:
            raise AssertionError("a positional selection escaped the construction")
        forced.append(best)
    return min(forced)


# ---------------------------------------------------------------------------
# Randomized worst-case search
# ---------------------------------------------------------------------------

@dataclass
class SearchReport:
    mechanism: MechanismSpec
    objective: Objective
    iterations: int
    seed: int | str
    sampler: str
    rows: list[tuple[int, str, CostValue]]
    best_index: int
    best_ratio: CostValue
    witness: dict

    def summary(self) -> dict:
        ratio = self.best_ratio
        return {
            "mechanism": self.mechanism.label(),
            "objective": self.objective.value,
            "iterations": self.iterations,
            "seed": str(self.seed),
            "sampler": self.sampler,
            "best_index": self.best_index,
            "best_ratio": str(ratio) if isinstance(ratio, Fraction) else ratio,
            "best_ratio_float": float(ratio),
            "witness_digest": self.rows[self.best_index][1],
        }


def _search_chunk(args) -> list[tuple[int, str, CostValue]]:
    spec, objective, params, start, stop = args
    rows = []
    for index in range(start, stop):
        ev = _InstanceEval(params.instance(index))
        ratio, _ = ev.ratio(spec, objective)
        rows.append((index, ev.digest, ratio))
    return rows


def search_worst_case(
    spec: MechanismSpec,
    objective: Objective,
    iterations: int,
    seed: int | str,
    sampler: str = "line",
    max_n: int = 8,
    max_m: int = 6,
    max_k: int = 4,
    workers: int = 1,
) -> SearchReport:
    """Empirical sup estimation: sample seeded instances, keep the worst
    ratio and its witness.  Deterministic given the full parameter set."""
    if iterations < 1:
        raise InvalidParams("iterations must be at least 1")
    kinds = RANDOM_KINDS if sampler == "mixed" else (sampler,)
    params = SuiteParams(
        count=iterations, seed=seed, max_n=max_n, max_m=max_m, max_k=max_k, kinds=kinds
    )
    rows: list[tuple[int, str, CostValue]] = []
    if workers > 1 and iterations > 1:
        from multiprocessing import Pool

        step = max(1, -(-iterations // workers))
        chunks = [(spec, objective, params, lo, min(lo + step, iterations)) for lo in range(0, iterations, step)]
        with Pool(processes=workers) as pool:
            for part in pool.map(_search_chunk, chunks):
                rows.extend(part)
        rows.sort(key=lambda r: r[0])
    else:
        rows = _search_chunk((spec, objective, params, 0, iterations))
    best_index = max(range(len(rows)), key=lambda i: (rows[i][2], -i))
    witness = instance_to_dict(params.instance(best_index))
    return SearchReport(
        mechanism=spec,
        objective=objective,
        iterations=iterations,
        seed=seed,
        sampler=sampler,
        rows=rows,
        best_index=best_index,
        best_ratio=rows[best_index][2],
        witness=witness,
    )


# ---------------------------------------------------------------------------
# Centralized oracles
# ---------------------------------------------------------------------------

def brute_force_centralized_distortion(instance: Instance, rule: str) -> CostValue:
    """Ratio of the rule winner's average voter distance to the best
    achievable average, treating the whole instance as one electorate."""
    r = get_rule(rule)
    if r.randomized:
        raise InvalidParams("centralized oracle expects a deterministic rule")
    winner = r.fn(instance.profile, tuple(range(instance.m)), (instance.n,))

    def avg(c: int) -> CostValue:
        return sum(instance.d(v, c) for v in range(instance.n)) / instance.n

    best = min(avg(c) for c in range(instance.m))
    win_cost = avg(winner)
    if best == 0:
        return Fraction(1) if win_cost == 0 else float("inf")
    return win_cost / best
