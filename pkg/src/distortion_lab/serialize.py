"""JSON instance schema: the lingua franca of every CLI subcommand.

Rationals are serialized as ``"p/q"`` strings (``"5"`` when the denominator
is one).  Indices in files are 0-based; only rendered reports are 1-based.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .errors import InvalidParams
from .metrics import (
    EuclideanMetric,
    Graph,
    GraphMetric,
    LineMetric,
    MatrixMetric,
    Metric,
    validate_metric,
)
from .model import GroupPartition, Instance, check_consistency


def rat_str(x: Fraction) -> str:
    return str(x)


def parse_rat(value: Any) -> Fraction:
    if isinstance(value, bool):
        raise InvalidParams(f"not a rational: {value!r}")
    if isinstance(value, (int, str)):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidParams(f"not a rational: {value!r}") from exc
    raise InvalidParams(f"not a rational: {value!r}")


def metric_to_dict(metric: Metric, voter_points: tuple[int, ...], candidate_points: tuple[int, ...]) -> dict:
    placement = {"voters": list(voter_points), "candidates": list(candidate_points)}
    if isinstance(metric, LineMetric):
        return {"kind": "line", "points": [rat_str(p) for p in metric.positions], "placement": placement}
    if isinstance(metric, EuclideanMetric):
        return {
            "kind": "euclidean",
            "points": [[rat_str(x) for x in p] for p in metric.points],
            "placement": placement,
        }
    if isinstance(metric, MatrixMetric):
        return {
            "kind": "matrix",
            "distances": [[rat_str(x) for x in row] for row in metric.rows],
            "placement": placement,
        }
    if isinstance(metric, GraphMetric):
        return {
            "kind": "graph",
            "vertices": metric.graph.num_vertices,
            "edges": [[u, v, rat_str(w)] for u, v, w in metric.graph.edges],
            "placement": placement,
        }
    raise InvalidParams(f"unknown metric type {type(metric).__name__}")


def metric_from_dict(data: dict) -> tuple[Metric, tuple[int, ...], tuple[int, ...]]:
    kind = data.get("kind")
    placement = data.get("placement", {})
    voters = tuple(int(p) for p in placement.get("voters", ()))
    candidates = tuple(int(p) for p in placement.get("candidates", ()))
    if kind == "line":
        metric: Metric = LineMetric(tuple(parse_rat(p) for p in data["points"]))
    elif kind == "euclidean":
        metric = EuclideanMetric(tuple(tuple(parse_rat(x) for x in p) for p in data["points"]))
    elif kind == "matrix":
        metric = MatrixMetric(tuple(tuple(parse_rat(x) for x in row) for row in data["distances"]))
    elif kind == "graph":
        edges = tuple((int(u), int(v), parse_rat(w)) for u, v, w in data["edges"])
        metric = GraphMetric(Graph(int(data["vertices"]), edges))
    else:
        raise InvalidParams(f"unknown metric kind {kind!r}")
    return metric, voters, candidates


def instance_to_dict(instance: Instance) -> dict:
    return {
        "n": instance.n,
        "m": instance.m,
        "groups": [list(g) for g in instance.partition.groups],
        "profile": [list(b) for b in instance.profile],
        "metric": metric_to_dict(instance.metric, instance.voter_points, instance.candidate_points),
    }


def instance_from_dict(data: dict, check: bool = True) -> Instance:
    metric, voter_points, candidate_points = metric_from_dict(data["metric"])
    instance = Instance(
        partition=GroupPartition(tuple(tuple(sorted(int(v) for v in g)) for g in data["groups"])),
        profile=tuple(tuple(int(c) for c in b) for b in data["profile"]),
        metric=metric,
        voter_points=voter_points,
        candidate_points=candidate_points,
    )
    if int(data.get("n", instance.n)) != instance.n or int(data.get("m", instance.m)) != instance.m:
        raise InvalidParams("declared n/m do not match placements")
    if check:
        violation = validate_metric(metric)
        if violation is not None:
            raise violation
        if not check_consistency(instance.profile, metric, voter_points, candidate_points):
            raise InvalidParams("profile is inconsistent with the metric")
    return instance


def canonical_json(obj: Any) -> str:
    """Deterministic human-readable JSON used for all file outputs."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def instance_digest(instance: Instance) -> str:
    blob = json.dumps(instance_to_dict(instance), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def dump_instance(instance: Instance, path: str | Path) -> None:
    Path(path).write_text(canonical_json(instance_to_dict(instance)))


def load_instance(path: str | Path, check: bool = True) -> Instance:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidParams(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return instance_from_dict(data, check=check)
