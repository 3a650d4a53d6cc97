"""Metric spaces that voters and candidates are embedded in.

Four interchangeable representations are supported: an explicit distance
matrix, positions on a line, shortest-path distances of a weighted graph,
and Euclidean coordinates.  Point ids are dense integers ``0..P-1`` into the
metric's point table; placements map entities onto point ids, and several
entities may share a point.

All coordinates and weights are :class:`fractions.Fraction`, so every
ordinal comparison is exact.  Only Euclidean *distances* are irrational:
:meth:`distance` returns a float there, while :meth:`exact_key` returns the
exact rational squared distance (a monotone stand-in for comparisons).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    AsymmetryViolation,
    DisconnectedGraph,
    IdentityViolation,
    InvalidParams,
    MetricViolation,
    NegativeDistance,
    TriangleViolation,
    UnknownPoint,
)

Rat = Fraction


@dataclass(frozen=True)
class LineMetric:
    """Points at rational positions on a line."""

    positions: tuple[Fraction, ...]

    kind = "line"

    @property
    def num_points(self) -> int:
        return len(self.positions)

    def distance(self, a: int, b: int) -> Fraction:
        self._check(a, b)
        return abs(self.positions[a] - self.positions[b])

    def exact_key(self, a: int, b: int) -> Fraction:
        return self.distance(a, b)

    def _check(self, *points: int) -> None:
        for p in points:
            if not 0 <= p < len(self.positions):
                raise UnknownPoint(f"point {p} not on line with {len(self.positions)} points")


@dataclass(frozen=True)
class MatrixMetric:
    """Explicit pairwise distances; the only representation whose metric
    axioms are not guaranteed by construction."""

    rows: tuple[tuple[Fraction, ...], ...]

    kind = "matrix"

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.rows):
                raise InvalidParams("distance matrix must be square")

    @property
    def num_points(self) -> int:
        return len(self.rows)

    def distance(self, a: int, b: int) -> Fraction:
        self._check(a, b)
        return self.rows[a][b]

    def exact_key(self, a: int, b: int) -> Fraction:
        return self.distance(a, b)

    def _check(self, *points: int) -> None:
        for p in points:
            if not 0 <= p < len(self.rows):
                raise UnknownPoint(f"point {p} not in {len(self.rows)}x{len(self.rows)} matrix")


@dataclass(frozen=True)
class Graph:
    """Undirected graph with positive rational edge weights."""

    num_vertices: int
    edges: tuple[tuple[int, int, Fraction], ...]

    def __post_init__(self):
        for u, v, w in self.edges:
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise UnknownPoint(f"edge ({u}, {v}) outside vertex range")
            if w <= 0:
                raise InvalidParams(f"edge ({u}, {v}) has non-positive weight {w}")


def shortest_path_closure(graph: Graph, placement: tuple[int, ...] = ()) -> MatrixMetric:
    """All-pairs shortest-path distances of ``graph`` as an explicit matrix.

    The result satisfies the metric axioms by construction.  Raises
    :class:`DisconnectedGraph` if any vertex pair is unreachable.
    """
    n = graph.num_vertices
    for p in placement:
        if not 0 <= p < n:
            raise UnknownPoint(f"placed vertex {p} outside graph with {n} vertices")
    dist: list[list[Fraction | None]] = [[None] * n for _ in range(n)]
    for i in range(n):
        dist[i][i] = Fraction(0)
    for u, v, w in graph.edges:
        if dist[u][v] is None or w < dist[u][v]:
            dist[u][v] = w
            dist[v][u] = w
    for mid in range(n):
        row_mid = dist[mid]
        for i in range(n):
            via = dist[i][mid]
            if via is None:
                continue
            row_i = dist[i]
            for j in range(n):
                if row_mid[j] is None:
                    continue
                cand = via + row_mid[j]
                if row_i[j] is None or cand < row_i[j]:
                    row_i[j] = cand
    for i in range(n):
        for j in range(n):
            if dist[i][j] is None:
                raise DisconnectedGraph(f"no path between vertices {i} and {j}")
    return MatrixMetric(tuple(tuple(row) for row in dist))


@dataclass(frozen=True)
class GraphMetric:
    """Shortest-path metric of a weighted graph; points are vertices."""

    graph: Graph
    _closure: MatrixMetric = field(init=False, repr=False, compare=False)

    kind = "graph"

    def __post_init__(self):
        object.__setattr__(self, "_closure", shortest_path_closure(self.graph))

    @property
    def num_points(self) -> int:
        return self.graph.num_vertices

    def distance(self, a: int, b: int) -> Fraction:
        return self._closure.distance(a, b)

    def exact_key(self, a: int, b: int) -> Fraction:
        return self._closure.distance(a, b)


@dataclass(frozen=True)
class EuclideanMetric:
    """Points with rational coordinates in ``R^d``.

    Coordinates are denominator-cleared once at construction so squared
    distances reduce to integer arithmetic: exact, and fast enough for the
    big simplex families.
    """

    points: tuple[tuple[Fraction, ...], ...]
    _ipoints: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    _scale_sq: int = field(init=False, repr=False, compare=False)

    kind = "euclidean"

    def __post_init__(self):
        dims = {len(p) for p in self.points}
        if len(dims) > 1:
            raise InvalidParams(f"mixed coordinate dimensions {sorted(dims)}")
        scale = 1
        for p in self.points:
            for x in p:
                scale = scale * x.denominator // math.gcd(scale, x.denominator)
        ipoints = tuple(tuple(int(x * scale) for x in p) for p in self.points)
        object.__setattr__(self, "_ipoints", ipoints)
        object.__setattr__(self, "_scale_sq", scale * scale)

    @property
    def num_points(self) -> int:
        return len(self.points)

    @property
    def dimension(self) -> int:
        return len(self.points[0]) if self.points else 0

    def squared_distance(self, a: int, b: int) -> Fraction:
        self._check(a, b)
        pa, pb = self._ipoints[a], self._ipoints[b]
        return Fraction(sum((x - y) * (x - y) for x, y in zip(pa, pb)), self._scale_sq)

    def distance(self, a: int, b: int) -> float:
        return math.sqrt(self.squared_distance(a, b))

    def exact_key(self, a: int, b: int) -> Fraction:
        return self.squared_distance(a, b)

    def _check(self, *points: int) -> None:
        for p in points:
            if not 0 <= p < len(self.points):
                raise UnknownPoint(f"point {p} not among {len(self.points)} points")


Metric = LineMetric | MatrixMetric | GraphMetric | EuclideanMetric


def validate_metric(metric: Metric) -> MetricViolation | None:
    """Check the metric axioms; ``None`` means the metric is valid.

    Line, Euclidean, and shortest-path metrics satisfy the axioms by
    construction, so only explicit matrices need the full O(P^3) scan.  The
    returned violation names the offending points (for a triangle violation
    ``(x, y, z)``: d(x,y) > d(x,z) + d(z,y)).
    """
    if isinstance(metric, (LineMetric, EuclideanMetric, GraphMetric)):
        return None
    rows = metric.rows
    n = len(rows)
    for i in range(n):
        if rows[i][i] != 0:
            return IdentityViolation(i)
        for j in range(n):
            if rows[i][j] < 0:
                return NegativeDistance(i, j)
            if rows[i][j] != rows[j][i]:
                return AsymmetryViolation(i, j)
    for x in range(n):
        for y in range(x + 1, n):
            for z in range(n):
                if z == x or z == y:
                    continue
                if rows[x][y] > rows[x][z] + rows[z][y]:
                    return TriangleViolation(x, y, z)
    return None
