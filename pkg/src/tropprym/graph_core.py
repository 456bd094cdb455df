"""Metric graphs, points, divisors and piecewise-linear functions.

Every length, offset and function value is a :class:`fractions.Fraction`.
Edges are oriented from tail to head; a point in the interior of an edge is
addressed by its distance from the tail. Slopes of a function on an edge are
measured in that same direction.
"""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor
from random import Random
from typing import Any, Union

from tropprym.errors import (
    InvalidFunctionError,
    InvalidGraphError,
    InvalidPointError,
    ParseError,
)

Rational = Union[int, Fraction, str]

TAIL = 0
HEAD = 1


def as_fraction(value: Rational) -> Fraction:
    """Convert an int, Fraction or ``"num/den"`` string to a Fraction.

    Floats are rejected so that no rounding ever enters the computation.
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"exact rational expected, got {value!r}")
    return Fraction(value)


@dataclass(frozen=True)
class Vertex:
    id: str
    weight: int = 0


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    length: Fraction

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head

    def endpoint(self, end: int) -> str:
        return self.tail if end == TAIL else self.head


@dataclass(frozen=True, order=False)
class Point:
    """A vertex, or an interior point of an edge at ``offset`` from its tail.

    Build interior points with :meth:`MetricGraph.point`, which maps offsets 0
    and the edge length to the endpoint vertices.
    """

    vertex: str | None = None
    edge: str | None = None
    offset: Fraction | None = None

    @classmethod
    def at_vertex(cls, vertex_id: str) -> Point:
        return cls(vertex=vertex_id)

    @property
    def is_vertex(self) -> bool:
        return self.vertex is not None

    def sort_key(self) -> tuple[int, str, Fraction]:
        if self.vertex is not None:
            return (0, self.vertex, Fraction(0))
        assert self.edge is not None and self.offset is not None
        return (1, self.edge, self.offset)

    def __lt__(self, other: Point) -> bool:
        return self.sort_key() < other.sort_key()

    def __repr__(self) -> str:
        if self.vertex is not None:
            return f"Point({self.vertex})"
        return f"Point({self.edge}@{self.offset})"


@dataclass(frozen=True)
class MetricGraph:
    """Connected finite graph with positive rational edge lengths and vertex weights.

    Loops and parallel edges are allowed. Construction validates ids, lengths,
    weights and connectivity.
    """

    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    _vertex_index: dict[str, Vertex] = field(init=False, repr=False, compare=False)
    _edge_index: dict[str, Edge] = field(init=False, repr=False, compare=False)
    _incidence: dict[str, tuple[tuple[str, int], ...]] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        vertices = tuple(self.vertices)
        edges = tuple(
            Edge(e.id, e.tail, e.head, as_fraction(e.length)) for e in self.edges
        )
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", edges)
        if not vertices:
            raise InvalidGraphError("a graph needs at least one vertex")
        vertex_index: dict[str, Vertex] = {}
        for v in vertices:
            if v.id in vertex_index:
                raise InvalidGraphError(f"duplicate vertex id {v.id!r}")
            if not isinstance(v.weight, int) or v.weight < 0:
                raise InvalidGraphError(f"vertex {v.id!r} has invalid weight {v.weight!r}")
            vertex_index[v.id] = v
        edge_index: dict[str, Edge] = {}
        incidence: dict[str, list[tuple[str, int]]] = {v.id: [] for v in vertices}
        for e in edges:
            if e.id in edge_index or e.id in vertex_index:
                raise InvalidGraphError(f"duplicate edge id {e.id!r}")
            if e.length <= 0:
                raise InvalidGraphError(f"edge {e.id!r} has non-positive length")
            for end in (TAIL, HEAD):
                if e.endpoint(end) not in vertex_index:
                    raise InvalidGraphError(
                        f"edge {e.id!r} references unknown vertex {e.endpoint(end)!r}"
                    )
                incidence[e.endpoint(end)].append((e.id, end))
            edge_index[e.id] = e
        object.__setattr__(self, "_vertex_index", vertex_index)
        object.__setattr__(self, "_edge_index", edge_index)
        object.__setattr__(
            self, "_incidence", {v: tuple(dirs) for v, dirs in incidence.items()}
        )
        if not self._is_connected():
            raise InvalidGraphError("graph is not connected")

    @classmethod
    def build(
        cls,
        vertices: Mapping[str, int] | Iterable[str],
        edges: Iterable[tuple[str, str, str, Rational]],
    ) -> MetricGraph:
        """Build a graph from plain data.

        Args:
            vertices: Mapping from vertex id to weight, or an iterable of ids
                (all of weight 0).
            edges: Tuples ``(edge_id, tail, head, length)``.

        Returns:
            The validated graph.
        """
        if isinstance(vertices, Mapping):
            vs = tuple(Vertex(v, w) for v, w in vertices.items())
        else:
            vs = tuple(Vertex(v) for v in vertices)
        es = tuple(Edge(i, t, h, as_fraction(length)) for i, t, h, length in edges)
        return cls(vs, es)

    def _is_connected(self) -> bool:
        start = self.vertices[0].id
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for edge_id, end in self._incidence[v]:
                other = self._edge_index[edge_id].endpoint(1 - end)
                if other not in seen:
                    seen.add(other)
                    stack.append(other)
        return len(seen) == len(self.vertices)

    def vertex(self, vertex_id: str) -> Vertex:
        try:
            return self._vertex_index[vertex_id]
        except KeyError:
            raise InvalidPointError(f"unknown vertex {vertex_id!r}") from None

    def edge(self, edge_id: str) -> Edge:
        try:
            return self._edge_index[edge_id]
        except KeyError:
            raise InvalidPointError(f"unknown edge {edge_id!r}") from None

    def has_vertex(self, vertex_id: str) -> bool:
        return vertex_id in self._vertex_index

    def has_edge(self, edge_id: str) -> bool:
        return edge_id in self._edge_index

    @property
    def vertex_ids(self) -> tuple[str, ...]:
        return tuple(v.id for v in self.vertices)

    @property
    def edge_ids(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.edges)

    def weight(self, vertex_id: str) -> int:
        return self.vertex(vertex_id).weight

    def directions(self, vertex_id: str) -> tuple[tuple[str, int], ...]:
        """Tangent directions at a vertex as ``(edge_id, end)`` pairs.

        A loop contributes two directions, one for each of its ends.
        """
        self.vertex(vertex_id)
        return self._incidence[vertex_id]

    def valence(self, vertex_id: str) -> int:
        return len(self.directions(vertex_id))

    @property
    def betti_number(self) -> int:
        return len(self.edges) - len(self.vertices) + 1

    def point(self, edge_id: str, offset: Rational) -> Point:
        """Canonical point at distance ``offset`` from the tail of an edge.

        Raises:
            InvalidPointError: If the offset lies outside ``[0, length]``.
        """
        e = self.edge(edge_id)
        x = as_fraction(offset)
        if x < 0 or x > e.length:
            raise InvalidPointError(f"offset {x} outside edge {edge_id!r}")
        if x == 0:
            return Point.at_vertex(e.tail)
        if x == e.length:
            return Point.at_vertex(e.head)
        return Point(edge=edge_id, offset=x)

    def vertex_point(self, vertex_id: str) -> Point:
        self.vertex(vertex_id)
        return Point.at_vertex(vertex_id)

    def check_point(self, p: Point) -> None:
        """Raise :class:`InvalidPointError` unless ``p`` is a canonical point of this graph."""
        if p.vertex is not None:
            self.vertex(p.vertex)
            return
        if p.edge is None or p.offset is None:
            raise InvalidPointError(f"malformed point {p!r}")
        e = self.edge(p.edge)
        if not 0 < p.offset < e.length:
            raise InvalidPointError(f"{p!r} is not interior to its edge")

    def check_divisor(self, d: Divisor) -> None:
        for p in d.support:
            self.check_point(p)


class Divisor:
    """Finite formal integer combination of points, with zero terms dropped."""

    __slots__ = ("_coeffs", "_hash")

    def __init__(
        self, terms: Mapping[Point, int] | Iterable[tuple[Point, int]] = ()
    ) -> None:
        coeffs: dict[Point, int] = defaultdict(int)
        items = terms.items() if isinstance(terms, Mapping) else terms
        for p, c in items:
            if not isinstance(c, int) or isinstance(c, bool):
                raise TypeError(f"integer coefficient expected, got {c!r}")
            coeffs[p] += c
        self._coeffs: dict[Point, int] = {
            p: coeffs[p] for p in sorted(coeffs) if coeffs[p] != 0
        }
        self._hash: int | None = None

    @classmethod
    def from_vertices(cls, coeffs: Mapping[str, int]) -> Divisor:
        return cls((Point.at_vertex(v), c) for v, c in coeffs.items())

    @classmethod
    def of_points(cls, points: Iterable[Point]) -> Divisor:
        """Effective divisor with one chip per listed point (repeats accumulate)."""
        return cls((p, 1) for p in points)

    def items(self) -> Iterator[tuple[Point, int]]:
        return iter(self._coeffs.items())

    @property
    def support(self) -> tuple[Point, ...]:
        return tuple(self._coeffs)

    def __getitem__(self, p: Point) -> int:
        return self._coeffs.get(p, 0)

    def __len__(self) -> int:
        return len(self._coeffs)

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    @property
    def degree(self) -> int:
        return sum(self._coeffs.values())

    def is_effective(self) -> bool:
        return all(c > 0 for c in self._coeffs.values())

    def __add__(self, other: Divisor) -> Divisor:
        return Divisor(list(self.items()) + list(other.items()))

    def __neg__(self) -> Divisor:
        return Divisor((p, -c) for p, c in self.items())

    def __sub__(self, other: Divisor) -> Divisor:
        return self + (-other)

    def __mul__(self, k: int) -> Divisor:
        return Divisor((p, k * c) for p, c in self.items())

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Divisor):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._coeffs.items()))
        return self._hash

    def __repr__(self) -> str:
        if not self._coeffs:
            return "Divisor(0)"
        terms = " + ".join(f"{c}*{p!r}" for p, c in self._coeffs.items())
        return f"Divisor({terms})"


Breakpoints = tuple[tuple[Fraction, Fraction], ...]


@dataclass(frozen=True)
class PLFunction:
    """Continuous piecewise-linear function with integer slopes.

    The function is stored as its value at every vertex together with, for
    each edge, the sorted interior breakpoints ``(offset, value)``. Vertices
    plus breakpoints form the refinement of the model the function lives on;
    between consecutive refinement points it is linear.
    """

    graph: MetricGraph
    vertex_values: Mapping[str, Fraction]
    breakpoints: Mapping[str, Breakpoints] = field(default_factory=dict)

    def __post_init__(self) -> None:
        values = {v: as_fraction(self.vertex_values[v]) for v in self.graph.vertex_ids}
        bps: dict[str, Breakpoints] = {}
        for edge_id, pts in self.breakpoints.items():
            e = self.graph.edge(edge_id)
            cleaned = tuple(sorted((as_fraction(x), as_fraction(y)) for x, y in pts))
            for (x, _), nxt in zip(cleaned, cleaned[1:] + ((None, None),)):
                if not 0 < x < e.length:
                    raise InvalidFunctionError(f"breakpoint {x} outside edge {edge_id!r}")
                if nxt[0] is not None and nxt[0] == x:
                    raise InvalidFunctionError(f"repeated breakpoint {x} on {edge_id!r}")
            if cleaned:
                bps[edge_id] = cleaned
        object.__setattr__(self, "vertex_values", values)
        object.__setattr__(self, "breakpoints", bps)
        for e in self.graph.edges:
            for _, _, slope in self._raw_segments(e.id):
                if slope.denominator != 1:
                    raise InvalidFunctionError(
                        f"non-integer slope {slope} on edge {e.id!r}"
                    )

    @classmethod
    def constant(cls, graph: MetricGraph, c: Rational) -> PLFunction:
        return cls(graph, {v: as_fraction(c) for v in graph.vertex_ids})

    @classmethod
    def from_vertex_values(
        cls, graph: MetricGraph, values: Mapping[str, Rational]
    ) -> PLFunction:
        """Extend arbitrary rational vertex values to an integer-slope function.

        Each edge gets at most one breakpoint: the two slopes are the floor and
        ceiling of the average slope, which always fit together exactly.
        """
        vals = {v: as_fraction(values[v]) for v in graph.vertex_ids}
        bps: dict[str, Breakpoints] = {}
        for e in graph.edges:
            rise = vals[e.head] - vals[e.tail]
            mean = rise / e.length
            lo, hi = floor(mean), ceil(mean)
            if lo == hi:
                continue
            # hi * x + lo * (L - x) = rise
            x = rise - lo * e.length
            bps[e.id] = ((x, vals[e.tail] + hi * x),)
        return cls(graph, vals, bps)

    def _raw_segments(self, edge_id: str) -> list[tuple[Fraction, Fraction, Fraction]]:
        e = self.graph.edge(edge_id)
        knots = (
            [(Fraction(0), self.vertex_values[e.tail])]
            + list(self.breakpoints.get(edge_id, ()))
            + [(e.length, self.vertex_values[e.head])]
        )
        return [
            (x0, x1, (y1 - y0) / (x1 - x0))
            for (x0, y0), (x1, y1) in zip(knots, knots[1:])
        ]

    def segments(self, edge_id: str) -> list[tuple[Fraction, Fraction, int]]:
        """Linear pieces ``(start, end, slope)`` of the function along an edge."""
        return [(a, b, int(s)) for a, b, s in self._raw_segments(edge_id)]

    def outgoing_slope(self, edge_id: str, end: int) -> int:
        """Slope leaving the endpoint ``end`` of an edge, pointing into the edge."""
        segs = self.segments(edge_id)
        return segs[0][2] if end == TAIL else -segs[-1][2]

    def value(self, p: Point) -> Fraction:
        if p.vertex is not None:
            return self.vertex_values[p.vertex]
        assert p.edge is not None and p.offset is not None
        e = self.graph.edge(p.edge)
        knots = (
            [(Fraction(0), self.vertex_values[e.tail])]
            + list(self.breakpoints.get(p.edge, ()))
            + [(e.length, self.vertex_values[e.head])]
        )
        for (x0, y0), (x1, y1) in zip(knots, knots[1:]):
            if x0 <= p.offset <= x1:
                return y0 + (y1 - y0) * (p.offset - x0) / (x1 - x0)
        raise InvalidPointError(f"{p!r} not on edge {p.edge!r}")

    def __add__(self, other: PLFunction) -> PLFunction:
        if other.graph != self.graph:
            raise InvalidFunctionError("functions live on different graphs")
        values = {v: self.vertex_values[v] + other.vertex_values[v] for v in self.graph.vertex_ids}
        bps: dict[str, Breakpoints] = {}
        for e in self.graph.edges:
            xs = sorted(
                {x for x, _ in self.breakpoints.get(e.id, ())}
                | {x for x, _ in other.breakpoints.get(e.id, ())}
            )
            if xs:
                bps[e.id] = tuple(
                    (x, self.value(Point(edge=e.id, offset=x)) + other.value(Point(edge=e.id, offset=x)))
                    for x in xs
                )
        return PLFunction(self.graph, values, bps)

    def __neg__(self) -> PLFunction:
        return PLFunction(
            self.graph,
            {v: -y for v, y in self.vertex_values.items()},
            {e: tuple((x, -y) for x, y in pts) for e, pts in self.breakpoints.items()},
        )


def genus(graph: MetricGraph) -> int:
    """First Betti number plus the total vertex weight."""
    return graph.betti_number + sum(v.weight for v in graph.vertices)


def canonical_divisor(graph: MetricGraph) -> Divisor:
    """Sum of ``(2 h(v) - 2 + val(v)) v`` over the vertices; loops count twice in the valence."""
    return Divisor.from_vertices(
        {v.id: 2 * v.weight - 2 + graph.valence(v.id) for v in graph.vertices}
    )


def principal_divisor(f: PLFunction) -> Divisor:
    """Divisor of a function: at each point, the sum of its outgoing slopes."""
    terms: list[tuple[Point, int]] = []
    for e in f.graph.edges:
        segs = f.segments(e.id)
        terms.append((Point.at_vertex(e.tail), segs[0][2]))
        terms.append((Point.at_vertex(e.head), -segs[-1][2]))
        for (_, x, before), (_, _, after) in zip(segs, segs[1:]):
            terms.append((Point(edge=e.id, offset=x), after - before))
    return Divisor(terms)


def degree(d: Divisor) -> int:
    return d.degree


def random_function(
    graph: MetricGraph, rng: Random, *, denominator: int = 4, spread: int = 3, knots: int = 2
) -> PLFunction:
    """Random integer-slope function with values and breakpoints on a rational grid.

    Each edge receives up to ``knots`` interior points with random values;
    every linear piece whose average slope is not an integer gets one extra
    breakpoint splitting it into floor and ceiling slopes.

    Args:
        graph: Domain.
        rng: Source of randomness.
        denominator: Grid step for offsets and values is ``1 / denominator``.
        spread: Values are drawn from ``[-spread, spread]``.
        knots: Most interior points chosen per edge before slope repair.
    """

    def value() -> Fraction:
        return Fraction(rng.randint(-spread * denominator, spread * denominator), denominator)

    vals = {v: value() for v in graph.vertex_ids}
    bps: dict[str, Breakpoints] = {}
    for e in graph.edges:
        grid = int(e.length * denominator)
        inner = sorted(rng.sample(range(1, grid), min(rng.randint(0, knots), max(grid - 1, 0))))
        pts = (
            [(Fraction(0), vals[e.tail])]
            + [(Fraction(x, denominator), value()) for x in inner]
            + [(e.length, vals[e.head])]
        )
        out = []
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            mean = (y1 - y0) / (x1 - x0)
            lo, hi = floor(mean), ceil(mean)
            if lo != hi:
                x = (y1 - y0 - lo * (x1 - x0)) / (hi - lo)
                out.append((x0 + x, y0 + hi * x))
            if x1 != e.length:
                out.append((x1, y1))
        if out:
            bps[e.id] = tuple(out)
    return PLFunction(graph, vals, bps)


def random_point(graph: MetricGraph, rng: Random, denominator: int = 4) -> Point:
    """A vertex or an interior grid point, chosen roughly uniformly by length."""
    e = graph.edges[rng.randrange(len(graph.edges))]
    x = Fraction(rng.randrange(max(int(e.length * denominator), 1)), denominator)
    return graph.point(e.id, x)


def random_divisor(
    graph: MetricGraph, rng: Random, degree: int, *, negatives: int = 0, denominator: int = 4
) -> Divisor:
    """Divisor of the given degree on grid points, with ``negatives`` chips of -1.

    Raises:
        ValueError: If ``degree + negatives`` is negative.
    """
    if degree + negatives < 0:
        raise ValueError(f"degree {degree} needs at least {-degree} negative chips")
    pos = [random_point(graph, rng, denominator) for _ in range(degree + negatives)]
    neg = [random_point(graph, rng, denominator) for _ in range(negatives)]
    return Divisor.of_points(pos) - Divisor.of_points(neg)


def parse_rational(value: Any, location: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise ParseError(f"expected integer or 'num/den' string, got {value!r}", location)
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"cannot parse rational {value!r}", location) from None


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _require(obj: Any, key: str, location: str) -> Any:
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"missing key {key!r}", location)
    return obj[key]


def graph_from_json(data: Any) -> MetricGraph:
    """Parse the graph document ``{"vertices": [...], "edges": [...]}``.

    Raises:
        ParseError: With the location of the first malformed entry.
        InvalidGraphError: If the parsed data is not a valid metric graph.
    """
    vertices_raw = _require(data, "vertices", "")
    edges_raw = _require(data, "edges", "")
    if not isinstance(vertices_raw, list) or not isinstance(edges_raw, list):
        raise ParseError("vertices and edges must be lists")
    vertices = []
    for i, v in enumerate(vertices_raw):
        loc = f"vertices[{i}]"
        vid = _require(v, "id", loc)
        weight = v.get("weight", 0)
        if not isinstance(vid, str):
            raise ParseError("vertex id must be a string", loc + ".id")
        if isinstance(weight, bool) or not isinstance(weight, int):
            raise ParseError("weight must be an integer", loc + ".weight")
        vertices.append(Vertex(vid, weight))
    edges = []
    for i, e in enumerate(edges_raw):
        loc = f"edges[{i}]"
        fields = [_require(e, k, loc) for k in ("id", "tail", "head")]
        if not all(isinstance(x, str) for x in fields):
            raise ParseError("edge id, tail and head must be strings", loc)
        length = parse_rational(_require(e, "length", loc), loc + ".length")
        edges.append(Edge(fields[0], fields[1], fields[2], length))
    return MetricGraph(tuple(vertices), tuple(edges))


def graph_to_json(graph: MetricGraph) -> dict[str, Any]:
    return {
        "vertices": [{"id": v.id, "weight": v.weight} for v in graph.vertices],
        "edges": [
            {"id": e.id, "tail": e.tail, "head": e.head, "length": format_rational(e.length)}
            for e in graph.edges
        ],
    }


def divisor_from_json(data: Any, graph: MetricGraph) -> Divisor:
    """Parse a list of ``{"at": vertex | {"edge", "offset"}, "coeff": int}`` entries."""
    if not isinstance(data, list):
        raise ParseError("divisor must be a list")
    terms = []
    for i, entry in enumerate(data):
        loc = f"[{i}]"
        at = _require(entry, "at", loc)
        coeff = _require(entry, "coeff", loc)
        if isinstance(coeff, bool) or not isinstance(coeff, int):
            raise ParseError("coeff must be an integer", loc + ".coeff")
        try:
            if isinstance(at, str):
                p = graph.vertex_point(at)
            else:
                edge_id = _require(at, "edge", loc + ".at")
                offset = parse_rational(_require(at, "offset", loc + ".at"), loc + ".at.offset")
                p = graph.point(edge_id, offset)
        except InvalidPointError as exc:
            raise ParseError(str(exc), loc + ".at") from None
        terms.append((p, coeff))
    return Divisor(terms)


def divisor_to_json(d: Divisor) -> list[dict[str, Any]]:
    out: list[dict[str, Any]] = []
    for p, c in d.items():
        if p.vertex is not None:
            out.append({"at": p.vertex, "coeff": c})
        else:
            assert p.offset is not None
            out.append(
                {"at": {"edge": p.edge, "offset": format_rational(p.offset)}, "coeff": c}
            )
    return out
