"""Harmonic morphisms of metric graphs and unramified double covers."""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from tropprym.errors import InvalidCoverError, InvalidMorphismError, ParseError
from tropprym.graph_core import (
    Breakpoints,
    Divisor,
    MetricGraph,
    PLFunction,
    Point,
    genus,
    graph_from_json,
    graph_to_json,
)


@dataclass(frozen=True)
class EdgeImage:
    """Where a source edge goes: target edge, dilation factor, orientation flip."""

    to: str
    dilation: int = 1
    reversed: bool = False


@dataclass(frozen=True, eq=False)
class HarmonicMorphism:
    """Finite harmonic morphism between metric graphs.

    Construction checks that every source vertex and edge is mapped, edge
    endpoints are compatible with the vertex map, ``dilation * length(source
    edge) == length(target edge)``, the map is surjective, and the local degree
    at each source vertex does not depend on the target direction. Harmonicity
    at interior edge points is automatic once dilation is constant on edges.
    """

    source: MetricGraph
    target: MetricGraph
    vertex_map: Mapping[str, str]
    edge_map: Mapping[str, EdgeImage]
    _vertex_degree: dict[str, int] = field(init=False, repr=False)
    _degree: int = field(init=False, repr=False)

    def __post_init__(self) -> None:
        vmap = dict(self.vertex_map)
        emap = {k: _as_edge_image(v) for k, v in self.edge_map.items()}
        object.__setattr__(self, "vertex_map", vmap)
        object.__setattr__(self, "edge_map", emap)
        src, tgt = self.source, self.target
        for v in src.vertex_ids:
            if v not in vmap:
                raise InvalidMorphismError(f"source vertex {v!r} is not mapped")
            if not tgt.has_vertex(vmap[v]):
                raise InvalidMorphismError(f"vertex {v!r} maps to unknown {vmap[v]!r}")
        for e in src.edges:
            if e.id not in emap:
                raise InvalidMorphismError(f"source edge {e.id!r} is not mapped")
            img = emap[e.id]
            if not tgt.has_edge(img.to):
                raise InvalidMorphismError(f"edge {e.id!r} maps to unknown {img.to!r}")
            if isinstance(img.dilation, bool) or not isinstance(img.dilation, int) or img.dilation < 1:
                raise InvalidMorphismError(f"edge {e.id!r} has invalid dilation {img.dilation!r}")
            te = tgt.edge(img.to)
            if img.dilation * e.length != te.length:
                raise InvalidMorphismError(
                    f"edge {e.id!r}: dilation {img.dilation} times length {e.length} "
                    f"differs from target length {te.length}"
                )
            ends = (te.head, te.tail) if img.reversed else (te.tail, te.head)
            if (vmap[e.tail], vmap[e.head]) != ends:
                raise InvalidMorphismError(f"edge {e.id!r} endpoints disagree with the vertex map")
        if set(vmap.values()) != set(tgt.vertex_ids):
            raise InvalidMorphismError("map is not surjective on vertices")
        if {img.to for img in emap.values()} != set(tgt.edge_ids):
            raise InvalidMorphismError("map is not surjective on edges")

        vertex_degree: dict[str, int] = {}
        for v in src.vertex_ids:
            target_dirs = tgt.directions(vmap[v])
            sums = {d: 0 for d in target_dirs}
            for d in src.directions(v):
                image, dil = self.image_direction(d)
                sums[image] += dil
            values = set(sums.values())
            if not target_dirs:
                values = {1}
            if len(values) != 1 or 0 in values:
                raise InvalidMorphismError(f"map is not harmonic at vertex {v!r}: {sums}")
            vertex_degree[v] = values.pop()
        object.__setattr__(self, "_vertex_degree", vertex_degree)

        fiber_sums: dict[str, int] = defaultdict(int)
        for v, dv in vertex_degree.items():
            fiber_sums["v:" + vmap[v]] += dv
        for e in src.edges:
            fiber_sums["e:" + emap[e.id].to] += emap[e.id].dilation
        degrees = set(fiber_sums.values())
        if len(degrees) != 1:
            raise InvalidMorphismError(f"fiber degree is not constant: {dict(fiber_sums)}")
        object.__setattr__(self, "_degree", degrees.pop())

    def image_direction(self, direction: tuple[str, int]) -> tuple[tuple[str, int], int]:
        """Target direction and dilation of a source tangent direction ``(edge, end)``."""
        edge_id, end = direction
        img = self.edge_map[edge_id]
        return (img.to, end ^ int(img.reversed)), img.dilation

    @property
    def degree(self) -> int:
        return self._degree

    def local_degree(self, p: Point) -> int:
        self.source.check_point(p)
        if p.vertex is not None:
            return self._vertex_degree[p.vertex]
        assert p.edge is not None
        return self.edge_map[p.edge].dilation

    def image(self, p: Point) -> Point:
        self.source.check_point(p)
        if p.vertex is not None:
            return Point.at_vertex(self.vertex_map[p.vertex])
        assert p.edge is not None and p.offset is not None
        img = self.edge_map[p.edge]
        s = img.dilation * p.offset
        if img.reversed:
            s = self.target.edge(img.to).length - s
        return Point(edge=img.to, offset=s)

    def fiber(self, p: Point) -> tuple[Point, ...]:
        """All source points mapping to a target point."""
        self.target.check_point(p)
        if p.vertex is not None:
            return tuple(
                Point.at_vertex(v) for v in self.source.vertex_ids if self.vertex_map[v] == p.vertex
            )
        assert p.offset is not None
        length = self.target.edge(p.edge).length
        out = []
        for e in self.source.edges:
            img = self.edge_map[e.id]
            if img.to == p.edge:
                s = length - p.offset if img.reversed else p.offset
                out.append(Point(edge=e.id, offset=s / img.dilation))
        return tuple(out)

    def edges_over(self, target_edge: str) -> tuple[str, ...]:
        return tuple(e for e in self.source.edge_ids if self.edge_map[e].to == target_edge)


def _as_edge_image(value: EdgeImage | tuple[Any, ...] | str) -> EdgeImage:
    if isinstance(value, EdgeImage):
        return value
    if isinstance(value, str):
        return EdgeImage(value)
    return EdgeImage(*value)


class DoubleCover(HarmonicMorphism):
    """Harmonic morphism of degree 2 whose ramification divisor vanishes."""

    def __post_init__(self) -> None:
        try:
            super().__post_init__()
        except InvalidMorphismError as exc:
            raise InvalidCoverError(str(exc)) from None
        if self.degree != 2:
            raise InvalidCoverError(f"degree is {self.degree}, not 2")
        ram = ramification_divisor(self)
        if ram:
            raise InvalidCoverError(f"cover is ramified: {ram!r}")


def voltage_cover(graph: MetricGraph, twisted: Iterable[str]) -> DoubleCover:
    """Free double cover obtained by crossing sheets along the ``twisted`` edges.

    The source has vertices ``v.0`` and ``v.1`` over each vertex ``v`` and
    edges ``e.0`` and ``e.1`` over each edge ``e``; edge ``e.i`` leaves sheet
    ``i`` and arrives in sheet ``i`` or, for a twisted edge, in sheet ``1 - i``.
    """
    twist = set(twisted)
    vertices = {f"{v.id}.{i}": v.weight for v in graph.vertices for i in (0, 1)}
    edges = []
    emap: dict[str, EdgeImage] = {}
    for e in graph.edges:
        for i in (0, 1):
            j = 1 - i if e.id in twist else i
            edges.append((f"{e.id}.{i}", f"{e.tail}.{i}", f"{e.head}.{j}", e.length))
            emap[f"{e.id}.{i}"] = EdgeImage(e.id)
    vmap = {f"{v}.{i}": v for v in graph.vertex_ids for i in (0, 1)}
    return DoubleCover(MetricGraph.build(vertices, edges), graph, vmap, emap)


def local_degree(m: HarmonicMorphism, p: Point) -> int:
    return m.local_degree(p)


def degree(m: HarmonicMorphism) -> int:
    return m.degree


def ramification_divisor(m: HarmonicMorphism) -> Divisor:
    """Ramification divisor, supported on source vertices.

    At a vertex ``p`` with image ``q`` it is ``d_p (2 - 2 h(q)) - (2 - 2 h(p))``
    minus the sum of ``dilation - 1`` over tangent directions at ``p``. It
    vanishes at interior edge points.
    """
    terms = []
    for v in m.source.vertices:
        dp = m.local_degree(Point.at_vertex(v.id))
        h_image = m.target.weight(m.vertex_map[v.id])
        excess = sum(m.edge_map[e].dilation - 1 for e, _ in m.source.directions(v.id))
        terms.append((Point.at_vertex(v.id), dp * (2 - 2 * h_image) - (2 - 2 * v.weight) - excess))
    return Divisor(terms)


@dataclass(frozen=True)
class DilationCycle:
    """Target vertices and edges over which a double cover has a single preimage."""

    vertices: frozenset[str]
    edges: frozenset[str]

    @property
    def is_empty(self) -> bool:
        return not self.vertices and not self.edges


def dilation_cycle(m: DoubleCover) -> DilationCycle:
    """Locus of the target with a one-point fiber, validated structurally.

    Each vertex of the locus either meets an even, positive number of dilated
    tangent directions (so the locus is a union of cycles there), or meets none
    and then carries positive weight.

    Raises:
        InvalidCoverError: If the locus has a different shape.
    """
    tgt = m.target
    verts = frozenset(
        v for v in tgt.vertex_ids if len(m.fiber(Point.at_vertex(v))) == 1
    )
    edges = frozenset(e for e in tgt.edge_ids if len(m.edges_over(e)) == 1)
    for e in edges:
        te = tgt.edge(e)
        if te.tail not in verts or te.head not in verts:
            raise InvalidCoverError(f"dilated edge {e!r} has an endpoint with two preimages")
    for v in verts:
        dilated = sum(1 for e, _ in tgt.directions(v) if e in edges)
        if dilated % 2 == 1:
            raise InvalidCoverError(f"odd number of dilated directions at {v!r}")
        if dilated == 0 and tgt.weight(v) == 0:
            raise InvalidCoverError(f"isolated dilation point {v!r} has weight 0")
    return DilationCycle(verts, edges)


def riemann_hurwitz_holds(m: DoubleCover) -> bool:
    """Genus relation ``g(source) - 1 == 2 (g(target) - 1)`` for an unramified double cover."""
    return genus(m.source) - 1 == 2 * (genus(m.target) - 1)


def pushforward(m: HarmonicMorphism, d: Divisor) -> Divisor:
    """Move every chip to the image of its point; local degrees play no role."""
    m.source.check_divisor(d)
    return Divisor((m.image(p), c) for p, c in d.items())


def norm_function(m: HarmonicMorphism, f: PLFunction) -> PLFunction:
    """Fiber sum of values weighted by local degree.

    On each target edge the slope of the result equals the sum of the slopes
    of ``f`` along the edges above it, so integrality is preserved.
    """
    if f.graph != m.source:
        raise InvalidMorphismError("function does not live on the source graph")
    tgt = m.target
    values = {
        v: sum(
            (m.local_degree(p) * f.value(p) for p in m.fiber(Point.at_vertex(v))),
            Fraction(0),
        )
        for v in tgt.vertex_ids
    }
    bps: dict[str, Breakpoints] = {}
    for e in tgt.edges:
        offsets: set[Fraction] = set()
        for se in m.edges_over(e.id):
            for x, _ in f.breakpoints.get(se, ()):
                offsets.add(m.image(Point(edge=se, offset=x)).offset)  # type: ignore[arg-type]
        pts = []
        for s in sorted(offsets):
            p = Point(edge=e.id, offset=s)
            pts.append(
                (s, sum((m.local_degree(q) * f.value(q) for q in m.fiber(p)), Fraction(0)))
            )
        if pts:
            bps[e.id] = tuple(pts)
    return PLFunction(tgt, values, bps)


def cover_from_json(
    data: Any, source: MetricGraph, target: MetricGraph, *, double: bool = True
) -> HarmonicMorphism:
    """Parse ``{"vertex_map": {...}, "edge_map": {src: {"to", "dilation", "reversed"}}}``.

    Args:
        data: Decoded JSON document.
        source: Source graph.
        target: Target graph.
        double: Validate as an unramified double cover rather than a general
            harmonic morphism.
    """
    if not isinstance(data, dict):
        raise ParseError("cover must be an object")
    vmap = data.get("vertex_map")
    emap = data.get("edge_map")
    if not isinstance(vmap, dict):
        raise ParseError("missing or malformed vertex_map", "vertex_map")
    if not isinstance(emap, dict):
        raise ParseError("missing or malformed edge_map", "edge_map")
    edges: dict[str, EdgeImage] = {}
    for k, v in emap.items():
        loc = f"edge_map.{k}"
        if isinstance(v, str):
            edges[k] = EdgeImage(v)
            continue
        if not isinstance(v, dict) or not isinstance(v.get("to"), str):
            raise ParseError("expected {'to': edge, ...}", loc)
        dil = v.get("dilation", 1)
        rev = v.get("reversed", False)
        if isinstance(dil, bool) or not isinstance(dil, int):
            raise ParseError("dilation must be an integer", loc + ".dilation")
        if not isinstance(rev, bool):
            raise ParseError("reversed must be a boolean", loc + ".reversed")
        edges[k] = EdgeImage(v["to"], dil, rev)
    cls = DoubleCover if double else HarmonicMorphism
    return cls(source, target, vmap, edges)


def cover_to_json(m: HarmonicMorphism) -> dict[str, Any]:
    return {
        "vertex_map": dict(m.vertex_map),
        "edge_map": {
            k: {"to": v.to, "dilation": v.dilation, "reversed": v.reversed}
            for k, v in m.edge_map.items()
        },
    }


def cover_document_from_json(data: Any, *, double: bool = True) -> HarmonicMorphism:
    """Parse ``{"source": graph, "target": graph, "map": {...}}``.

    Raises:
        ParseError: With the location of the first malformed entry.
    """
    if not isinstance(data, dict):
        raise ParseError("cover document must be an object")
    for key in ("source", "target", "map"):
        if key not in data:
            raise ParseError(f"missing key {key!r}")
    try:
        source = graph_from_json(data["source"])
    except ParseError as exc:
        raise exc.nested("source") from None
    try:
        target = graph_from_json(data["target"])
    except ParseError as exc:
        raise exc.nested("target") from None
    try:
        return cover_from_json(data["map"], source, target, double=double)
    except ParseError as exc:
        raise exc.nested("map") from None


def cover_document_to_json(m: HarmonicMorphism) -> dict[str, Any]:
    return {
        "source": graph_to_json(m.source),
        "target": graph_to_json(m.target),
        "map": cover_to_json(m),
    }


__all__ = [
    "DilationCycle",
    "DoubleCover",
    "EdgeImage",
    "HarmonicMorphism",
    "cover_document_from_json",
    "cover_document_to_json",
    "cover_from_json",
    "cover_to_json",
    "degree",
    "dilation_cycle",
    "local_degree",
    "norm_function",
    "pushforward",
    "ramification_divisor",
    "riemann_hurwitz_holds",
    "voltage_cover",
]
