from __future__ import annotations

import json
from fractions import Fraction
from random import Random

import pytest
from conftest import metric_graphs
from hypothesis import assume, given
from hypothesis import strategies as st

from tropprym.chains import FoldedChain, pushforward_is_canonical
from tropprym.covers import (
    DoubleCover,
    EdgeImage,
    HarmonicMorphism,
    cover_document_from_json,
    cover_document_to_json,
    degree,
    dilation_cycle,
    local_degree,
    norm_function,
    pushforward,
    ramification_divisor,
    riemann_hurwitz_holds,
    voltage_cover,
)
from tropprym.errors import InvalidCoverError, InvalidGraphError, InvalidMorphismError, ParseError
from tropprym.fixtures import (
    COVERS,
    dilated_bouquet_cover,
    norm_trial_covers,
    smiley_cover,
    weighted_stem_cover,
)
from tropprym.graph_core import Divisor, MetricGraph, PLFunction, Point, principal_divisor, random_divisor, random_function
from tropprym.tableaux import enumerate_prym_tableaux

ALL_COVERS = norm_trial_covers()


def folding_segment() -> HarmonicMorphism:
    """A unit segment stretched with dilation 2 over a segment of length 2."""
    source = MetricGraph.build(["x", "y"], [("s", "x", "y", 1)])
    target = MetricGraph.build(["a", "b"], [("t", "a", "b", 2)])
    return HarmonicMorphism(source, target, {"x": "a", "y": "b"}, {"s": EdgeImage("t", 2)})


def test_undilated_interior_point_has_local_degree_one() -> None:
    cover = FoldedChain.concrete(3).cover()
    assert local_degree(cover, cover.source.point("up1", 1)) == 1


def test_every_point_of_dilated_bouquet_has_local_degree_two() -> None:
    cover = dilated_bouquet_cover()
    assert local_degree(cover, Point.at_vertex("x")) == 2
    for e in ("l1", "l2"):
        assert local_degree(cover, cover.source.point(e, Fraction(1, 3))) == 2


def test_vertex_over_two_parallel_edges_has_local_degree_two() -> None:
    assert local_degree(smiley_cover(), Point.at_vertex("a")) == 2


def test_identity_has_degree_one() -> None:
    g = smiley_cover().target
    ident = HarmonicMorphism(g, g, {v: v for v in g.vertex_ids}, {e: e for e in g.edge_ids})
    assert degree(ident) == 1


@pytest.mark.parametrize("name", list(COVERS))
def test_fixture_covers_are_unramified_of_degree_two(name: str) -> None:
    cover = COVERS[name]()
    assert degree(cover) == 2
    assert ramification_divisor(cover) == Divisor()
    assert riemann_hurwitz_holds(cover)


def test_stretched_segment_ramifies_at_both_ends() -> None:
    m = folding_segment()
    assert degree(m) == 2
    assert ramification_divisor(m) == Divisor.from_vertices({"x": 1, "y": 1})


def test_double_cover_rejects_ramified_map() -> None:
    m = folding_segment()
    with pytest.raises(InvalidCoverError):
        DoubleCover(m.source, m.target, m.vertex_map, m.edge_map)


def test_length_mismatch_is_rejected() -> None:
    source = MetricGraph.build(["x", "y"], [("s", "x", "y", 1)])
    target = MetricGraph.build(["a", "b"], [("t", "a", "b", 3)])
    with pytest.raises(InvalidMorphismError):
        HarmonicMorphism(source, target, {"x": "a", "y": "b"}, {"s": EdgeImage("t", 2)})


@pytest.mark.parametrize("g", [2, 3, 4])
def test_folded_chain_has_empty_dilation_cycle(g: int) -> None:
    assert dilation_cycle(FoldedChain.concrete(g).cover()).is_empty


def test_smiley_dilation_cycle_is_the_two_loops() -> None:
    cyc = dilation_cycle(smiley_cover())
    assert cyc.edges == {"e1", "e2"}
    assert cyc.vertices == {"u", "v"}


def test_dilated_bouquet_dilation_cycle_is_everything() -> None:
    cyc = dilation_cycle(dilated_bouquet_cover())
    assert cyc.edges == {"e1", "e2"} and cyc.vertices == {"y"}


def test_weighted_stem_dilation_cycle_is_the_weighted_vertex() -> None:
    cyc = dilation_cycle(weighted_stem_cover())
    assert cyc.vertices == {"p"} and not cyc.edges


def test_pushforward_of_difference() -> None:
    cover = smiley_cover()
    p = cover.source.point("l1", Fraction(1, 4))
    q = cover.source.point("p", Fraction(1, 2))
    d = Divisor([(p, 1), (q, -1)])
    expected = Divisor([(cover.image(p), 1), (cover.image(q), -1)])
    assert pushforward(cover, d) == expected
    assert cover.image(p) == cover.target.point("e1", Fraction(1, 2))


@pytest.mark.parametrize("g", [2, 3, 4])
def test_prym_divisors_push_to_canonical_class(g: int) -> None:
    fc = FoldedChain.concrete(g)
    for t in enumerate_prym_tableaux(g, 1):
        x = fc.cell_sample(t, 1)
        assert pushforward_is_canonical(fc, x)
        assert pushforward(fc.cover(), fc.prym_divisor(x)).degree == 2 * g - 2


@pytest.mark.parametrize("name, cover", ALL_COVERS)
def test_norm_of_constants(name: str, cover: HarmonicMorphism) -> None:
    for c in (1, Fraction(-3, 2)):
        f = norm_function(cover, PLFunction.constant(cover.source, c))
        assert all(v == 2 * c for v in f.vertex_values.values())
        assert principal_divisor(f) == Divisor()


@pytest.mark.parametrize("name, cover", ALL_COVERS)
@given(seed=st.integers(0, 2**32))
def test_norm_commutes_with_divisor(name: str, cover: HarmonicMorphism, seed: int) -> None:
    f = random_function(cover.source, Random(seed))
    assert principal_divisor(norm_function(cover, f)) == pushforward(cover, principal_divisor(f))


@given(metric_graphs(max_vertices=3), st.data())
def test_norm_commutes_on_random_free_covers(graph: MetricGraph, data: st.DataObject) -> None:
    twisted = data.draw(st.sets(st.sampled_from(list(graph.edge_ids))))
    try:
        cover = voltage_cover(graph, twisted)
    except InvalidGraphError:
        assume(False)
    assert degree(cover) == 2
    assert dilation_cycle(cover).is_empty
    f = random_function(cover.source, Random(data.draw(st.integers(0, 2**32))))
    assert principal_divisor(norm_function(cover, f)) == pushforward(cover, principal_divisor(f))


@pytest.mark.parametrize("name, cover", ALL_COVERS)
@given(seed=st.integers(0, 2**32), deg=st.integers(-2, 6))
def test_pushforward_preserves_degree(name: str, cover: HarmonicMorphism, seed: int, deg: int) -> None:
    d = random_divisor(cover.source, Random(seed), max(deg, 0), negatives=max(-deg, 0))
    assert pushforward(cover, d).degree == d.degree


@pytest.mark.parametrize("name", list(COVERS))
def test_cover_document_round_trip(name: str) -> None:
    cover = COVERS[name]()
    again = cover_document_from_json(json.loads(json.dumps(cover_document_to_json(cover))))
    assert again.source == cover.source and again.target == cover.target
    assert again.vertex_map == cover.vertex_map and again.edge_map == cover.edge_map


def test_cover_parse_error_reports_location() -> None:
    doc = cover_document_to_json(smiley_cover())
    doc["map"]["edge_map"]["l1"]["dilation"] = "two"
    with pytest.raises(ParseError) as info:
        cover_document_from_json(doc)
    assert info.value.location == "map.edge_map.l1.dilation"
    doc = cover_document_to_json(smiley_cover())
    doc["target"]["edges"][0]["length"] = "x"
    with pytest.raises(ParseError) as info:
        cover_document_from_json(doc)
    assert info.value.location == "target.edges[0].length"
