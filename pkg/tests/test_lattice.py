from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from conftest import metric_graphs
from hypothesis import given
from hypothesis import strategies as st
from sympy.matrices.normalforms import invariant_factors

from tropprym.chains import ChainSpec
from tropprym.covers import voltage_cover
from tropprym.errors import ClassificationError, InvalidGraphError
from tropprym.fixtures import (
    COVERS,
    dilated_bouquet_cover,
    folded_chain_cover,
    norm_trial_covers,
    smiley_cover,
    weighted_stem_cover,
)
from tropprym.graph_core import MetricGraph
from tropprym.intlinalg import (
    determinant,
    identity,
    integer_kernel,
    is_positive_definite,
    matmul,
    smith_normal_form,
    unimodular_inverse,
)
from tropprym.lattice import (
    CycleBasis,
    block_shape,
    classify_pushforward,
    edge_length_gram,
    homology_basis,
    lattice_report,
    polarization_divisors,
    prym_lattice,
    pullback_matrix,
    pushforward_matrix,
)

small_ints = st.integers(-6, 6)


@st.composite
def int_matrices(draw: st.DrawFn, max_side: int = 5) -> list[list[int]]:
    m = draw(st.integers(1, max_side))
    n = draw(st.integers(1, max_side))
    return [[draw(small_ints) for _ in range(n)] for _ in range(m)]


@given(int_matrices())
def test_smith_form_agrees_with_sympy(mat: list[list[int]]) -> None:
    ours = smith_normal_form(mat).invariants
    theirs = [abs(int(x)) for x in invariant_factors(sympy.Matrix(mat)) if x != 0]
    assert ours == theirs


@given(int_matrices())
def test_smith_form_transforms(mat: list[list[int]]) -> None:
    snf = smith_normal_form(mat)
    assert matmul(matmul(snf.left, mat), snf.right) == snf.diagonal
    assert abs(determinant(snf.left)) == 1 and abs(determinant(snf.right)) == 1
    inv = snf.invariants
    assert all(x > 0 for x in inv)
    assert all(b % a == 0 for a, b in zip(inv, inv[1:]))


@given(int_matrices())
def test_integer_kernel_is_saturated(mat: list[list[int]]) -> None:
    n = len(mat[0])
    k = integer_kernel(mat, n)
    width = len(k[0]) if k and k[0] else 0
    assert width == n - smith_normal_form(mat).rank
    if width:
        assert all(x == 0 for row in matmul(mat, k) for x in row)
        assert smith_normal_form(k).invariants == [1] * width


@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(small_ints, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_unimodular_inverse(mat: list[list[int]]) -> None:
    snf = smith_normal_form(mat)
    u = snf.left
    assert matmul(u, unimodular_inverse(u)) == identity(len(u))


def test_tree_has_empty_basis() -> None:
    tree = MetricGraph.build(["a", "b", "c"], [("x", "a", "b", 1), ("y", "b", "c", 2)])
    assert len(homology_basis(tree)) == 0


def test_circle_has_one_cycle_and_gram_equal_to_length() -> None:
    circle = MetricGraph.build(["o"], [("e", "o", "o", Fraction(7, 3))])
    assert len(homology_basis(circle)) == 1
    assert edge_length_gram(circle).gram == ((Fraction(7, 3),),)


def test_chain_of_five_loops_has_five_cycles() -> None:
    assert len(homology_basis(ChainSpec.uniform(5).graph())) == 5


def test_disjoint_loops_have_diagonal_gram() -> None:
    g = MetricGraph.build(
        ["a", "b"], [("l1", "a", "a", 2), ("br", "a", "b", 5), ("l2", "b", "b", 3)]
    )
    assert edge_length_gram(g).gram == ((2, 0), (0, 3))


def test_theta_gram_in_difference_basis() -> None:
    la, lb, lc = 1, 2, 4
    g = MetricGraph.build(["x", "y"], [("a", "x", "y", la), ("b", "x", "y", lb), ("c", "x", "y", lc)])
    basis = CycleBasis(g, ("a",), ("b", "c"), ((1, -1, 0), (0, 1, -1)))
    assert edge_length_gram(g, basis).gram == ((la + lb, -lb), (-lb, lb + lc))


@given(metric_graphs(max_vertices=5, max_extra=4))
def test_basis_cycles_are_closed_and_gram_is_positive(graph: MetricGraph) -> None:
    basis = homology_basis(graph)
    assert len(basis) == graph.betti_number
    for cyc in basis.cycles:
        boundary = dict.fromkeys(graph.vertex_ids, 0)
        for coeff, e in zip(cyc, graph.edges):
            boundary[e.head] += coeff
            boundary[e.tail] -= coeff
        assert not any(boundary.values())
        assert basis.coordinates(list(cyc)) == [int(c == cyc) for c in basis.cycles]
    if len(basis):
        assert is_positive_definite(edge_length_gram(graph).gram)


def test_folded_chain_two_pushforward_matrix() -> None:
    # Loop 3 folds onto loop 1 with reversed orientation, and the middle loop wraps twice.
    assert pushforward_matrix(folded_chain_cover(2)) == [[1, 0, -1], [0, 2, 0]]


def test_smiley_pushforward_matrix() -> None:
    assert pushforward_matrix(smiley_cover()) == [[1, 0, 0], [0, 1, 0]]


@pytest.mark.parametrize("name, cover", norm_trial_covers())
def test_pullback_is_adjoint_of_pushforward(name: str, cover) -> None:
    sb, tb = homology_basis(cover.source), homology_basis(cover.target)
    push, pull = pushforward_matrix(cover, sb, tb), pullback_matrix(cover, sb, tb)
    gs, gt = edge_length_gram(cover.source, sb).gram, edge_length_gram(cover.target, tb).gram
    # <x, pull y>_source == <push x, y>_target for all basis vectors.
    lhs = matmul(gs, pull, len(sb)) if len(sb) else []
    rhs = matmul([list(r) for r in zip(*push)], gt, len(tb)) if len(tb) else []
    assert lhs == rhs


def test_classification_of_folded_chain_two() -> None:
    cls = classify_pushforward([[1, 0, -1], [0, 2, 0]])
    assert cls.as_dict() == {"a": 1, "b": 1, "c": 0, "d": 0}


def test_classification_of_smiley() -> None:
    cls = classify_pushforward(pushforward_matrix(smiley_cover()), paired=0)
    assert cls.as_dict() == {"a": 0, "b": 0, "c": 2, "d": 1}


@pytest.mark.parametrize("g", [1, 2, 3])
def test_classification_of_trivial_cover_matrix(g: int) -> None:
    # Two disjoint copies of a genus-g graph push forward as [I | I].
    mat = [row + row for row in identity(g)]
    cls = classify_pushforward(mat)
    assert cls.as_dict() == {"a": g, "b": 0, "c": 0, "d": 0}


def test_classification_rejects_odd_torsion() -> None:
    with pytest.raises(ClassificationError):
        classify_pushforward([[3, 0]])


@pytest.mark.parametrize("name", list(COVERS) + ["twisted_theta"])
def test_classification_realizes_block_shape(name: str) -> None:
    cover = dict(norm_trial_covers())[name]
    push = pushforward_matrix(cover)
    data = prym_lattice(cover)
    cls = classify_pushforward(push, cols=data.source_betti, paired=data.polarization_divisors.count(2))
    g0 = len(push)
    if g0:
        lhs = matmul(matmul(unimodular_inverse(cls.target_change), push), cls.source_change)
        assert lhs == block_shape(cls.a, cls.b, cls.c, cls.d)
    assert cls.a + cls.d == data.source_betti - data.target_betti


@pytest.mark.parametrize("g", [2, 3, 4])
def test_folded_chain_prym(g: int) -> None:
    data = prym_lattice(folded_chain_cover(g))
    assert data.rank == g - 1
    assert data.components == 2
    assert polarization_divisors(folded_chain_cover(g)) == [2] * (g - 1)


def test_folded_chain_two_kernel_is_sum_of_outer_loops() -> None:
    assert prym_lattice(folded_chain_cover(2)).kernel_basis == [[1], [0], [1]]


def test_smiley_prym() -> None:
    report = lattice_report(smiley_cover())
    assert report["prym_rank"] == 1
    assert report["components"] == 1
    assert report["polarization_divisors"] == [1]


def test_dilated_bouquet_prym_is_trivial() -> None:
    data = prym_lattice(dilated_bouquet_cover())
    assert data.rank == 0 and data.polarization_divisors == []


def test_weighted_stem_prym() -> None:
    report = lattice_report(weighted_stem_cover())
    assert report["prym_rank"] == 1 and report["components"] == 1


@pytest.mark.parametrize("name, cover", norm_trial_covers())
def test_components_match_cokernel_torsion(name: str, cover) -> None:
    data = prym_lattice(cover)
    assert data.components == data.coker_torsion
    assert data.rank == data.source_betti - data.target_betti


@given(metric_graphs(max_vertices=3), st.data())
def test_free_covers_have_even_polarization(graph: MetricGraph, data: st.DataObject) -> None:
    twisted = data.draw(st.sets(st.sampled_from(list(graph.edge_ids)), min_size=1))
    try:
        cover = voltage_cover(graph, twisted)
    except InvalidGraphError:
        return
    pd = prym_lattice(cover)
    assert pd.components == 2 == pd.coker_torsion
    assert pd.polarization_divisors == [2] * pd.rank
