from __future__ import annotations

import itertools
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tropprym.errors import InvalidTableauError, UnsupportedGonalityError
from tropprym.tableaux import (
    Tableau,
    cell_dimension,
    cell_signature,
    check_gonality,
    check_prym_tableau,
    contains_square,
    disp_plus,
    dual_tableau,
    enumerate_prym_tableaux,
    g_parity_class,
    is_displacement_tableau,
    is_prym_tableau,
    lambda_sequence,
    matches_rank,
    maximal_completion,
    min_symbols_lower_triangular,
    monotonicity_holds,
    n_formula,
    pbn_count,
    pbn_dimension,
    prym_cells,
    search_branches,
    staircase_tableaux_count,
    torsion_profile,
)

SMALL = [(g, r) for g in range(2, 7) for r in range(0, 4)]
ENUMERATED = {(g, r): list(enumerate_prym_tableaux(g, r)) for g, r in SMALL}
SAMPLE = [(g, t) for (g, _), ts in ENUMERATED.items() for t in ts]


def brute_force_prym(g: int, r: int, k: int) -> set[tuple[tuple[int, ...], ...]]:
    """Every square filling checked cell by cell against the Prym conditions."""
    side = r + 1
    cells = [(x, y) for y in range(1, side + 1) for x in range(1, side + 1)]
    found = set()
    for values in itertools.product(range(1, 2 * g), repeat=len(cells)):
        t = dict(zip(cells, values))
        ok = all(
            (x == 1 or t[(x - 1, y)] < n) and (y == 1 or t[(x, y - 1)] < n) for (x, y), n in t.items()
        )
        for (c1, n1), (c2, n2) in itertools.combinations(t.items(), 2):
            if not ok:
                break
            d = (c1[0] - c1[1]) - (c2[0] - c2[1])
            if n1 == n2 or n1 + n2 == 2 * g:
                s = 2 if n1 == g else k
                ok = d == 0 if s == 0 else d % s == 0
        if ok:
            found.add(tuple(tuple(t[(x, y)] for x in range(1, side + 1)) for y in range(1, side + 1)))
    return found


@pytest.mark.parametrize("g, r, k", [(2, 1, 0), (3, 1, 0), (4, 1, 0), (3, 1, 2), (4, 1, 4), (2, 2, 0), (2, 0, 0)])
def test_enumeration_matches_brute_force(g: int, r: int, k: int) -> None:
    ours = {t.rows for t in enumerate_prym_tableaux(g, r, k)}
    assert ours == brute_force_prym(g, r, k)


def test_disp_plus_example_partition() -> None:
    assert disp_plus((5, 4, 1), (2, 3)) == (6, 4, 2)


def test_disp_plus_with_empty_set_is_identity() -> None:
    assert disp_plus((5, 4, 1), None) == (5, 4, 1)


def test_disp_plus_from_empty_partition() -> None:
    assert disp_plus((), (0, 1)) == (1,)


def test_lambda_seven_of_two_by_two_example() -> None:
    t = Tableau.square([[1, 2], [3, 4]])
    assert lambda_sequence(t, 4)[6].to_lists() == [[1, 2, 4], [3, 4, 6], [4, 5, 7]]


def test_staircase_of_genus_nine_is_fixed() -> None:
    t = Tableau.square([[1, 2, 3], [4, 5, 6], [7, 8, 9]])
    assert lambda_sequence(t, 9)[16] == t


def test_dual_of_two_by_two_example() -> None:
    assert dual_tableau(Tableau.square([[1, 2], [3, 4]]), 4).to_lists() == [[4, 6], [5, 7]]


def test_self_dual_tableau_with_g_on_antidiagonal() -> None:
    s = Tableau.square([[1, 2, 4], [3, 4, 6], [4, 5, 7]])
    assert dual_tableau(s, 4) == s


@given(st.sampled_from(SAMPLE))
def test_dual_is_an_involution_preserving_lambda_sequence(item: tuple[int, Tableau]) -> None:
    g, t = item
    d = dual_tableau(t, g)
    assert is_prym_tableau(d, g)
    assert dual_tableau(d, g) == t
    eps = g_parity_class(t, g)
    for e in [eps] if eps is not None else [0, 1]:
        assert lambda_sequence(d, g, 0, e) == lambda_sequence(t, g, 0, e)


def test_cell_dimension_of_one_dimensional_family() -> None:
    t = Tableau.square([[1, 2, 5], [3, 5, 8], [5, 7, 9]])
    assert is_prym_tableau(t, 5)
    assert cell_dimension(t, 5) == 1


def test_cell_dimension_zero_when_all_pairs_used() -> None:
    t = Tableau.square([[1, 2, 4], [3, 4, 6], [4, 5, 7]])
    assert cell_dimension(t, 4) == 0


def test_prym_violations() -> None:
    with pytest.raises(InvalidTableauError):
        check_prym_tableau(Tableau.square([[1, 3], [2, 4]]), 3)  # 1 and 5 absent but 2, 4 misplaced
    assert not is_prym_tableau(Tableau.square([[1, 1], [2, 3]]), 2)
    assert not is_prym_tableau(Tableau(((1, 2), (3,))), 4)
    assert not is_prym_tableau(Tableau.square([[1, 2], [3, 8]]), 4)


def test_displacement_allows_repeats_on_matching_diagonals() -> None:
    t = Tableau.square([[1, 2], [2, 3]])
    assert not is_displacement_tableau(t, lambda n: 0)
    assert is_displacement_tableau(t, lambda n: 2)
    assert not is_displacement_tableau(t, lambda n: 3)


def test_tableau_rejects_non_partition_shapes() -> None:
    with pytest.raises(InvalidTableauError):
        Tableau(((1,), (2, 3)))
    with pytest.raises(InvalidTableauError):
        Tableau.square([[1, 2], [3]])


@pytest.mark.parametrize("g, r", [(2, 1), (4, 2), (7, 3)])
def test_generic_enumeration_finds_maximal_cells(g: int, r: int) -> None:
    cells = [c for c in prym_cells(g, r) if not c.empty]
    assert max(c.dimension for c in cells) == g - 1 - comb(r + 1, 2)


def test_genus_four_rank_two_has_two_cells() -> None:
    cells = [c for c in prym_cells(4, 2) if not c.empty and c.dimension == 0]
    assert len(cells) == 2


@pytest.mark.parametrize("g, r", [(2, 2), (3, 2), (6, 3), (4, 3)])
def test_too_small_genus_gives_no_tableaux(g: int, r: int) -> None:
    assert list(enumerate_prym_tableaux(g, r)) == []


@pytest.mark.parametrize(
    "g, r, k, expected",
    [
        (2, 1, 0, 0), (4, 2, 0, 0), (5, 2, 0, 1), (6, 2, 0, 2), (7, 3, 0, 0), (8, 3, 0, 1),
        (3, 2, 0, None), (6, 3, 0, None), (6, 2, 2, 3), (6, 2, 4, 2), (8, 5, 4, None),
        (5, 0, 0, 4), (5, -1, 0, 4),
    ],
)
def test_pbn_dimension(g: int, r: int, k: int, expected: int | None) -> None:
    assert pbn_dimension(g, r, k) == expected


@pytest.mark.parametrize("g, r", [(g, r) for g in range(2, 7) for r in range(0, 3)])
def test_pbn_dimension_is_best_enumerated_cell(g: int, r: int) -> None:
    dims = [c.dimension for c in prym_cells(g, r) if not c.empty]
    assert pbn_dimension(g, r) == (max(dims) if dims else None)


@pytest.mark.parametrize("g, r, count", [(2, 1, 1), (4, 2, 2), (7, 3, 16)])
def test_pbn_count_matches_closed_form(g: int, r: int, count: int) -> None:
    assert pbn_count(g, r) == count == staircase_tableaux_count(r)


def test_staircase_closed_form_values() -> None:
    assert [staircase_tableaux_count(r) for r in range(1, 5)] == [1, 2, 16, 768]


def test_pbn_count_requires_critical_genus() -> None:
    with pytest.raises(ValueError):
        pbn_count(5, 2)


def test_n_formula_values() -> None:
    assert n_formula(2, 1) == 2
    assert n_formula(2, 2) == 3
    assert n_formula(5, 2) == 9


@pytest.mark.parametrize("r, k, expected", [(5, 4, 9), (2, 6, 3), (3, 2, 3), (5, 0, 15)])
def test_min_symbols(r: int, k: int, expected: int) -> None:
    assert min_symbols_lower_triangular(r, k) == expected


@pytest.mark.parametrize("r", range(1, 6))
@pytest.mark.parametrize("k", [2, 4, 6, 8, 11])
def test_min_symbols_matches_formula(r: int, k: int) -> None:
    if k % 2 and k <= 2 * r - 2:
        pytest.skip("unsupported torsion")
    assert min_symbols_lower_triangular(r, k) == n_formula(r, -(-k // 2))


@pytest.mark.parametrize("r, k", [(2, 1), (3, 3), (4, 5)])
def test_small_odd_torsion_is_unsupported(r: int, k: int) -> None:
    with pytest.raises(UnsupportedGonalityError):
        check_gonality(r, k)
    with pytest.raises(UnsupportedGonalityError):
        pbn_dimension(2 * r + 2, r, k)


@pytest.mark.parametrize("g, r", SMALL)
def test_enumerated_tableaux_are_prym_and_monotone(g: int, r: int) -> None:
    for t in ENUMERATED[(g, r)]:
        assert is_prym_tableau(t, g)
        eps = g_parity_class(t, g)
        for e in [eps] if eps is not None else [0, 1]:
            assert monotonicity_holds(t, g, 0, e)


@pytest.mark.parametrize("g, r", SMALL)
def test_mismatched_parity_forces_a_larger_square(g: int, r: int) -> None:
    for t in ENUMERATED[(g, r)]:
        eps = g_parity_class(t, g)
        for e in [eps] if eps is not None else [0, 1]:
            if e != r % 2:
                assert contains_square(lambda_sequence(t, g, 0, e)[-1], r + 2)


@pytest.mark.parametrize("g, r", SMALL)
def test_every_cell_lies_in_a_maximal_cell(g: int, r: int) -> None:
    best = pbn_dimension(g, r)
    for t in ENUMERATED[(g, r)]:
        if not matches_rank(t, g):
            continue
        s = maximal_completion(t, g)
        assert cell_dimension(s, g) == best == g - 1 - comb(r + 1, 2)
        assert cell_signature(t, g, 0, r % 2).refines(cell_signature(s, g))


@pytest.mark.parametrize("g, r, k", [(4, 2, 0), (5, 2, 2), (6, 2, 4)])
def test_branches_partition_the_search(g: int, r: int, k: int) -> None:
    whole = list(enumerate_prym_tableaux(g, r, k))
    split = [t for p in search_branches(g, r, k) for t in enumerate_prym_tableaux(g, r, k, prefix=p)]
    assert split == whole


def test_torsion_profile() -> None:
    tor = torsion_profile(5, 4)
    assert tor(5) == 2 and tor(1) == 4 and tor(9) == 4
