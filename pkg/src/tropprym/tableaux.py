"""Displacement and Prym tableaux, upward displacement, and cell counts.

Tableaux use French notation: ``rows[0]`` is the bottom row and cell ``(x, y)``
is column ``x``, row ``y``, both starting at 1. The diagonal of a cell is
``x - y``; a symbol's cells determine where its chip sits on the matching loop
only through their diagonal classes.

A folded chain over a base of genus ``g`` has ``2g - 1`` loops. The loop ``g``
has torsion 2 and every other loop has torsion ``k``, with ``k = 0`` standing
for generic edge lengths (no repetition allowed).
"""

from __future__ import annotations

from collections import deque
from collections.abc import Callable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from itertools import combinations
from math import comb, factorial, prod
from typing import Optional

from tropprym.errors import InvalidTableauError, UnsupportedGonalityError

Cell = tuple[int, int]
Partition = tuple[int, ...]
Residues = Optional[tuple[int, int]]
"""A set of diagonals ``offset + modulus * Z``; modulus 0 means the single diagonal ``offset``."""


def diagonal(cell: Cell) -> int:
    return cell[0] - cell[1]


def in_residues(d: int, residues: Residues) -> bool:
    if residues is None:
        return False
    offset, modulus = residues
    return d == offset if modulus == 0 else (d - offset) % modulus == 0


def same_class(d1: int, d2: int, modulus: int) -> bool:
    return d1 == d2 if modulus == 0 else (d1 - d2) % modulus == 0


@dataclass(frozen=True)
class Tableau:
    """Filling of a partition shape with positive integers.

    Attributes:
        rows: Entries row by row, bottom row first; row lengths weakly
            decrease upwards.
    """

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(x) for x in row) for row in self.rows)
        rows = tuple(row for row in rows if row) if all(rows) else _trim(rows)
        object.__setattr__(self, "rows", rows)
        lengths = [len(r) for r in rows]
        if any(a < b for a, b in zip(lengths, lengths[1:])):
            raise InvalidTableauError(f"rows do not form a partition: {lengths}")

    @classmethod
    def from_cells(cls, cells: Mapping[Cell, int]) -> Tableau:
        if not cells:
            return cls(())
        height = max(y for _, y in cells)
        rows = []
        for y in range(1, height + 1):
            width = max((x for x, yy in cells if yy == y), default=0)
            try:
                rows.append(tuple(cells[(x, y)] for x in range(1, width + 1)))
            except KeyError:
                raise InvalidTableauError("cells do not form a partition") from None
        return cls(tuple(rows))

    @classmethod
    def square(cls, rows: Sequence[Sequence[int]]) -> Tableau:
        t = cls(tuple(tuple(r) for r in rows))
        if not t.is_square:
            raise InvalidTableauError("tableau is not square")
        return t

    @property
    def shape(self) -> Partition:
        return tuple(len(r) for r in self.rows)

    @property
    def height(self) -> int:
        return len(self.rows)

    @property
    def width(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def is_square(self) -> bool:
        return all(len(r) == self.height for r in self.rows)

    @property
    def size(self) -> int:
        """Side length of a square tableau."""
        return self.height

    def __getitem__(self, cell: Cell) -> int:
        x, y = cell
        return self.rows[y - 1][x - 1]

    def __contains__(self, symbol: object) -> bool:
        return any(symbol in row for row in self.rows)

    def cells(self) -> Iterator[tuple[Cell, int]]:
        for y, row in enumerate(self.rows, start=1):
            for x, n in enumerate(row, start=1):
                yield (x, y), n

    def positions(self, symbol: int) -> list[Cell]:
        return [c for c, n in self.cells() if n == symbol]

    @property
    def symbols(self) -> tuple[int, ...]:
        return tuple(sorted({n for _, n in self.cells()}))

    def is_increasing(self) -> bool:
        """Entries strictly increase to the right along rows and upwards along columns."""
        for (x, y), n in self.cells():
            if x > 1 and self[(x - 1, y)] >= n:
                return False
            if y > 1 and self[(x, y - 1)] >= n:
                return False
        return True

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def __str__(self) -> str:
        return "\n".join(" ".join(f"{n:>2}" for n in row) for row in reversed(self.rows))


def _trim(rows: tuple[tuple[int, ...], ...]) -> tuple[tuple[int, ...], ...]:
    out = list(rows)
    while out and not out[-1]:
        out.pop()
    if any(not r for r in out):
        raise InvalidTableauError("empty row below a nonempty row")
    return tuple(out)


def torsion_profile(g: int, k: int) -> Callable[[int], int]:
    """Torsion of each loop of a folded chain: 2 for loop ``g``, ``k`` otherwise."""
    return lambda n: 2 if n == g else k


def is_displacement_tableau(t: Tableau, torsion: Callable[[int], int]) -> bool:
    """Strictly increasing, with every repeated symbol on diagonals agreeing modulo its torsion."""
    if not t.is_increasing():
        return False
    for n in t.symbols:
        cells = t.positions(n)
        s = torsion(n)
        for c1, c2 in combinations(cells, 2):
            if s == 0 or (diagonal(c1) - diagonal(c2)) % s:
                return False
    return True


def prym_violation(t: Tableau, g: int, k: int = 0) -> str | None:
    """Reason why ``t`` is not a Prym tableau, or None if it is one."""
    if not t.is_square:
        return "not square"
    if any(not 1 <= n <= 2 * g - 1 for _, n in t.cells()):
        return f"symbols must lie in 1..{2 * g - 1}"
    if not is_displacement_tableau(t, torsion_profile(g, k)):
        return "violates the displacement condition"
    for n in t.symbols:
        partner = 2 * g - n
        s = 2 if n == g else k
        for c1 in t.positions(n):
            for c2 in t.positions(partner):
                if not same_class(diagonal(c1), diagonal(c2), s):
                    return f"symbols {n} and {partner} sit on incompatible diagonals"
    return None


def is_prym_tableau(t: Tableau, g: int, k: int = 0) -> bool:
    return prym_violation(t, g, k) is None


def check_prym_tableau(t: Tableau, g: int, k: int = 0) -> None:
    reason = prym_violation(t, g, k)
    if reason is not None:
        raise InvalidTableauError(reason)


def in_closure(partition: Partition, cell: Cell) -> bool:
    """Membership in the partition together with the row 0 and column 0 border."""
    x, y = cell
    if x == 0 or y == 0:
        return True
    return y <= len(partition) and x <= partition[y - 1]


def addable_cells(partition: Partition, bound: tuple[int, int] | None = None) -> list[Cell]:
    """Cells outside the partition whose left and lower neighbours lie in its closure.

    Args:
        partition: Row lengths, bottom row first.
        bound: Optional ``(width, height)`` box the cells must stay inside.
    """
    out = []
    for y in range(1, len(partition) + 2):
        x = (partition[y - 1] if y <= len(partition) else 0) + 1
        if in_closure(partition, (x, y - 1)) and in_closure(partition, (x - 1, y)):
            if bound is None or (x <= bound[0] and y <= bound[1]):
                out.append((x, y))
    return out


def _add_cells(partition: Partition, cells: Iterable[Cell]) -> Partition:
    rows = list(partition)
    for x, y in sorted(cells, key=lambda c: c[1]):
        if y == len(rows) + 1:
            rows.append(0)
        rows[y - 1] = max(rows[y - 1], x)
    return tuple(rows)


def disp_plus(partition: Partition, residues: Residues) -> Partition:
    """Upward displacement: add every addable cell whose diagonal lies in ``residues``."""
    new = [c for c in addable_cells(partition) if in_residues(diagonal(c), residues)]
    return _add_cells(partition, new)


def _class_of(t: Tableau, n: int, g: int, k: int, epsilon: int | None) -> Residues:
    cells = t.positions(n) or t.positions(2 * g - n)
    if n == g:
        if cells:
            return (diagonal(cells[0]) % 2, 2)
        return None if epsilon is None else (epsilon % 2, 2)
    if not cells:
        return None
    d = diagonal(cells[0])
    return (d % k, k) if k else (d, 0)


def lambda_sequence(
    t: Tableau, g: int, k: int = 0, epsilon: int | None = None
) -> list[Tableau]:
    """Tableaux ``t_1, ..., t_{2g-1}`` built by repeated upward displacement.

    Step ``n`` displaces by the diagonal class of ``n`` or of ``2g - n`` in
    ``t`` (they agree in a Prym tableau). Each output tableau records in
    every cell the step at which it was added.

    Args:
        t: Prym tableau.
        g: Genus of the base chain.
        k: Torsion of the loops other than ``g``; 0 for generic lengths.
        epsilon: Parity class used for step ``g`` when ``g`` is absent from
            ``t``; ignored otherwise.
    """
    labels: dict[Cell, int] = {}
    partition: Partition = ()
    out = []
    for n in range(1, 2 * g):
        new = disp_plus(partition, _class_of(t, n, g, k, epsilon))
        for y, length in enumerate(new, start=1):
            old = partition[y - 1] if y <= len(partition) else 0
            for x in range(old + 1, length + 1):
                labels[(x, y)] = n
        partition = new
        out.append(Tableau.from_cells(labels))
    return out


def contains_square(t: Tableau, side: int) -> bool:
    return side <= 0 or (t.height >= side and all(len(t.rows[y]) >= side for y in range(side)))


def monotonicity_holds(t: Tableau, g: int, k: int = 0, epsilon: int | None = None) -> bool:
    """Every cell of ``t`` holding a symbol ``n <= g`` lies in the ``n``-th displaced shape."""
    seq = lambda_sequence(t, g, k, epsilon)
    for (x, y), n in t.cells():
        if n <= g:
            shape = seq[n - 1].shape
            if not in_closure(shape, (x, y)) or x == 0:
                return False
    return True


def dual_tableau(t: Tableau, g: int) -> Tableau:
    """Reflect across the anti-diagonal and replace each symbol ``n`` by ``2g - n``."""
    if not t.is_square:
        raise InvalidTableauError("dual is defined for square tableaux")
    side = t.size
    return Tableau.from_cells(
        {(x, y): 2 * g - t[(side + 1 - y, side + 1 - x)] for (x, y), _ in t.cells()}
    )


def cell_dimension(t: Tableau, g: int) -> int:
    """Number of ``0 < i < g`` such that neither ``i`` nor ``2g - i`` occurs in ``t``."""
    used = set(t.symbols)
    return sum(1 for i in range(1, g) if i not in used and 2 * g - i not in used)


def g_parity_class(t: Tableau, g: int) -> int | None:
    """Diagonal of ``g`` modulo 2, or None if ``g`` is absent."""
    cells = t.positions(g)
    return diagonal(cells[0]) % 2 if cells else None


def parity_name(epsilon: int | None) -> str | None:
    """Chip of loop ``g`` on its attaching vertex (class 0) is called odd, the other even."""
    if epsilon is None:
        return None
    return "odd" if epsilon % 2 == 0 else "even"


def matches_rank(t: Tableau, g: int) -> bool:
    """Whether the position of ``g`` allows divisors of rank parity ``size - 1``."""
    eps = g_parity_class(t, g)
    return eps is None or eps == (t.size - 1) % 2


@dataclass(frozen=True)
class CellSignature:
    """Pinned data of a Prym cell.

    Attributes:
        parity: Diagonal class of ``g`` modulo 2.
        pinned: Pairs ``(i, class)`` for ``i < g`` whose loop pair is fixed.
    """

    parity: int | None
    pinned: frozenset[tuple[int, int]]

    def refines(self, other: CellSignature) -> bool:
        """Whether this cell lies inside ``other``."""
        parity_ok = other.parity is None or other.parity == self.parity
        return parity_ok and other.pinned <= self.pinned


def cell_signature(t: Tableau, g: int, k: int = 0, epsilon: int | None = None) -> CellSignature:
    eps = g_parity_class(t, g)
    if eps is None and epsilon is not None:
        eps = epsilon % 2
    pinned = set()
    for i in range(1, g):
        cells = t.positions(i) or t.positions(2 * g - i)
        if cells:
            d = diagonal(cells[0])
            pinned.add((i, d % k if k else d))
    return CellSignature(eps, frozenset(pinned))


def check_gonality(r: int, k: int) -> None:
    """Raise unless ``k`` is 0, even, or larger than ``2r - 2``."""
    if k < 0:
        raise UnsupportedGonalityError("torsion must be non-negative")
    if k != 0 and k % 2 == 1 and k <= 2 * r - 2:
        raise UnsupportedGonalityError(
            f"odd torsion {k} <= 2r - 2 = {2 * r - 2} is not supported"
        )


class _PrymSearch:
    """Depth-first search over Prym tableaux, one symbol at a time.

    Symbols are processed in increasing order. Symbol ``n`` either is absent
    or fills a nonempty set of currently addable cells from one diagonal
    class; for ``n > g`` whose partner ``2g - n`` was used, that class is
    forced. A capacity bound discards branches whose remaining symbols cannot
    fill the remaining cells.
    """

    def __init__(self, g: int, side: int, k: int, parity: int | None) -> None:
        self.g = g
        self.side = side
        self.k = k
        self.parity = parity
        self.last = 2 * g - 1
        caps = [0] * (self.last + 2)
        for n in range(self.last, 0, -1):
            caps[n] = caps[n + 1] + self.capacity(n)
        self.suffix_capacity = caps

    def capacity(self, n: int) -> int:
        """Most cells symbol ``n`` can occupy in the square."""
        if self.side <= 0:
            return 0
        s = 2 if n == self.g else self.k
        if s == 0:
            return 1
        return min(self.side, (2 * self.side - 2) // s + 1)

    def diagonal_slack(self, n: int, partition: Partition, classes: dict[int, int]) -> int | None:
        """Least surplus, over diagonals with empty cells, of symbols able to reach them.

        A symbol fills at most one cell per diagonal, and a symbol whose
        class is already forced only reaches diagonals of that class.
        Returns None when the square is full.
        """
        side = self.side
        missing = {}
        for y in range(1, side + 1):
            filled = partition[y - 1] if y <= len(partition) else 0
            for x in range(filled + 1, side + 1):
                missing[x - y] = missing.get(x - y, 0) + 1
        if not missing:
            return None
        best = None
        g = self.g
        for d, count in missing.items():
            reach = 0
            for m in range(n, self.last + 1):
                if m == g:
                    reach += self.parity is None or d % 2 == self.parity
                elif m > g and 2 * g - m in classes:
                    reach += same_class(d, classes[2 * g - m], self.k)
                else:
                    reach += 1
            surplus = reach - count
            if best is None or surplus < best:
                best = surplus
        return best

    def torsion(self, n: int) -> int:
        return 2 if n == self.g else self.k

    def options(self, n: int, partition: Partition, classes: dict[int, int]) -> list[list[Cell]]:
        """Nonempty cell sets symbol ``n`` may occupy next, in a fixed order."""
        addable = addable_cells(partition, (self.side, self.side))
        s = self.torsion(n)
        partner = 2 * self.g - n
        if n == self.g and self.parity is not None:
            addable = [c for c in addable if diagonal(c) % 2 == self.parity]
        if n > self.g and partner in classes:
            addable = [c for c in addable if same_class(diagonal(c), classes[partner], s)]
        if s == 0:
            return [[c] for c in addable]
        groups: dict[int, list[Cell]] = {}
        for c in addable:
            groups.setdefault(diagonal(c) % s, []).append(c)
        out = []
        for _, group in sorted(groups.items()):
            for size in range(1, len(group) + 1):
                out.extend(list(sub) for sub in combinations(group, size))
        return out

    def run(
        self,
        visit: Callable[[dict[Cell, int]], None],
        prune: Callable[[int, Partition, set[int], dict[int, int], int], bool] | None = None,
        first: int = 1,
        prefix: Sequence[int] | None = None,
    ) -> None:
        """Call ``visit`` on the cells of every complete tableau.

        Args:
            visit: Receives the filled cells.
            prune: ``prune(n, partition, used, classes, slack)`` returning True
                cuts the branch.
            first: Symbol to start from.
            prefix: Option indices (``-1`` for absence) fixing the first
                decisions; used to split the search across workers.
        """
        total = self.side * self.side
        cells: dict[Cell, int] = {}
        classes: dict[int, int] = {}
        used: set[int] = set()
        prefix = list(prefix or [])

        def rec(n: int, partition: Partition, filled: int) -> None:
            if filled == total:
                visit(dict(cells))
                return
            if n > self.last:
                return
            slack = self.suffix_capacity[n] - (total - filled)
            if slack < 0:
                return
            if prune is not None and prune(n, partition, used, classes, slack):
                return
            choices: list[list[Cell] | None] = list(self.options(n, partition, classes))
            choices.append(None)
            depth = n - first
            if depth < len(prefix):
                pick = prefix[depth]
                choices = [choices[pick]] if -len(choices) <= pick < len(choices) else []
            for choice in choices:
                if choice is None:
                    rec(n + 1, partition, filled)
                    continue
                for c in choice:
                    cells[c] = n
                classes[n] = diagonal(choice[0])
                used.add(n)
                rec(n + 1, _add_cells(partition, choice), filled + len(choice))
                used.discard(n)
                del classes[n]
                for c in choice:
                    del cells[c]

        rec(first, (), 0)


def enumerate_prym_tableaux(
    g: int,
    r: int,
    k: int = 0,
    *,
    matching_only: bool = False,
    prefix: Sequence[int] | None = None,
) -> Iterator[Tableau]:
    """All Prym tableaux of side ``r + 1`` on the symbols ``1..2g-1``.

    Args:
        g: Genus of the base chain.
        r: Rank; ``r = -1`` yields only the empty tableau.
        k: Torsion of loops other than ``g``.
        matching_only: Keep only tableaux whose position of ``g`` is
            compatible with rank parity ``r``.
        prefix: Restrict to one branch of the search, as produced by
            :func:`search_branches`.
    """
    check_gonality(r, k)
    side = r + 1
    if side <= 0:
        if not prefix:
            yield Tableau(())
        return
    search = _PrymSearch(g, side, k, r % 2 if matching_only else None)
    found: list[Tableau] = []
    search.run(lambda cells: found.append(Tableau.from_cells(cells)), prefix=prefix)
    yield from found


def search_branches(g: int, r: int, k: int = 0) -> list[tuple[int]]:
    """Prefixes splitting the enumeration by the placement of symbol 1.

    Concatenating the results of :func:`enumerate_prym_tableaux` over these
    prefixes, in order, reproduces the unrestricted enumeration.
    """
    check_gonality(r, k)
    if r + 1 <= 0:
        return []
    search = _PrymSearch(g, r + 1, k, None)
    count = len(search.options(1, (), {}))
    return [(i,) for i in range(count)] + [(-1,)]


@dataclass(frozen=True)
class PrymCell:
    """A cell of the Prym-Brill-Noether locus described by a tableau.

    Attributes:
        tableau: A representative Prym tableau.
        dimension: Number of free loop pairs.
        parity: Diagonal class of ``g`` modulo 2 forced by the tableau, or None.
        empty: True when the forced parity is incompatible with the rank.
    """

    tableau: Tableau
    dimension: int
    parity: int | None
    empty: bool

    def as_dict(self) -> dict:
        return {
            "tableau": self.tableau.to_lists(),
            "dimension": self.dimension,
            "parity": parity_name(self.parity),
            "empty": self.empty,
        }


def prym_cells(g: int, r: int, k: int = 0) -> list[PrymCell]:
    """Prym tableaux of side ``r + 1``, one per distinct cell signature."""
    return distinct_cells(enumerate_prym_tableaux(g, r, k), g, k)


def distinct_cells(tableaux: Iterable[Tableau], g: int, k: int = 0) -> list[PrymCell]:
    """Cells of the given tableaux, keeping the first tableau for each signature."""
    seen: set[CellSignature] = set()
    out = []
    for t in tableaux:
        sig = cell_signature(t, g, k)
        if sig in seen:
            continue
        seen.add(sig)
        out.append(PrymCell(t, cell_dimension(t, g), g_parity_class(t, g), not matches_rank(t, g)))
    return out


EMPTY = None


def pbn_dimension(g: int, r: int, k: int = 0) -> int | None:
    """Largest dimension of a nonempty cell of rank ``r`` and parity ``r``, or None if there is none.

    The search keeps the best dimension found and cuts any branch that cannot
    leave more loop pairs unused than that.

    Raises:
        UnsupportedGonalityError: For odd ``k`` at most ``2r - 2``.
    """
    check_gonality(r, k)
    side = r + 1
    if side <= 0:
        return g - 1
    search = _PrymSearch(g, side, k, r % 2)
    best = [-1]

    def visit(cells: dict[Cell, int]) -> None:
        used = set(cells.values())
        dim = sum(1 for i in range(1, g) if i not in used and 2 * g - i not in used)
        best[0] = max(best[0], dim)

    def prune(
        n: int, partition: Partition, used: set[int], classes: dict[int, int], slack: int
    ) -> bool:
        # Leaving a pair unused skips its remaining members, which costs
        # capacity overall and one unit of surplus on every diagonal.
        surplus = search.diagonal_slack(n, partition, classes)
        if surplus is not None and surplus < 0:
            return True
        costs = []
        counts = []
        for i in range(1, g):
            j = 2 * g - i
            if i in used or j in used:
                continue
            cost = (search.capacity(i) if i >= n else 0) + (search.capacity(j) if j >= n else 0)
            costs.append(cost)
            counts.append((i >= n) + (j >= n))
        return min(_affordable(costs, slack), _affordable(counts, surplus)) <= best[0]

    search.run(visit, prune)
    return None if best[0] < 0 else best[0]


def _affordable(costs: list[int], budget: int | None) -> int:
    """How many of the costs fit in the budget, cheapest first; None means unlimited."""
    if budget is None:
        return len(costs)
    free = 0
    for c in sorted(costs):
        if c > budget:
            break
        budget -= c
        free += 1
    return free


def pbn_count(g: int, r: int) -> int:
    """Number of zero-dimensional cells for generic lengths when ``g - 1 = C(r + 1, 2)``.

    Raises:
        ValueError: If ``g - 1 != C(r + 1, 2)``.
    """
    if g - 1 != comb(r + 1, 2):
        raise ValueError(f"counting needs g - 1 = C(r + 1, 2), got g = {g}, r = {r}")
    search = _PrymSearch(g, r + 1, 0, r % 2)
    seen: set[CellSignature] = set()

    def visit(cells: dict[Cell, int]) -> None:
        t = Tableau.from_cells(cells)
        if cell_dimension(t, g) == 0:
            seen.add(cell_signature(t, g))

    search.run(visit)
    return len(seen)


def staircase_tableaux_count(r: int) -> int:
    """Closed form ``C(r+1,2)! / ((2r-1) (2r-3)^2 ... 1^r)``."""
    denom = prod((2 * r - (2 * i - 1)) ** i for i in range(1, r + 1))
    return factorial(comb(r + 1, 2)) // denom


def maximal_completion(t: Tableau, g: int) -> Tableau:
    """Square tableau of maximal cell dimension whose cell contains the cell of ``t``.

    Below the anti-diagonal it copies the labels of ``t_{g-1}``, the
    anti-diagonal holds ``g``, and the cells above are the reflections
    ``2g - n``. Valid for generic lengths.

    Raises:
        InvalidTableauError: If the construction does not produce a Prym tableau.
    """
    side = t.size
    eps = g_parity_class(t, g)
    if eps is None:
        eps = (side - 1) % 2
    lam = lambda_sequence(t, g, 0, eps)[g - 2] if g >= 2 else Tableau(())
    cells: dict[Cell, int] = {}
    for x in range(1, side + 1):
        for y in range(1, side + 1):
            if x + y < side + 1:
                if y > lam.height or x > len(lam.rows[y - 1]):
                    raise InvalidTableauError("t_{g-1} misses the lower triangle")
                cells[(x, y)] = lam[(x, y)]
            elif x + y == side + 1:
                cells[(x, y)] = g
    for (x, y), n in list(cells.items()):
        if x + y < side + 1:
            cells[(side + 1 - y, side + 1 - x)] = 2 * g - n
    s = Tableau.from_cells(cells)
    check_prym_tableau(s, g)
    return s


def n_formula(r: int, ell: int) -> int:
    """``C(ell+1, 2) + ell (r - ell)`` if ``ell <= r - 1``, else ``C(r+1, 2)``."""
    if ell <= r - 1:
        return comb(ell + 1, 2) + ell * (r - ell)
    return comb(r + 1, 2)


def min_symbols_lower_triangular(r: int, k: int) -> int:
    """Fewest symbols in a ``k``-uniform tableau on the cells ``x + y < r + 2``.

    Breadth-first search over the order ideals of the staircase. A step adds
    every addable cell in one diagonal class modulo ``k`` (one diagonal when
    ``k`` is 0), which is never worse than adding a subset of them.

    Raises:
        UnsupportedGonalityError: For odd ``k`` at most ``2r - 2``.
    """
    check_gonality(r, k)
    if r <= 0:
        return 0
    full = tuple(range(r, 0, -1))

    def inside(c: Cell) -> bool:
        return c[0] + c[1] < r + 2

    diagonals = range(-(r - 1), r)
    classes: list[Residues] = (
        [(d, 0) for d in diagonals]
        if k == 0 or k > 2 * r - 2
        else [(c, k) for c in range(k)]
    )
    start: Partition = ()
    dist = {start: 0}
    queue = deque([start])
    while queue:
        lam = queue.popleft()
        if lam == full:
            return dist[lam]
        addable = [c for c in addable_cells(lam) if inside(c)]
        for cls in classes:
            new = [c for c in addable if in_residues(diagonal(c), cls)]
            if not new:
                continue
            nxt = _add_cells(lam, new)
            if nxt not in dist:
                dist[nxt] = dist[lam] + 1
                queue.append(nxt)
    raise AssertionError("staircase unreachable")
