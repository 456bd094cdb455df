"""Chains of loops, folded double covers, and divisor coordinates.

A chain of ``G`` loops has vertices ``w0, v1, w1, ..., vG, wG, v{G+1}``. Loop
``i`` joins ``v_i`` and ``w_i`` by two arcs: ``up_i`` of length ``l_i`` from
``w_i`` to ``v_i`` and ``lo_i`` of length ``m_i`` from ``v_i`` back to
``w_i``. Bridges ``br_i`` run from ``w_i`` to ``v_{i+1}``.

A chip on loop ``i`` is recorded by its counterclockwise distance from
``w_i``, measured along ``up_i`` first. A divisor of degree ``d`` in normal
form has one chip on every loop and ``d - G`` chips on the last vertex
``v{G+1}``. A chip whose tableau cell lies on diagonal ``x - y`` sits at
distance ``(x - y) * m_i`` modulo ``l_i + m_i``.

The folded chain over a base of genus ``g`` is a chain of ``2g - 1`` loops. It
double covers a base chain whose last loop is a single edge ``lp_g`` at
``v_g``. The middle loop wraps twice around ``lp_g``, and loops ``g + j``
fold back onto loops ``g - j``.
"""

from __future__ import annotations

import random
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from tropprym.covers import DoubleCover, EdgeImage, pushforward
from tropprym.errors import InvalidTableauError, NotApplicableError
from tropprym.graph_core import Divisor, MetricGraph, Point, Rational, as_fraction
from tropprym.tableaux import (
    Residues,
    Tableau,
    diagonal,
    disp_plus,
    g_parity_class,
    is_displacement_tableau,
    parity_name,
)

Lengths = tuple[Fraction, Fraction]


def loop_torsion(ell: Rational, m: Rational) -> int:
    """Smallest ``s > 0`` with ``s * m`` a multiple of ``ell + m``."""
    ratio = as_fraction(m) / (as_fraction(ell) + as_fraction(m))
    return ratio.denominator


@dataclass(frozen=True)
class ChainSpec:
    """Combinatorial data of a chain of loops, with optional concrete lengths.

    Attributes:
        torsions: Torsion of each loop; 0 stands for generic lengths.
        lengths: ``(l_i, m_i)`` per loop, or None for an abstract chain.
        bridge: Length of every bridge.
    """

    torsions: tuple[int, ...]
    lengths: tuple[Lengths, ...] | None = None
    bridge: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        object.__setattr__(self, "torsions", tuple(int(s) for s in self.torsions))
        object.__setattr__(self, "bridge", as_fraction(self.bridge))
        if self.bridge <= 0:
            raise ValueError("bridge length must be positive")
        if any(s < 0 for s in self.torsions):
            raise ValueError("torsion must be non-negative")
        if self.lengths is not None:
            lengths = tuple((as_fraction(a), as_fraction(b)) for a, b in self.lengths)
            object.__setattr__(self, "lengths", lengths)
            if len(lengths) != len(self.torsions):
                raise ValueError("one pair of arc lengths per loop is required")
            for i, ((ell, m), s) in enumerate(zip(lengths, self.torsions), start=1):
                if ell <= 0 or m <= 0:
                    raise ValueError(f"loop {i} has a non-positive arc")
                if loop_torsion(ell, m) != s:
                    raise ValueError(
                        f"loop {i}: torsion {s} disagrees with lengths ({ell}, {m})"
                    )

    @classmethod
    def from_lengths(cls, lengths: Iterable[tuple[Rational, Rational]], bridge: Rational = 1) -> ChainSpec:
        pairs = tuple((as_fraction(a), as_fraction(b)) for a, b in lengths)
        return cls(tuple(loop_torsion(a, b) for a, b in pairs), pairs, as_fraction(bridge))

    @classmethod
    def uniform(cls, loops: int, ell: Rational = 8, m: Rational = 1, bridge: Rational = 1) -> ChainSpec:
        return cls.from_lengths([(ell, m)] * loops, bridge)

    @property
    def loops(self) -> int:
        return len(self.torsions)

    @property
    def is_concrete(self) -> bool:
        return self.lengths is not None

    def circumference(self, i: int) -> Fraction:
        ell, m = self._lengths(i)
        return ell + m

    def _lengths(self, i: int) -> Lengths:
        if self.lengths is None:
            raise NotApplicableError("the chain has no concrete lengths")
        return self.lengths[i - 1]

    def graph(self) -> MetricGraph:
        """The chain as a metric graph, with loops numbered from 1."""
        return _chain_graph([self._lengths(i) for i in range(1, self.loops + 1)], self.bridge)

    def point(self, i: int, position: Rational) -> Point:
        """Point of loop ``i`` at counterclockwise distance ``position`` from ``w_i``."""
        ell, m = self._lengths(i)
        x = as_fraction(position) % (ell + m)
        g = self.graph_cache()
        if x <= ell:
            return g.point(f"up{i}", x)
        return g.point(f"lo{i}", x - ell)

    def position(self, i: int, p: Point) -> Fraction:
        """Counterclockwise distance from ``w_i`` of a point on loop ``i``."""
        ell, _ = self._lengths(i)
        if p.vertex == f"w{i}":
            return Fraction(0)
        if p.vertex == f"v{i}":
            return ell
        if p.edge == f"up{i}":
            return p.offset
        if p.edge == f"lo{i}":
            return ell + p.offset
        raise NotApplicableError(f"{p!r} is not on loop {i}")

    def graph_cache(self) -> MetricGraph:
        cached = _GRAPHS.get(self)
        if cached is None:
            cached = _GRAPHS[self] = self.graph()
        return cached

    def end_vertex(self) -> str:
        return f"v{self.loops + 1}"


_GRAPHS: dict[ChainSpec, MetricGraph] = {}


def _chain_graph(lengths: Sequence[Lengths], bridge: Fraction) -> MetricGraph:
    n = len(lengths)
    vertices = ["w0"]
    edges: list[tuple[str, str, str, Fraction]] = []
    for i, (ell, m) in enumerate(lengths, start=1):
        vertices += [f"v{i}", f"w{i}"]
        edges.append((f"br{i - 1}", f"w{i - 1}", f"v{i}", bridge))
        edges.append((f"up{i}", f"w{i}", f"v{i}", ell))
        edges.append((f"lo{i}", f"v{i}", f"w{i}", m))
    vertices.append(f"v{n + 1}")
    edges.append((f"br{n}", f"w{n}", f"v{n + 1}", bridge))
    return MetricGraph.build(vertices, edges)


@dataclass(frozen=True)
class ChainCoordinates:
    """Normal form of a divisor on a chain of loops.

    Attributes:
        degree: Degree ``d`` of the divisor.
        positions: Counterclockwise distance from ``w_i`` of the chip on each
            loop, reduced modulo the loop circumference by :meth:`reduced`.
    """

    degree: int
    positions: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "positions", tuple(as_fraction(x) for x in self.positions))

    def reduced(self, chain: ChainSpec) -> ChainCoordinates:
        return ChainCoordinates(
            self.degree,
            tuple(x % chain.circumference(i) for i, x in enumerate(self.positions, start=1)),
        )

    def divisor(self, chain: ChainSpec) -> Divisor:
        """One chip per loop and ``d - G`` chips on the last vertex."""
        if len(self.positions) != chain.loops:
            raise ValueError("one position per loop is required")
        terms = [(chain.point(i, x), 1) for i, x in enumerate(self.positions, start=1)]
        terms.append((Point.at_vertex(chain.end_vertex()), self.degree - chain.loops))
        return Divisor(terms)


def diagonal_position(chain: ChainSpec, i: int, diag: int) -> Fraction:
    """Position of the chip on loop ``i`` encoded by a cell on diagonal ``diag``."""
    _, m = chain._lengths(i)
    return (diag * m) % chain.circumference(i)


def diagonal_class(chain: ChainSpec, i: int, position: Rational) -> Residues:
    """Diagonals whose cells encode the chip position, or None if no cell does."""
    _, m = chain._lengths(i)
    s = chain.torsions[i - 1]
    target = as_fraction(position) % chain.circumference(i)
    for d in range(s):
        if diagonal_position(chain, i, d) == target:
            return (d, s)
    return None


def rank_from_diagonals(classes: Sequence[Residues], degree: int) -> int:
    """Rank of a divisor on a chain of loops from the diagonal class of each chip.

    Builds the largest partition reachable by upward displacement and
    returns the largest ``r`` for which it contains the rectangle of height
    ``r + 1`` and width ``G - d + r``.
    """
    loops = len(classes)
    if degree < 0:
        return -1
    shape: tuple[int, ...] = ()
    for cls in classes:
        shape = disp_plus(shape, cls)

    def contains(r: int) -> bool:
        width = loops - degree + r
        if width <= 0:
            return True
        return len(shape) >= r + 1 and all(shape[y] >= width for y in range(r + 1))

    r = -1
    while r + 1 <= degree and contains(r + 1):
        r += 1
    return r


def rank_from_coordinates(x: ChainCoordinates, chain: ChainSpec) -> int:
    """Rank of the divisor with normal form ``x`` on a concrete chain."""
    classes = [diagonal_class(chain, i, p) for i, p in enumerate(x.positions, start=1)]
    return rank_from_diagonals(classes, x.degree)


@dataclass(frozen=True)
class ChainCell:
    """Divisors in normal form that a displacement tableau describes.

    Attributes:
        degree: Degree of the divisors.
        pinned: Diagonal class per loop whose chip the tableau fixes.
        free: Loops whose chip may sit anywhere.
    """

    degree: int
    pinned: Mapping[int, Residues]
    free: tuple[int, ...]

    @property
    def dimension(self) -> int:
        return len(self.free)

    def sample(self, chain: ChainSpec, free_positions: Mapping[int, Rational] | None = None) -> ChainCoordinates:
        """Coordinates of a member; free loops default to position 0."""
        free_positions = free_positions or {}
        positions = []
        for i in range(1, chain.loops + 1):
            if i in self.pinned:
                positions.append(diagonal_position(chain, i, self.pinned[i][0]))
            else:
                positions.append(as_fraction(free_positions.get(i, 0)))
        return ChainCoordinates(self.degree, tuple(positions))


def tableau_to_cell(t: Tableau, chain: ChainSpec, degree: int) -> ChainCell:
    """The cell of divisors of degree ``degree`` described by ``t``.

    Raises:
        InvalidTableauError: If ``t`` is not a displacement tableau for the
            chain's torsions or uses a symbol beyond the last loop.
    """
    if any(not 1 <= n <= chain.loops for n in t.symbols):
        raise InvalidTableauError(f"symbols must lie in 1..{chain.loops}")
    if not is_displacement_tableau(t, lambda n: chain.torsions[n - 1]):
        raise InvalidTableauError("tableau violates the displacement condition for this chain")
    pinned: dict[int, Residues] = {}
    for n in t.symbols:
        d = diagonal(t.positions(n)[0])
        s = chain.torsions[n - 1]
        pinned[n] = (d % s, s) if s else (d, 0)
    free = tuple(n for n in range(1, chain.loops + 1) if n not in pinned)
    return ChainCell(degree, pinned, free)


@dataclass(frozen=True, eq=False)
class FoldedChain:
    """Folded chain of ``2g - 1`` loops over a chain of ``g`` loops.

    Attributes:
        g: Genus of the base.
        k: Torsion of every loop except the middle one (0 for generic).
        base_lengths: Concrete ``(l_i, m_i)`` for base loops ``1..g-1``, or None.
        last_length: Length of the base loop ``g``.
        bridge: Length of every bridge.
    """

    g: int
    k: int = 0
    base_lengths: tuple[Lengths, ...] | None = None
    last_length: Fraction = Fraction(1)
    bridge: Fraction = Fraction(1)
    _cache: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self) -> None:
        if self.g < 1:
            raise ValueError("base genus must be at least 1")
        object.__setattr__(self, "last_length", as_fraction(self.last_length))
        object.__setattr__(self, "bridge", as_fraction(self.bridge))
        if self.base_lengths is not None:
            lengths = tuple((as_fraction(a), as_fraction(b)) for a, b in self.base_lengths)
            if len(lengths) != self.g - 1:
                raise ValueError("need lengths for base loops 1..g-1")
            object.__setattr__(self, "base_lengths", lengths)

    @classmethod
    def concrete(
        cls, g: int, ell: Rational = 8, m: Rational = 1, last: Rational = 1, bridge: Rational = 1
    ) -> FoldedChain:
        """Folded chain whose base loops all have arcs ``(ell, m)``."""
        pair = (as_fraction(ell), as_fraction(m))
        return cls(g, loop_torsion(*pair), (pair,) * (g - 1), as_fraction(last), as_fraction(bridge))

    @property
    def is_concrete(self) -> bool:
        return self.base_lengths is not None

    @property
    def loops(self) -> int:
        return 2 * self.g - 1

    def torsion(self, j: int) -> int:
        return 2 if j == self.g else self.k

    def source_spec(self) -> ChainSpec:
        """The cover as a chain of ``2g - 1`` loops."""
        if "source" not in self._cache:
            g = self.g
            if self.base_lengths is None:
                spec = ChainSpec(tuple(self.torsion(j) for j in range(1, 2 * g)))
            else:
                pairs = []
                for j in range(1, 2 * g):
                    if j == g:
                        pairs.append((self.last_length, self.last_length))
                    else:
                        pairs.append(self.base_lengths[min(j, 2 * g - j) - 1])
                spec = ChainSpec.from_lengths(pairs, self.bridge)
            self._cache["source"] = spec
        return self._cache["source"]

    def base_graph(self) -> MetricGraph:
        """Chain of ``g - 1`` loops followed by the single-edge loop ``lp_g`` at ``v_g``."""
        if "base" not in self._cache:
            lengths = self._require_lengths()
            vertices = ["w0"]
            edges: list[tuple[str, str, str, Fraction]] = []
            for i, (ell, m) in enumerate(lengths, start=1):
                vertices += [f"v{i}", f"w{i}"]
                edges.append((f"br{i - 1}", f"w{i - 1}", f"v{i}", self.bridge))
                edges.append((f"up{i}", f"w{i}", f"v{i}", ell))
                edges.append((f"lo{i}", f"v{i}", f"w{i}", m))
            g = self.g
            vertices.append(f"v{g}")
            edges.append((f"br{g - 1}", f"w{g - 1}", f"v{g}", self.bridge))
            edges.append((f"lp{g}", f"v{g}", f"v{g}", self.last_length))
            self._cache["base"] = MetricGraph.build(vertices, edges)
        return self._cache["base"]

    def source_graph(self) -> MetricGraph:
        return self.source_spec().graph_cache()

    def cover(self) -> DoubleCover:
        """The double cover of the base by the folded chain."""
        if "cover" not in self._cache:
            self._require_lengths()
            g = self.g
            vmap: dict[str, str] = {"w0": "w0", f"v{2 * g}": "w0"}
            emap: dict[str, EdgeImage] = {}
            for j in range(1, 2 * g):
                if j < g:
                    vmap[f"v{j}"], vmap[f"w{j}"] = f"v{j}", f"w{j}"
                    emap[f"up{j}"] = EdgeImage(f"up{j}")
                    emap[f"lo{j}"] = EdgeImage(f"lo{j}")
                elif j == g:
                    vmap[f"v{j}"] = vmap[f"w{j}"] = f"v{g}"
                    emap[f"up{j}"] = EdgeImage(f"lp{g}")
                    emap[f"lo{j}"] = EdgeImage(f"lp{g}")
                else:
                    i = 2 * g - j
                    vmap[f"v{j}"], vmap[f"w{j}"] = f"w{i}", f"v{i}"
                    emap[f"up{j}"] = EdgeImage(f"up{i}", 1, True)
                    emap[f"lo{j}"] = EdgeImage(f"lo{i}", 1, True)
            for j in range(2 * g):
                if j < g:
                    emap[f"br{j}"] = EdgeImage(f"br{j}")
                else:
                    emap[f"br{j}"] = EdgeImage(f"br{2 * g - j - 1}", 1, True)
            self._cache["cover"] = DoubleCover(self.source_graph(), self.base_graph(), vmap, emap)
        return self._cache["cover"]

    def _require_lengths(self) -> tuple[Lengths, ...]:
        if self.base_lengths is None:
            raise NotApplicableError("the folded chain has no concrete lengths")
        return self.base_lengths

    def prym_divisor(self, x: ChainCoordinates, pole: str = "last") -> Divisor:
        """Divisor of degree ``2g - 2``: one chip per loop and a pole.

        Args:
            x: Chip positions on the ``2g - 1`` loops.
            pole: ``"last"`` puts the pole at ``w_{2g-1}``, ``"end"`` at the
                final vertex ``v_{2g}``, which maps to ``w0``.
        """
        spec = self.source_spec()
        terms = [(spec.point(j, p), 1) for j, p in enumerate(x.positions, start=1)]
        vertex = f"w{2 * self.g - 1}" if pole == "last" else f"v{2 * self.g}"
        terms.append((Point.at_vertex(vertex), -1))
        return Divisor(terms)

    def cell_sample(
        self, t: Tableau, epsilon: int | None = None, free: Mapping[int, Rational] | None = None
    ) -> ChainCoordinates:
        """Prym coordinates in the cell of ``t``.

        Args:
            t: Prym tableau.
            epsilon: Parity class for loop ``g`` when ``g`` is absent from ``t``.
            free: Position for each free pair ``i < g``, shared with loop
                ``2g - i``; unspecified pairs sit at :meth:`generic_position`.
        """
        spec = self.source_spec()
        g = self.g
        free = free or {}
        positions: list[Fraction] = []
        for j in range(1, 2 * g):
            i = min(j, 2 * g - j)
            cells = t.positions(i) or t.positions(2 * g - i)
            if j == g:
                eps = g_parity_class(t, g)
                eps = (epsilon or 0) % 2 if eps is None else eps
                positions.append(diagonal_position(spec, j, eps))
            elif cells:
                positions.append(diagonal_position(spec, j, diagonal(cells[0])))
            else:
                positions.append(as_fraction(free.get(i, self.generic_position(i))))
        return ChainCoordinates(2 * g - 2, tuple(positions))

    def generic_position(self, i: int) -> Fraction:
        """Position of diagonal ``s // 2`` on base loop ``i``, far from the first few diagonals."""
        spec = self.source_spec()
        return diagonal_position(spec, i, spec.torsions[i - 1] // 2)

    def random_sample(
        self, t: Tableau, rng: random.Random, epsilon: int | None = None, denominator: int = 1
    ) -> ChainCoordinates:
        """Cell member with free pairs at random positions on a grid."""
        spec = self.source_spec()
        free = {}
        for i in range(1, self.g):
            steps = int(spec.circumference(i) * denominator)
            free[i] = Fraction(rng.randrange(steps), denominator)
        return self.cell_sample(t, epsilon, free)


def is_prym_coordinates(x: ChainCoordinates, fc: FoldedChain) -> tuple[bool, str | None]:
    """Whether the coordinates are symmetric, and if so their parity.

    The chips on loops ``i`` and ``2g - i`` must sit at equal distances and
    the chip on loop ``g`` at one of its two vertices. Parity is odd when
    that chip sits on ``w_g``.
    """
    spec = fc.source_spec()
    g = fc.g
    if len(x.positions) != 2 * g - 1:
        return False, None
    pos = x.reduced(spec).positions
    for i in range(1, g):
        if pos[i - 1] != pos[2 * g - i - 1]:
            return False, None
    middle = pos[g - 1]
    half = spec.circumference(g) / 2
    if middle == 0:
        return True, parity_name(0)
    if middle == half:
        return True, parity_name(1)
    return False, None


def canonical_check(d: Divisor, fc: FoldedChain) -> bool:
    """Whether a divisor on the base chain is equivalent to the canonical divisor.

    The divisor must have a single pole at ``w0``, two chips on each loop
    ``i < g`` and one chip on loop ``g``. It is canonical exactly when on
    every loop ``i < g`` the two chip positions ``p, q`` (measured from
    ``w_i``) satisfy ``p + q = l_i`` modulo the circumference, and the chip on
    loop ``g`` sits on ``v_g``.

    Raises:
        NotApplicableError: If the divisor does not have that shape.
    """
    graph = fc.base_graph()
    graph.check_divisor(d)
    lengths = fc._require_lengths()
    g = fc.g
    if d[Point.at_vertex("w0")] != -1:
        raise NotApplicableError("expected a single pole at w0")
    chips: dict[int, list[Fraction]] = {i: [] for i in range(1, g + 1)}
    for p, c in d.items():
        if p == Point.at_vertex("w0"):
            continue
        if c < 0:
            raise NotApplicableError(f"unexpected pole at {p!r}")
        loop = _base_loop(p, g)
        if loop is None:
            raise NotApplicableError(f"chip at {p!r} lies on a bridge")
        for _ in range(c):
            chips[loop].append(_base_position(p, loop, g, lengths))
    for i in range(1, g):
        if len(chips[i]) != 2:
            raise NotApplicableError(f"loop {i} must carry two chips")
    if len(chips[g]) != 1:
        raise NotApplicableError(f"loop {g} must carry one chip")
    for i in range(1, g):
        ell, m = lengths[i - 1]
        if (sum(chips[i]) - ell) % (ell + m) != 0:
            return False
    return chips[g][0] == 0


def _base_loop(p: Point, g: int) -> int | None:
    name = p.vertex if p.vertex is not None else p.edge
    assert name is not None
    for prefix in ("up", "lo", "lp", "v", "w"):
        if name.startswith(prefix):
            i = int(name[len(prefix):])
            if prefix == "w" and i == 0:
                return None
            return i if 1 <= i <= g else None
    return None


def _base_position(p: Point, i: int, g: int, lengths: Sequence[Lengths]) -> Fraction:
    if i == g:
        return Fraction(0) if p.vertex is not None else p.offset
    ell, _ = lengths[i - 1]
    if p.vertex == f"w{i}":
        return Fraction(0)
    if p.vertex == f"v{i}":
        return ell
    if p.edge == f"up{i}":
        return p.offset
    return ell + p.offset


def pushforward_is_canonical(fc: FoldedChain, x: ChainCoordinates) -> bool:
    """Canonical test for the image of the Prym divisor with pole on ``v_{2g}``."""
    return canonical_check(pushforward(fc.cover(), fc.prym_divisor(x, pole="end")), fc)


def base_canonical(fc: FoldedChain) -> Divisor:
    """``-w0 + sum(v_i + w_i for i < g) + v_g``."""
    coeffs = {"w0": -1, f"v{fc.g}": 1}
    for i in range(1, fc.g):
        coeffs[f"v{i}"] = 1
        coeffs[f"w{i}"] = 1
    return Divisor.from_vertices(coeffs)

