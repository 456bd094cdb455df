"""Integral homology, Jacobian and Prym lattices of metric graphs and double covers.

Cycles are integer vectors indexed by the graph's edges in their stored
order, with sign +1 when the cycle runs from tail to head. A cycle basis comes
from a spanning tree, so the coordinates of any cycle are its values on the
edges outside the tree.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from tropprym.covers import DoubleCover, HarmonicMorphism, dilation_cycle
from tropprym.errors import ClassificationError
from tropprym.graph_core import HEAD, MetricGraph
from tropprym.intlinalg import (
    IntMatrix,
    identity,
    integer_kernel,
    is_positive_definite,
    matmul,
    rows,
    smith_normal_form,
    transpose,
    unimodular_inverse,
    zeros,
)


@dataclass(frozen=True)
class CycleBasis:
    """Fundamental cycles of a spanning tree.

    Attributes:
        graph: The graph the cycles live on.
        tree_edges: Edge ids of the spanning tree.
        cotree_edges: The remaining edge ids; cycle ``i`` is the unique cycle
            through ``cotree_edges[i]`` traversed tail to head.
        cycles: One edge-coefficient vector per cotree edge.
    """

    graph: MetricGraph
    tree_edges: tuple[str, ...]
    cotree_edges: tuple[str, ...]
    cycles: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.cycles)

    def coordinates(self, chain: dict[str, int] | list[int]) -> list[int]:
        """Coordinates of a cycle given as an edge vector or edge-id mapping.

        Raises:
            ValueError: If the chain is not a cycle.
        """
        vec = self._as_vector(chain)
        coords = [vec[self._edge_pos(e)] for e in self.cotree_edges]
        rebuilt = [0] * len(vec)
        for c, cyc in zip(coords, self.cycles):
            for i, x in enumerate(cyc):
                rebuilt[i] += c * x
        if rebuilt != vec:
            raise ValueError("chain is not a cycle")
        return coords

    def _as_vector(self, chain: dict[str, int] | list[int]) -> list[int]:
        if isinstance(chain, dict):
            return [chain.get(e, 0) for e in self.graph.edge_ids]
        return list(chain)

    def _edge_pos(self, edge_id: str) -> int:
        return self.graph.edge_ids.index(edge_id)


def homology_basis(graph: MetricGraph) -> CycleBasis:
    """Fundamental cycle basis of the breadth-first spanning tree from the first vertex."""
    root = graph.vertices[0].id
    # parent[v] = (edge id, sign of that edge when walking from v up to its parent)
    parent: dict[str, tuple[str, int] | None] = {root: None}
    tree: list[str] = []
    queue = [root]
    for v in queue:
        for edge_id, end in graph.directions(v):
            e = graph.edge(edge_id)
            other = e.endpoint(1 - end)
            if other not in parent:
                parent[other] = (edge_id, 1 if end == HEAD else -1)
                tree.append(edge_id)
                queue.append(other)
    tree_set = set(tree)
    cotree = tuple(e for e in graph.edge_ids if e not in tree_set)
    index = {e: i for i, e in enumerate(graph.edge_ids)}

    def path_to_root(v: str) -> list[int]:
        vec = [0] * len(index)
        while parent[v] is not None:
            edge_id, sign = parent[v]  # type: ignore[misc]
            vec[index[edge_id]] += sign
            e = graph.edge(edge_id)
            v = e.head if sign == 1 else e.tail
        return vec

    cycles = []
    for edge_id in cotree:
        e = graph.edge(edge_id)
        # e from tail to head, then back from head to root and root to tail
        up_head = path_to_root(e.head)
        up_tail = path_to_root(e.tail)
        vec = [h - t for h, t in zip(up_head, up_tail)]
        vec[index[edge_id]] += 1
        cycles.append(tuple(vec))
    return CycleBasis(graph, tuple(tree), cotree, tuple(cycles))


@dataclass(frozen=True)
class PolarizedLattice:
    """Free lattice with a rational inner product and an integral polarization.

    Attributes:
        gram: Symmetric positive definite Gram matrix of the pairing.
        polarization: Square integer matrix of the polarization map from the
            lattice to its dual side.
    """

    gram: tuple[tuple[Fraction, ...], ...]
    polarization: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.gram)
        if any(len(row) != n for row in self.gram) or len(self.polarization) != n:
            raise ValueError("gram and polarization must be square of equal size")
        if not is_positive_definite(self.gram):
            raise ValueError("gram matrix is not symmetric positive definite")

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def elementary_divisors(self) -> list[int]:
        if self.rank == 0:
            return []
        return smith_normal_form([list(r) for r in self.polarization]).invariants


def _pairing(graph: MetricGraph, x: tuple[int, ...] | list[int], y: tuple[int, ...] | list[int]) -> Fraction:
    return sum((a * b * e.length for a, b, e in zip(x, y, graph.edges)), Fraction(0))


def edge_length_gram(graph: MetricGraph, basis: CycleBasis | None = None) -> PolarizedLattice:
    """Jacobian lattice: Gram matrix of the edge-length pairing and the identity polarization."""
    basis = basis or homology_basis(graph)
    gram = tuple(
        tuple(_pairing(graph, ci, cj) for cj in basis.cycles) for ci in basis.cycles
    )
    return PolarizedLattice(gram, tuple(tuple(r) for r in identity(len(basis))))


def _image_chain(m: HarmonicMorphism, cycle: tuple[int, ...]) -> dict[str, int]:
    out: Counter[str] = Counter()
    for coeff, edge_id in zip(cycle, m.source.edge_ids):
        if coeff:
            img = m.edge_map[edge_id]
            out[img.to] += -coeff if img.reversed else coeff
    return dict(out)


def pushforward_matrix(
    m: HarmonicMorphism,
    source_basis: CycleBasis | None = None,
    target_basis: CycleBasis | None = None,
) -> IntMatrix:
    """Matrix of the pushforward on first homology, ``b1(target) x b1(source)``.

    Each source cycle is sent edge by edge to its image chain; dilation factors
    do not enter.
    """
    sb = source_basis or homology_basis(m.source)
    tb = target_basis or homology_basis(m.target)
    cols = [tb.coordinates(_image_chain(m, c)) for c in sb.cycles]
    return transpose(cols, len(tb)) if cols else zeros(len(tb), 0)


def pullback_matrix(
    m: HarmonicMorphism,
    source_basis: CycleBasis | None = None,
    target_basis: CycleBasis | None = None,
) -> IntMatrix:
    """Adjoint of the pushforward under the edge-length pairings, ``b1(source) x b1(target)``.

    A target cycle ``y`` pulls back to the source chain with coefficient
    ``dilation * sign * y(image edge)`` on each source edge, which is again a
    cycle by harmonicity.
    """
    sb = source_basis or homology_basis(m.source)
    tb = target_basis or homology_basis(m.target)
    target_pos = {e: i for i, e in enumerate(m.target.edge_ids)}
    cols = []
    for y in tb.cycles:
        chain = {}
        for e in m.source.edge_ids:
            img = m.edge_map[e]
            sign = -1 if img.reversed else 1
            chain[e] = img.dilation * sign * y[target_pos[img.to]]
        cols.append(sb.coordinates(chain))
    return transpose(cols, len(sb)) if cols else zeros(len(sb), 0)


@dataclass(frozen=True)
class PushforwardClassification:
    """Block decomposition of a pushforward matrix.

    In the new bases, ``target_change^-1 @ matrix @ source_change`` has ``a``
    pairs of equal unit columns, ``b`` columns ``2 e_i``, ``c`` unit columns
    and ``d`` zero columns, in that order (see :func:`block_shape`).
    """

    a: int
    b: int
    c: int
    d: int
    source_change: IntMatrix
    target_change: IntMatrix

    def as_dict(self) -> dict[str, int]:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d}


def block_shape(a: int, b: int, c: int, d: int) -> IntMatrix:
    """The normal form ``[e1 e1 ... ea ea | 2e | e | 0]`` with ``a + b + c`` rows."""
    out = zeros(a + b + c, 2 * a + b + c + d)
    for i in range(a):
        out[i][2 * i] = out[i][2 * i + 1] = 1
    for j in range(b):
        out[a + j][2 * a + j] = 2
    for j in range(c):
        out[a + b + j][2 * a + b + j] = 1
    return out


def _greedy_pairs(mat: IntMatrix, cols: int) -> int:
    seen: Counter[tuple[int, ...]] = Counter()
    pairs = 0
    for j in range(cols):
        col = tuple(row[j] for row in mat)
        if not any(col):
            continue
        # Reversing a basis cycle is unimodular, so columns pair up to sign.
        if next(x for x in col if x) < 0:
            col = tuple(-x for x in col)
        if seen[col]:
            seen[col] -= 1
            pairs += 1
        else:
            seen[col] += 1
    return pairs


def classify_pushforward(
    mat: IntMatrix, *, cols: int | None = None, paired: int | None = None
) -> PushforwardClassification:
    """Bring a pushforward matrix into block shape by unimodular changes of basis.

    ``b`` is read off from the cokernel torsion, which must be 2-elementary.
    The number of pairs ``a`` is not determined by the matrix alone; by
    default it counts equal nonzero columns paired greedily in the given
    basis, and callers that know it from the cover pass ``paired``.

    Args:
        mat: ``g0 x h0`` integer matrix of rank ``g0``.
        cols: ``h0``; needed only if ``g0 == 0``.
        paired: Number of pairs ``a`` to realize.

    Raises:
        ClassificationError: If the rank is not full, the cokernel torsion is
            not 2-elementary, or ``a`` is out of range.
    """
    g0, h0 = len(mat), (len(mat[0]) if mat else cols or 0)
    snf = smith_normal_form(mat, h0)
    inv = snf.invariants
    if len(inv) != g0:
        raise ClassificationError("pushforward does not have full rank")
    if any(x not in (1, 2) for x in inv):
        raise ClassificationError(f"cokernel torsion is not 2-elementary: {inv}")
    b = inv.count(2)
    units = g0 - b
    a = _greedy_pairs(mat, h0) if paired is None else paired
    a = a if paired is not None else min(a, units, h0 - g0)
    if not 0 <= a <= min(units, h0 - g0):
        raise ClassificationError(f"cannot realize {a} pairs")
    c = units - a
    d = h0 - g0 - a
    # snf.left @ mat @ snf.right == D; add unit column i to zero column g0 + i.
    col_op = identity(h0)
    for i in range(a):
        col_op[i][g0 + i] = 1
    col_order = (
        [x for i in range(a) for x in (i, g0 + i)]
        + list(range(units, g0))
        + list(range(a, units))
        + list(range(g0 + a, h0))
    )
    row_order = list(range(a)) + list(range(units, g0)) + list(range(a, units))
    col_perm = zeros(h0, h0)
    for k, j in enumerate(col_order):
        col_perm[j][k] = 1
    row_perm = zeros(g0, g0)
    for k, i in enumerate(row_order):
        row_perm[k][i] = 1
    source_change = matmul(matmul(snf.right, col_op), col_perm)
    target_change = unimodular_inverse(matmul(row_perm, snf.left)) if g0 else []
    check = matmul(matmul(unimodular_inverse(target_change) if g0 else [], mat, g0), source_change, h0)
    if g0 and check != block_shape(a, b, c, d):
        raise ClassificationError("block reduction failed")
    return PushforwardClassification(a, b, c, d, source_change, target_change)


@dataclass(frozen=True)
class PrymData:
    """Everything computed about the Prym variety of a double cover.

    Attributes:
        kernel_basis: ``h0 x (h0 - g0)`` integer matrix whose columns span the
            kernel of the pushforward on homology.
        lattice: Induced pairing and polarization on that kernel.
        components: 2 if the dilation cycle is empty, else 1.
        coker_torsion: Order of the torsion part of the pushforward's cokernel.
        source_betti: ``h0``.
        target_betti: ``g0``.
        pushforward: The pushforward matrix.
    """

    kernel_basis: IntMatrix
    lattice: PolarizedLattice
    components: int
    coker_torsion: int
    source_betti: int
    target_betti: int
    pushforward: IntMatrix

    @property
    def rank(self) -> int:
        return self.lattice.rank

    @property
    def polarization_divisors(self) -> list[int]:
        return self.lattice.elementary_divisors


def prym_lattice(m: DoubleCover) -> PrymData:
    """Kernel lattice of the pushforward with its induced pairing and polarization.

    The pairing is the source Gram matrix restricted to the kernel. The
    polarization sends a kernel element, viewed in the dual of the source
    lattice through the identity polarization, to the quotient of that dual by
    the saturation of the pullback image.
    """
    sb = homology_basis(m.source)
    tb = homology_basis(m.target)
    h0, g0 = len(sb), len(tb)
    push = pushforward_matrix(m, sb, tb)
    kernel = integer_kernel(push, h0)
    k = len(kernel[0]) if kernel and kernel[0] else 0
    source_gram = edge_length_gram(m.source, sb).gram
    gram = matmul(matmul(transpose(kernel, k), source_gram, h0), kernel) if k else []
    pull = pullback_matrix(m, sb, tb)
    pull_snf = smith_normal_form(pull, g0)
    # pull == L^-1 D R^-1 spans the first g0 columns of L^-1 rationally, so the
    # last h0 - g0 rows of L are coordinates on the quotient by its saturation.
    quotient = rows(pull_snf.left, range(g0, h0))
    polarization = matmul(quotient, kernel, h0) if k else []
    lattice = PolarizedLattice(
        tuple(tuple(Fraction(x) for x in row) for row in gram),
        tuple(tuple(row) for row in polarization),
    )
    torsion = 1
    for x in smith_normal_form(push, h0).invariants:
        torsion *= x
    components = 2 if dilation_cycle(m).is_empty else 1
    return PrymData(kernel, lattice, components, torsion, h0, g0, push)


def polarization_divisors(m: DoubleCover) -> list[int]:
    return prym_lattice(m).polarization_divisors


def lattice_report(m: DoubleCover) -> dict[str, Any]:
    """Summary of the Prym lattice in the shape emitted by the command line."""
    data = prym_lattice(m)
    divisors = data.polarization_divisors
    cls = classify_pushforward(data.pushforward, cols=data.source_betti, paired=divisors.count(2))
    return {
        "betti": {"source": data.source_betti, "target": data.target_betti},
        "prym_rank": data.rank,
        "components": data.components,
        "coker_torsion": data.coker_torsion,
        "polarization_divisors": divisors,
        "classification": cls.as_dict(),
    }


__all__ = [
    "CycleBasis",
    "PolarizedLattice",
    "PrymData",
    "PushforwardClassification",
    "block_shape",
    "classify_pushforward",
    "edge_length_gram",
    "homology_basis",
    "lattice_report",
    "polarization_divisors",
    "prym_lattice",
    "pullback_matrix",
    "pushforward_matrix",
]
