"""Exact integer and rational matrix helpers.

Matrices are plain lists of rows. The Smith normal form routine returns the
unimodular transforms so callers can read off kernels, cokernels and change
of basis matrices. The matrices met in practice have a few dozen entries, so
a direct pivoting algorithm is used.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

IntMatrix = list[list[int]]


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(rows: int, cols: int) -> IntMatrix:
    return [[0] * cols for _ in range(rows)]


def shape(a: Sequence[Sequence[int]], cols: int | None = None) -> tuple[int, int]:
    """Rows and columns; ``cols`` disambiguates matrices with no rows."""
    if not a:
        return 0, cols or 0
    return len(a), len(a[0])


def transpose(a: Sequence[Sequence[int]], cols: int = 0) -> IntMatrix:
    if not a:
        return [[] for _ in range(cols)]
    return [list(col) for col in zip(*a)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence], inner: int | None = None) -> list[list]:
    """Matrix product that tolerates empty dimensions.

    Args:
        a: Left factor, ``m x k``.
        b: Right factor, ``k x n``.
        inner: ``k``, needed only when ``a`` has no rows and ``b`` no columns.
    """
    rows = len(a)
    cols = len(b[0]) if b else 0
    k = len(b) if b else (len(a[0]) if a else (inner or 0))
    return [[sum(a[i][t] * b[t][j] for t in range(k)) for j in range(cols)] for i in range(rows)]


def columns(a: Sequence[Sequence[int]], idx: Sequence[int]) -> IntMatrix:
    return [[row[j] for j in idx] for row in a]


def rows(a: Sequence[Sequence[int]], idx: Sequence[int]) -> IntMatrix:
    return [list(a[i]) for i in idx]


@dataclass(frozen=True)
class SmithForm:
    """``left @ matrix @ right == diagonal`` with unimodular ``left`` and ``right``.

    ``diagonal`` has the shape of the input; its nonzero diagonal entries are
    positive, come first, and each divides the next.
    """

    left: IntMatrix
    diagonal: IntMatrix
    right: IntMatrix

    @property
    def invariants(self) -> list[int]:
        """Nonzero diagonal entries."""
        n = min(len(self.diagonal), len(self.right))
        return [self.diagonal[i][i] for i in range(n) if self.diagonal[i][i] != 0]

    @property
    def rank(self) -> int:
        return len(self.invariants)


def smith_normal_form(matrix: Sequence[Sequence[int]], cols: int | None = None) -> SmithForm:
    """Smith normal form with transforms.

    Args:
        matrix: Integer matrix with ``m`` rows.
        cols: Column count; required only when ``m == 0``.

    Returns:
        The factorization ``left @ matrix @ right == diagonal``.
    """
    m, n = shape(matrix, cols)
    d = [list(map(int, row)) for row in matrix]
    left = identity(m)
    right = identity(n)

    def swap_rows(i: int, j: int) -> None:
        d[i], d[j] = d[j], d[i]
        left[i], left[j] = left[j], left[i]

    def swap_cols(i: int, j: int) -> None:
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in right:
            row[i], row[j] = row[j], row[i]

    def add_row(src: int, dst: int, k: int) -> None:
        # row dst += k * row src
        if k:
            d[dst] = [x + k * y for x, y in zip(d[dst], d[src])]
            left[dst] = [x + k * y for x, y in zip(left[dst], left[src])]

    def add_col(src: int, dst: int, k: int) -> None:
        if k:
            for row in d:
                row[dst] += k * row[src]
            for row in right:
                row[dst] += k * row[src]

    t = 0
    while t < min(m, n):
        entries = [(abs(d[i][j]), i, j) for i in range(t, m) for j in range(t, n) if d[i][j]]
        if not entries:
            break
        _, pi, pj = min(entries)
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            done = True
            for i in range(t + 1, m):
                if d[i][t]:
                    q = d[i][t] // d[t][t]
                    add_row(t, i, -q)
                    if d[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if d[t][j]:
                    q = d[t][j] // d[t][t]
                    add_col(t, j, -q)
                    if d[t][j]:
                        swap_cols(t, j)
                        done = False
            if not done:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if d[i][j] % d[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(bad, t, 1)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            left[t] = [-x for x in left[t]]
        t += 1
    return SmithForm(left, d, right)


def unimodular_inverse(a: Sequence[Sequence[int]]) -> IntMatrix:
    """Inverse of a unimodular integer matrix.

    Raises:
        ValueError: If the matrix is not invertible over the integers.
    """
    inv = rational_inverse([[Fraction(x) for x in row] for row in a])
    out = []
    for row in inv:
        if any(x.denominator != 1 for x in row):
            raise ValueError("matrix is not unimodular")
        out.append([int(x) for x in row])
    return out


def rational_inverse(a: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    n = len(a)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for c in range(n):
        piv = next((r for r in range(c, n) if aug[r][c] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        aug[c], aug[piv] = aug[piv], aug[c]
        p = aug[c][c]
        aug[c] = [x / p for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


def determinant(a: Sequence[Sequence[Fraction | int]]) -> Fraction:
    n = len(a)
    m = [list(map(Fraction, row)) for row in a]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            if m[r][c] != 0:
                f = m[r][c] / m[c][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return det


def is_positive_definite(a: Sequence[Sequence[Fraction | int]]) -> bool:
    """Symmetric with every leading principal minor positive (Sylvester's criterion)."""
    n = len(a)
    if any(a[i][j] != a[j][i] for i in range(n) for j in range(n)):
        return False
    return all(determinant([row[:k] for row in a[:k]]) > 0 for k in range(1, n + 1))


def integer_kernel(a: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
    """Basis of the integer kernel as the columns of an ``n x k`` matrix.

    The basis spans a saturated sublattice because it consists of columns of a
    unimodular matrix.
    """
    snf = smith_normal_form(a, cols)
    n = len(snf.right)
    return columns(snf.right, range(snf.rank, n))


def elementary_divisors(a: Sequence[Sequence[int]], cols: int | None = None) -> list[int]:
    return smith_normal_form(a, cols).invariants
