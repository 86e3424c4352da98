"""Gaussian elimination over the rationals.

Matrices are lists of rows of :class:`fractions.Fraction`.  Everything here
is exact; no pivoting heuristics are needed beyond "first nonzero".
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

Matrix = list[list[Fraction]]


def to_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def matmul(A: Matrix, B: Matrix) -> Matrix:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    out = []
    for row in A:
        out.append([sum((row[k] * B[k][j] for k in range(inner) if row[k]), Fraction(0))
                    for j in range(cols)])
    return out


def matvec(A: Matrix, x: Sequence[Fraction]) -> list[Fraction]:
    return [sum((a * b for a, b in zip(row, x) if a), Fraction(0)) for row in A]


def rref(A: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot column list."""
    R = [list(row) for row in A]
    if not R:
        return R, []
    nrows, ncols = len(R), len(R[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        p = next((i for i in range(r, nrows) if R[i][c] != 0), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        inv = 1 / R[r][c]
        R[r] = [x * inv for x in R[r]]
        for i in range(nrows):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
    return R, pivots


def rank(A: Matrix) -> int:
    return len(rref(A)[1])


def nullspace(A: Matrix, ncols: Optional[int] = None) -> list[list[Fraction]]:
    """Basis of ``{x : A x = 0}``, one vector per free column."""
    if not A:
        n = ncols or 0
        return identity(n)
    n = len(A[0])
    R, pivots = rref(A)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for i, p in enumerate(pivots):
            x[p] = -R[i][f]
        basis.append(x)
    return basis


class Inconsistent(ValueError):
    """The linear system has no solution."""


def solve_affine(A: Matrix, b: Sequence, ncols: Optional[int] = None) -> tuple[list[Fraction], list[list[Fraction]]]:
    """General solution of ``A x = b`` as ``(particular, nullspace basis)``.

    Raises :class:`Inconsistent` when there is no solution.
    """
    n = len(A[0]) if A else (ncols or 0)
    if not A:
        return [Fraction(0)] * n, identity(n)
    aug = [list(row) + [Fraction(bi)] for row, bi in zip(A, b)]
    R, pivots = rref(aug)
    if n in pivots:
        raise Inconsistent("linear system is inconsistent")
    x = [Fraction(0)] * n
    for i, p in enumerate(pivots):
        x[p] = R[i][n]
    return x, nullspace(A)
