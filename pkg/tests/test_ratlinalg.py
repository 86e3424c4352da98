from __future__ import annotations

from fractions import Fraction as F

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from conftest import small_fracs
from subdivkit import ratlinalg as rl

matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(small_fracs, min_size=c, max_size=c), min_size=r, max_size=r)))


def test_rref_small():
    R, piv = rl.rref([[F(2), F(4)], [F(1), F(3)]])
    assert R == [[1, 0], [0, 1]] and piv == [0, 1]


def test_inconsistent_system():
    with pytest.raises(rl.Inconsistent):
        rl.solve_affine([[F(1), F(1)], [F(2), F(2)]], [F(1), F(3)])


@given(matrices)
def test_rank_and_nullspace_match_sympy(A):
    ncols = len(A[0])
    S = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in A])
    assert rl.rank(A) == S.rank()
    null = rl.nullspace(A, ncols)
    assert len(null) == ncols - S.rank()
    for v in null:
        assert all(x == 0 for x in rl.matvec(A, v))


@given(matrices, st.data())
def test_solve_affine_solutions(A, data):
    ncols = len(A[0])
    x = data.draw(st.lists(small_fracs, min_size=ncols, max_size=ncols))
    b = rl.matvec(A, x)
    part, null = rl.solve_affine(A, b, ncols)
    assert rl.matvec(A, part) == b
    for v in null:
        assert all(y == 0 for y in rl.matvec(A, v))
