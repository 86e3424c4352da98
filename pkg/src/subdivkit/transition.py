"""Shifted transition operators and exact sampling of refinable functions.

For a mask ``a`` with dilation ``M`` and a shift ``gamma`` the operator is

    [T v](n) = M * sum_k a(k) v(gamma + M n - k)

and it leaves sequences supported on ``Z ∩ [(l - gamma)/(M-1), (h - gamma)/(M-1)]``
invariant, so a finite matrix captures every eigenvector with a nonzero
eigenvalue.  The eigenvector for eigenvalue 1 holds the values of the
refinable function on a shifted integer lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import ratlinalg as rl
from .errors import EigenError, SubdivError, check_budget
from .seqalg import (
    FiniteSequence,
    Mask,
    backward_difference,
    convolve,
    iterated_mask,
)

FLOAT_CLUSTER_TOL = 1e-8


def _ceil_div(p: int, q: int) -> int:
    return -((-p) // q)


def invariant_range(a: Mask, gamma: int) -> Optional[tuple[int, int]]:
    """Integer points of ``[(l - gamma)/(M-1), (h - gamma)/(M-1)]``, or None if empty."""
    if a.seq.is_zero:
        return None
    l, h = a.support
    M = a.dilation
    lo = _ceil_div(l - gamma, M - 1)
    hi = (h - gamma) // (M - 1)
    if lo > hi:
        return None
    return lo, hi


@dataclass(frozen=True)
class TransitionMatrix:
    """``T[n, m] = M a(gamma + M n - m)`` for ``n, m`` in ``index_range``."""

    mask: Mask
    gamma: int
    index_range: Optional[tuple[int, int]]
    entries: tuple

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def indices(self) -> range:
        if self.index_range is None:
            return range(0)
        return range(self.index_range[0], self.index_range[1] + 1)

    @property
    def is_exact(self) -> bool:
        return self.mask.is_exact

    def as_array(self) -> np.ndarray:
        if not self.entries:
            return np.zeros((0, 0))
        return np.array([[float(x) for x in row] for row in self.entries], dtype=float)

    def as_fractions(self) -> list[list[Fraction]]:
        if not self.is_exact:
            raise SubdivError("matrix has float entries")
        return [list(row) for row in self.entries]

    def apply(self, v: FiniteSequence) -> FiniteSequence:
        """Matrix times the restriction of ``v`` to ``index_range``."""
        idx = self.indices
        vec = [v[m] for m in idx]
        out = [sum((t * x for t, x in zip(row, vec) if t != 0), Fraction(0)) for row in self.entries]
        return FiniteSequence(out, idx.start if len(idx) else 0)


def apply_transition(a: Mask, gamma: int, v: FiniteSequence) -> FiniteSequence:
    """``[T v](n) = M sum_k a(k) v(gamma + M n - k)`` evaluated directly."""
    if v.is_zero or a.seq.is_zero:
        return FiniteSequence()
    M = a.dilation
    (la, ha), (lv, hv) = a.support, v.support
    # need gamma + M n - k in [lv, hv] for some k in [la, ha]
    n0 = _ceil_div(lv + la - gamma, M)
    n1 = (hv + ha - gamma) // M
    out = []
    for n in range(n0, n1 + 1):
        s = Fraction(0)
        for k, ak in a.seq.items():
            x = v[gamma + M * n - k]
            if x != 0:
                s = s + ak * x
        out.append(M * s)
    return FiniteSequence(out, n0)


def transition_matrix(a: Mask, gamma: int) -> TransitionMatrix:
    rng = invariant_range(a, gamma)
    if rng is None:
        return TransitionMatrix(a, gamma, None, ())
    lo, hi = rng
    check_budget((hi - lo + 1) ** 2, "transition matrix")
    M = a.dilation
    rows = tuple(tuple(M * a[gamma + M * n - m] for m in range(lo, hi + 1)) for n in range(lo, hi + 1))
    return TransitionMatrix(a, gamma, rng, rows)


def spectrum(T: TransitionMatrix) -> np.ndarray:
    """All eigenvalues, multiplicity counted, sorted by decreasing modulus."""
    if T.size == 0:
        return np.zeros(0, dtype=complex)
    eig = np.linalg.eigvals(T.as_array()).astype(complex)
    order = sorted(range(len(eig)), key=lambda i: (-abs(eig[i]), -eig[i].real, -eig[i].imag))
    return eig[order]


def _minus_identity(A: list[list[Fraction]]) -> list[list[Fraction]]:
    return [[x - (1 if i == j else 0) for j, x in enumerate(row)] for i, row in enumerate(A)]


def eigenvalue_one_multiplicity(T: TransitionMatrix) -> tuple[int, int]:
    """``(geometric, algebraic-lower-bound)`` multiplicity data for eigenvalue 1.

    For exact matrices returns the nullities of ``T - I`` and ``(T - I)^2``.
    For float matrices returns the number of eigenvalues within the cluster
    tolerance of 1, twice.
    """
    if T.size == 0:
        return 0, 0
    if T.is_exact:
        B = _minus_identity(T.as_fractions())
        n = T.size
        k1 = n - rl.rank(B)
        k2 = n - rl.rank(rl.matmul(B, B))
        return k1, k2
    eig = np.linalg.eigvals(T.as_array())
    c = int(np.sum(np.abs(eig - 1.0) < FLOAT_CLUSTER_TOL))
    return c, c


def unit_eigenvector(T: TransitionMatrix) -> FiniteSequence:
    """Eigenvector of eigenvalue 1 normalized to unit sum.

    Raises :class:`EigenError` when 1 is not a simple eigenvalue or the
    eigenvector sums to zero.
    """
    k1, k2 = eigenvalue_one_multiplicity(T)
    if k1 == 0:
        raise EigenError(f"no eigenvalue 1 for shift {T.gamma}")
    if k1 != 1 or k2 != 1:
        raise EigenError(f"eigenvalue 1 is not simple for shift {T.gamma} (nullities {k1}, {k2})")
    lo = T.index_range[0]
    if T.is_exact:
        basis = rl.nullspace(_minus_identity(T.as_fractions()))
        v = basis[0]
        s = sum(v, Fraction(0))
        if s == 0:
            raise EigenError("eigenvector of eigenvalue 1 sums to zero")
        return FiniteSequence([x / s for x in v], lo)
    vals, vecs = np.linalg.eig(T.as_array())
    i = int(np.argmin(np.abs(vals - 1.0)))
    v = np.real(vecs[:, i])
    s = v.sum()
    if abs(s) < 1e-12 * max(1.0, np.abs(v).max()):
        raise EigenError("eigenvector of eigenvalue 1 sums to zero")
    return FiniteSequence([float(x) for x in v / s], lo)


def integer_samples(a: Mask) -> FiniteSequence:
    """``w(k) = phi(k)`` from the shift-0 transition matrix; needs at least one sum rule."""
    from .analysis import sum_rule_order

    if sum_rule_order(a) < 1:
        raise SubdivError("integer samples need at least one sum rule for the unit-sum normalization")
    return unit_eigenvector(transition_matrix(a, 0))


def eval_phi(a: Mask, s) -> object:
    """``phi(s)`` for an admissible rational ``s``, by a finite computation."""
    from .interp import admissible_params

    s = Fraction(s)
    adm = admissible_params(s, a.dilation)
    M = a.dilation
    An = iterated_mask(a, adm.n_s)
    big = Mask(An, M**adm.n_s)
    v = unit_eigenvector(transition_matrix(big, adm.gamma))
    if adm.m_s == 0:
        return v[0]
    Am = iterated_mask(a, adm.m_s)
    return M**adm.m_s * convolve(Am, v)[0]


@dataclass(frozen=True)
class PhiSamples:
    """Values at ``x = M^{-level} (start + i)``; derivative approximants when ``deriv > 0``."""

    dilation: int
    level: int
    deriv: int
    start: int
    values: tuple

    def points(self) -> list[tuple[Fraction, object]]:
        h = Fraction(1, self.dilation**self.level)
        return [((self.start + i) * h, v) for i, v in enumerate(self.values)]

    def at(self, k: int):
        i = k - self.start
        if 0 <= i < len(self.values):
            return self.values[i]
        return Fraction(0)

    def value_at(self, x) -> object:
        x = Fraction(x) * self.dilation**self.level
        if x.denominator != 1:
            raise ValueError(f"{x} is not on the level-{self.level} grid")
        return self.at(int(x))


def grid_range(a: Mask, n: int) -> tuple[int, int]:
    l, h = a.support
    M = a.dilation
    return _ceil_div(M**n * l, M - 1), (M**n * h) // (M - 1)


def sample_phi_grid(a: Mask, n: int, deriv: int = 0, w: Optional[FiniteSequence] = None) -> PhiSamples:
    """``phi(M^{-n} k) = M^n [A_n * w](k)`` over the whole support, plus scaled differences."""
    if n < 0 or deriv < 0:
        raise ValueError("level and derivative order must be >= 0")
    if w is None:
        w = integer_samples(a)
    M = a.dilation
    lo, hi = grid_range(a, n)
    check_budget(hi - lo + 1, f"level-{n} grid")
    vals = convolve(iterated_mask(a, n), w).scale(Fraction(M**n))
    if deriv:
        vals = backward_difference(vals, deriv).scale(Fraction(M ** (deriv * n)))
        hi += deriv
    out = tuple(vals[k] for k in range(lo, hi + 1))
    return PhiSamples(M, n, deriv, lo, out)
