"""Sum rules, moments and smoothness quantities of a mask."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import SubdivError, check_budget
from .seqalg import (
    FiniteSequence,
    Mask,
    backward_difference,
    convolve,
    delta,
    subdivide,
    symmetry_center,
)

FLOAT_DIVISIBILITY_TOL = 1e-10


@dataclass(frozen=True)
class SumRuleFactorization:
    """``a(z) = (1 + z + ... + z^{M-1})^J b(z)`` with ``J`` maximal."""

    J: int
    b: FiniteSequence
    dilation: int
    exact: bool = True

    def reconstruct(self) -> FiniteSequence:
        ones = FiniteSequence([1] * self.dilation, 0)
        out = self.b
        for _ in range(self.J):
            out = convolve(out, ones)
        return out


def _divide_by_ones(coeffs: list, M: int):
    """Synthetic division of an ascending coefficient list by ``1+z+...+z^{M-1}``.

    Returns ``(quotient, remainder)``; remainder has ``M-1`` entries.
    """
    n = len(coeffs)
    if n < M:
        return None, list(coeffs)
    work = list(coeffs)
    q = [0] * (n - M + 1)
    for i in range(n - M, -1, -1):
        # leading term of the current dividend sits at i + M - 1
        c = work[i + M - 1]
        q[i] = c
        if c != 0:
            for t in range(M):
                work[i + t] = work[i + t] - c
    return q, work[: M - 1]


def sum_rule_factorization(a: Mask) -> SumRuleFactorization:
    """Maximal order of sum rules and the quotient mask ``b``."""
    if a.seq.is_zero:
        raise SubdivError("zero mask has no sum-rule factorization")
    M = a.dilation
    exact = a.is_exact
    tol = FLOAT_DIVISIBILITY_TOL * float(a.seq.norm1())
    coeffs = list(a.seq.coeffs)
    start = a.seq.start
    J = 0
    while True:
        q, rem = _divide_by_ones(coeffs, M)
        if q is None:
            break
        if exact:
            ok = all(r == 0 for r in rem)
        else:
            ok = all(abs(r) <= tol for r in rem)
        if not ok or all((x == 0 if exact else abs(x) <= tol) for x in q):
            break
        coeffs = q
        J += 1
    return SumRuleFactorization(J, FiniteSequence(coeffs, start), M, exact)


def sum_rule_order(a: Mask) -> int:
    return sum_rule_factorization(a).J


def _power(x, j: int):
    return x**j if j else (x * 0 + 1)


def spatial_sum_rule_check(a: Mask, J: int) -> bool:
    """Check ``sum_k p(g+Mk) a(g+Mk) = M^{-1} sum_k p(k) a(k)`` for ``p = x^j``, ``j < J``."""
    if J < 0:
        raise ValueError("J must be >= 0")
    M = a.dilation
    exact = a.is_exact
    tol = FLOAT_DIVISIBILITY_TOL * max(1.0, float(a.seq.norm1()))
    for j in range(J):
        full = sum((Fraction(k) ** j * c for k, c in a.seq.items()), Fraction(0))
        for gamma in range(M):
            part = sum((Fraction(k) ** j * c for k, c in a.seq.items() if (k - gamma) % M == 0),
                       Fraction(0))
            diff = part - full / M
            if exact:
                if diff != 0:
                    return False
            elif abs(diff) > tol * max(1, abs(a.seq.start) + len(a.seq)) ** j:
                return False
    return True


def moments(a: Mask | FiniteSequence, jmax: int) -> list:
    """``[sum_k k^j a(k) for j in 0..jmax]``."""
    if jmax < 0:
        raise ValueError("jmax must be >= 0")
    seq = a.seq if isinstance(a, Mask) else a
    return [seq.moment(j) for j in range(jmax + 1)]


def first_moment(a: Mask):
    """``m_a = sum_k k a(k)``."""
    return a.seq.moment(1)


def shift_parameter(a: Mask):
    """``s_a = m_a / (M - 1)`` for a normalized mask."""
    m = first_moment(a)
    if isinstance(m, Fraction):
        return m / (a.dilation - 1)
    return m / (a.dilation - 1)


@dataclass(frozen=True)
class LinearPhaseResult:
    ok: bool
    J: int
    m_a: object
    residuals: tuple
    first_failure: Optional[int]


def linear_phase_check(a: Mask, J: Optional[int] = None, tol: float = 1e-10) -> LinearPhaseResult:
    """Check ``sum_k k^j a(k) = m_a^j`` for ``j = 0..J-1`` (``J = sr(a, M)`` by default)."""
    if J is None:
        J = sum_rule_order(a)
    m_a = first_moment(a)
    res = []
    fail = None
    for j in range(J):
        r = a.seq.moment(j) - _power(m_a, j)
        res.append(r)
        bad = (r != 0) if isinstance(r, Fraction) else abs(r) > tol * max(1.0, abs(float(m_a))) ** j
        if bad and fail is None:
            fail = j
    return LinearPhaseResult(fail is None, J, m_a, tuple(res), fail)


# -- smoothness -------------------------------------------------------------


def autocorrelation(b: FiniteSequence) -> FiniteSequence:
    """``c(z) = b(z) * conj(b(1/conj z))`` for real ``b``."""
    return convolve(b, b.reflect())


def sm2_matrix(b: FiniteSequence, M: int) -> np.ndarray:
    """The matrix ``(c(M k - j))_{j,k in [-w, w]}`` with ``w = len(b) - 1``."""
    c = autocorrelation(b)
    w = len(b) - 1
    idx = range(-w, w + 1)
    return np.array([[float(c[M * k - j]) for k in idx] for j in idx], dtype=float)


def sm2(a: Mask, fact: Optional[SumRuleFactorization] = None) -> tuple[float, complex]:
    """``(sm_2(a, M), lambda_c)`` from the largest eigenvalue of the autocorrelation matrix."""
    if fact is None:
        fact = sum_rule_factorization(a)
    if fact.b.is_zero:
        raise SubdivError("degenerate quotient mask")
    mat = sm2_matrix(fact.b, a.dilation)
    eig = np.linalg.eigvals(mat)
    lam = complex(eig[np.argmax(np.abs(eig))])
    mod = abs(lam)
    if mod == 0:
        return math.inf, lam
    return -0.5 - 0.5 * math.log(mod, a.dilation), lam


def _coset_sum_max(data: np.ndarray, start: int, step: int) -> float:
    best = 0.0
    absd = np.abs(data)
    for gamma in range(step):
        # indices j with j ≡ gamma mod step, j = start + i
        first = (gamma - start) % step
        s = float(absd[first::step].sum())
        if s > best:
            best = s
    return best


def _float_subdivision_of_delta(b: FiniteSequence, M: int, n: int) -> tuple[np.ndarray, int]:
    """``S_b^n delta`` in float64 as (array, start index)."""
    bb = b.as_array()
    v = np.array([1.0])
    start = 0
    for _ in range(n):
        check_budget(len(v) * M + len(bb), "S_b^n delta")
        up = np.zeros((len(v) - 1) * M + 1)
        up[::M] = v
        v = M * np.convolve(up, bb)
        start = M * start + b.start
    return v, start


def sminf_lower_bound(a: Mask, n: int, fact: Optional[SumRuleFactorization] = None) -> float:
    """Coset-sum lower bound on ``sm_inf(a, M)`` at level ``n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if fact is None:
        fact = sum_rule_factorization(a)
    M = a.dilation
    b = fact.b
    width = len(b)
    check_budget(((M**n - 1) // (M - 1)) * width + 1, f"S_b^{n} delta")
    data, start = _float_subdivision_of_delta(b, M, n)
    rho_n = _coset_sum_max(data, start, M**n)
    if rho_n == 0:
        return math.inf
    return -math.log(rho_n, M) / n


def rho_empirical(a: Mask, n: int, J: Optional[int] = None) -> float:
    """``||nabla^J S_a^n delta||_inf^{1/n}``, a finite-level estimate only."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if J is None:
        J = sum_rule_order(a)
    M = a.dilation
    check_budget(((M**n - 1) // (M - 1)) * len(a.seq) + 1, f"S_a^{n} delta")
    data, _ = _float_subdivision_of_delta(a.seq, M, n)
    d = np.asarray(data)
    for _ in range(J):
        d = np.concatenate([d, [0.0]]) - np.concatenate([[0.0], d])
    return float(np.max(np.abs(d))) ** (1.0 / n)


@dataclass
class SmoothnessReport:
    sr: int
    sm2: float
    lambda_c: complex
    sminf_lower: dict = field(default_factory=dict)
    rho_empirical: dict = field(default_factory=dict)
    inexact: bool = False

    @property
    def certified_sminf(self) -> float:
        """Best certified lower bound: ``max(sm2 - 1/2, max_n coset bound)``."""
        vals = [self.sm2 - 0.5] + list(self.sminf_lower.values())
        return max(vals)

    @property
    def best_level(self) -> Optional[int]:
        if not self.sminf_lower:
            return None
        n = max(self.sminf_lower, key=self.sminf_lower.get)
        return n if self.sminf_lower[n] >= self.sm2 - 0.5 else None


def smoothness_report(a: Mask, n_max: int = 3, rho_levels: tuple = ()) -> SmoothnessReport:
    """Collect ``sr``, ``sm_2`` and coset bounds for ``n = 1..n_max``.

    Levels that would exceed the coefficient budget are skipped.
    """
    from .errors import ResourceLimitError

    fact = sum_rule_factorization(a)
    s2, lam = sm2(a, fact)
    rep = SmoothnessReport(fact.J, s2, lam, inexact=not a.is_exact)
    if fact.J >= 1:
        for n in range(1, n_max + 1):
            try:
                rep.sminf_lower[n] = sminf_lower_bound(a, n, fact)
            except ResourceLimitError:
                break
    for n in rho_levels:
        try:
            rep.rho_empirical[n] = rho_empirical(a, n, fact.J)
        except ResourceLimitError:
            break
    return rep


__all__ = [
    "SumRuleFactorization",
    "sum_rule_factorization",
    "sum_rule_order",
    "spatial_sum_rule_check",
    "moments",
    "first_moment",
    "shift_parameter",
    "LinearPhaseResult",
    "linear_phase_check",
    "autocorrelation",
    "sm2_matrix",
    "sm2",
    "sminf_lower_bound",
    "rho_empirical",
    "SmoothnessReport",
    "smoothness_report",
    "symmetry_center",
]
