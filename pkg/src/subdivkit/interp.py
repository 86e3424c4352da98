"""Shift admissibility, interpolation certificates and reproduction checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .analysis import (
    SmoothnessReport,
    shift_parameter,
    smoothness_report,
    sum_rule_order,
)
from .errors import EigenError, InadmissibleError, SubdivError
from .seqalg import (
    FiniteSequence,
    Mask,
    convolve,
    coset,
    delta,
    iterated_mask,
    subdivide,
)
from .transition import PhiSamples, sample_phi_grid, transition_matrix, unit_eigenvector

FLOAT_RESIDUAL_TOL = 1e-10
SEARCH_BOUND = 32


@dataclass(frozen=True)
class Admissibility:
    """``gamma = M^{m_s} (M^{n_s} - 1) s_a`` is an integer, with ``(m_s, n_s)`` minimal."""

    s_a: Fraction
    dilation: int
    m_s: int
    n_s: int
    gamma: int


def admissible_params(s_a, M: int, max_m: int = SEARCH_BOUND, max_n: int = SEARCH_BOUND) -> Admissibility:
    """Smallest ``m_s``, then smallest ``n_s``, making the shift integral."""
    s = Fraction(s_a)
    for m_s in range(max_m + 1):
        for n_s in range(1, max_n + 1):
            g = M**m_s * (M**n_s - 1) * s
            if g.denominator == 1:
                return Admissibility(s, M, m_s, n_s, int(g))
    raise InadmissibleError(f"s_a = {s} admits no (m_s, n_s) with m_s <= {max_m}, n_s <= {max_n} for M = {M}")


@dataclass(frozen=True)
class Verdict:
    kind: str  # "verified" | "unconfirmed" | "failed"
    m: int
    reason: str = ""

    @property
    def verified(self) -> bool:
        return self.kind == "verified"

    def __str__(self) -> str:
        if self.kind == "verified":
            return f"verified({self.m})"
        if self.kind == "unconfirmed":
            return "identities-hold-smoothness-unconfirmed"
        return f"failed({self.reason})"


@dataclass
class InterpolationCertificate:
    admissibility: Optional[Admissibility]
    w: Optional[FiniteSequence]
    support_window: Optional[tuple[int, int]]
    residual_12: object = None
    residual_13: object = None
    residual_14: object = None
    smoothness: Optional[SmoothnessReport] = None
    verdict: Verdict = field(default_factory=lambda: Verdict("failed", 0, "not checked"))
    exact: bool = True

    @property
    def identities_hold(self) -> bool:
        return self.verdict.kind in ("verified", "unconfirmed")


def _max_residual(diff: FiniteSequence):
    return diff.norm_inf()


def _is_zero(r, exact: bool, scale: float) -> bool:
    if exact:
        return r == 0
    return abs(r) <= FLOAT_RESIDUAL_TOL * max(1.0, scale)


def w_window(a: Mask, adm: Admissibility) -> tuple[int, int]:
    """``Z ∩ (l/(M-1) - M^{m_s} s_a, h/(M-1) - M^{m_s} s_a)``, endpoints excluded."""
    return window_for_support(a.support, a.dilation, adm)


def window_for_support(support: tuple[int, int], M: int, adm: Admissibility) -> tuple[int, int]:
    l, h = support
    c = M**adm.m_s * adm.s_a
    left = Fraction(l, M - 1) - c
    right = Fraction(h, M - 1) - c
    lo = left.__floor__() + 1
    hi = right.__ceil__() - 1
    return lo, hi


def interpolation_residuals(a: Mask, adm: Admissibility, w: Optional[FiniteSequence] = None):
    """Return ``(w, window, r12, r13, r14)`` for the identities characterizing interpolation.

    With ``m_s = 0`` only ``r14`` is computed and ``w`` is the Dirac sequence.
    Otherwise ``w`` defaults to the unit eigenvector of the transition matrix.
    """
    M = a.dilation
    An = iterated_mask(a, adm.n_s)
    Mn = M**adm.n_s
    if adm.m_s == 0 and w is None:
        c = coset(An, adm.gamma, Mn)
        r14 = _max_residual(c - delta().scale(Fraction(1, Mn)))
        return delta(), None, None, None, r14
    if w is None:
        w = unit_eigenvector(transition_matrix(Mask(An, Mn), adm.gamma))
    window = w_window(a, adm)
    Am = iterated_mask(a, adm.m_s)
    Mm = M**adm.m_s
    lhs12 = coset(convolve(Am, w), 0, Mm) if Mm > 1 else convolve(Am, w)
    r12 = _max_residual(lhs12 - delta().scale(Fraction(1, Mm)))
    lhs13 = coset(convolve(An, w), adm.gamma, Mn)
    r13 = _max_residual(lhs13 - w.scale(Fraction(1, Mn)))
    return w, window, r12, r13, None


def verify_interpolatory(
    a: Mask,
    s_a=None,
    m: int = 0,
    n_max: int = 4,
    report: Optional[SmoothnessReport] = None,
) -> InterpolationCertificate:
    """Certificate that the refinable function of ``a`` is ``C^m`` and ``s_a``-interpolating.

    The verdict is ``verified(m)`` only when all identities hold and the best
    certified lower bound on the Hölder-type exponent exceeds ``m``.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    exact = a.is_exact
    if s_a is None:
        s_a = shift_parameter(a)
        if not isinstance(s_a, Fraction):
            s_a = Fraction(s_a).limit_denominator(10**6)
    adm = admissible_params(s_a, a.dilation)
    cert = InterpolationCertificate(adm, None, None, exact=exact)
    total = a.total()
    if not _is_zero(total - 1, exact, 1.0):
        cert.verdict = Verdict("failed", m, f"mask sums to {total}, not 1")
        return cert
    try:
        w, window, r12, r13, r14 = interpolation_residuals(a, adm)
    except EigenError as exc:
        cert.verdict = Verdict("failed", m, str(exc))
        return cert
    cert.w, cert.support_window = w, window
    cert.residual_12, cert.residual_13, cert.residual_14 = r12, r13, r14
    scale = float(iterated_mask(a, adm.n_s).norm1())
    if adm.m_s == 0:
        if not _is_zero(r14, exact, scale):
            cert.verdict = Verdict("failed", m, f"coset identity residual {r14}")
            return cert
    else:
        lo, hi = window
        sup = w.support
        if sup is not None and (sup[0] < lo or sup[1] > hi):
            cert.verdict = Verdict("failed", m, f"w supported on {sup}, outside window [{lo}, {hi}]")
            return cert
        if not _is_zero(r12, exact, scale):
            cert.verdict = Verdict("failed", m, f"first identity residual {r12}")
            return cert
        if not _is_zero(r13, exact, scale):
            cert.verdict = Verdict("failed", m, f"eigen identity residual {r13}")
            return cert
    if report is None:
        try:
            report = smoothness_report(a, n_max=n_max)
        except SubdivError as exc:
            cert.verdict = Verdict("unconfirmed", m, str(exc))
            return cert
    cert.smoothness = report
    bound = report.certified_sminf
    if bound > m:
        cert.verdict = Verdict("verified", m)
    else:
        cert.verdict = Verdict("unconfirmed", m, f"best lower bound {bound:.6f} does not exceed {m}")
    return cert


def ns_step_check(a: Mask, s_a, v: FiniteSequence, q: int = 1, tol: float = FLOAT_RESIDUAL_TOL) -> bool:
    """Data return after every ``n_s`` steps: ``[S^{q n_s} v](shift + M^{q n_s} k) = v(k)``."""
    if q < 1:
        raise ValueError("q must be >= 1")
    M = a.dilation
    adm = admissible_params(s_a, M)
    if adm.m_s != 0:
        raise InadmissibleError(f"s_a = {adm.s_a} needs m_s = {adm.m_s} > 0; no finite-step identity")
    ns = adm.n_s
    geo = sum(M ** (i * ns) for i in range(q))
    shift = geo * adm.gamma
    out = subdivide(a, v, q * ns)
    got = coset(out, shift, M ** (q * ns))
    diff = got - v
    if a.is_exact and v.is_exact:
        return diff.is_zero
    return float(diff.norm_inf()) <= tol * max(1.0, float(v.norm_inf()))


# -- polynomial reproduction ----------------------------------------------------


def _window_subdivision(a: Mask, f: Callable[[int], object], L: int, H: int, n: int):
    """Subdivide ``f`` sampled on ``[L, H]``; return data and the exact-core index range."""
    data = FiniteSequence([f(k) for k in range(L, H + 1)], L)
    out = subdivide(a, data, n)
    An_l, An_h = iterated_mask(a, n).support
    Mn = a.dilation**n
    # j is exact iff every k with A_n(j - Mn k) != 0 lies inside [L, H]
    j_lo = Mn * (L - 1) + An_h + 1
    j_hi = Mn * (H + 1) + An_l - 1
    return out, j_lo, j_hi


def polynomial_reproduction_check(a: Mask, degree: int, n: int = 1, s_a=None, tol: float = 1e-9) -> bool:
    """``S^n p = p(M^{-n}(s_a + .) - s_a)`` for monomials of degree ``<= degree``."""
    sr = sum_rule_order(a)
    if degree >= sr:
        raise ValueError(f"degree {degree} must be below the sum-rule order {sr}")
    if n < 1:
        raise ValueError("n must be >= 1")
    if s_a is None:
        s_a = shift_parameter(a)
    exact = a.is_exact and isinstance(s_a, Fraction)
    l, h = a.support
    width = h - l + 1
    W = 4 * width + 2
    Mn = a.dilation**n
    for d in range(degree + 1):
        out, j_lo, j_hi = _window_subdivision(a, lambda k: Fraction(k) ** d, -W, W, n)
        if j_lo > j_hi:
            raise SubdivError("window too small for the requested level")
        for j in range(j_lo, j_hi + 1):
            want = (Fraction(1, Mn) * (s_a + j) - s_a) ** d
            got = out[j]
            if exact:
                if got != want:
                    return False
            elif abs(got - want) > tol * max(1.0, abs(float(want))):
                return False
    return True


def drift_formula(a: Mask, n: int, k: int):
    """``M^{-n} k - (1 - M^{-n}) m_a / (M - 1)``: where linear data lands after ``n`` steps."""
    M = a.dilation
    m_a = shift_parameter(a) * (M - 1)
    r = Fraction(1, M**n)
    return r * k - (1 - r) * m_a / (M - 1)


def drift_check(a: Mask, n: int) -> bool:
    """Compare subdivided linear data ``v0(k) = k`` with :func:`drift_formula` on the exact core."""
    l, h = a.support
    W = 4 * (h - l + 1) + 2
    out, j_lo, j_hi = _window_subdivision(a, lambda k: Fraction(k), -W, W, n)
    for j in range(j_lo, j_hi + 1):
        want = drift_formula(a, n, j)
        got = out[j]
        if a.is_exact:
            if got != want:
                return False
        elif abs(got - want) > 1e-9 * max(1.0, abs(float(want))):
            return False
    return True


def phi_identity_check(a: Mask, s_a=None, n: int = 1, samples: Optional[PhiSamples] = None,
                       jmax: Optional[int] = None, tol: float = 1e-9) -> bool:
    """``sum_k k^j phi(x + k) = (s_a - x)^j`` at every level-``n`` grid point, ``j < sr``."""
    if s_a is None:
        s_a = shift_parameter(a)
    sr = sum_rule_order(a)
    if jmax is None:
        jmax = sr - 1
    if jmax >= sr:
        raise ValueError("moment order must be below the sum-rule order")
    if samples is None:
        samples = sample_phi_grid(a, n)
    n = samples.level
    Mn = a.dilation**n
    exact = all(isinstance(v, Fraction) for v in samples.values) and isinstance(s_a, Fraction)
    lo = samples.start
    hi = lo + len(samples.values) - 1
    for i in range(Mn):
        x = Fraction(i, Mn)
        k0 = -((i - lo) // Mn)
        k1 = (hi - i) // Mn
        for j in range(jmax + 1):
            got = sum((Fraction(k) ** j * samples.at(i + Mn * k) for k in range(k0, k1 + 1)), Fraction(0))
            want = (s_a - x) ** j
            if exact:
                if got != want:
                    return False
            elif abs(got - want) > tol * max(1.0, abs(float(want))):
                return False
    return True
