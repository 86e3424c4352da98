"""Mask construction: parameterize, impose moments and interpolation, gate, optimize.

The unknowns are the coefficients of the quotient ``b`` in
``a(z) = (1 + z + ... + z^{M-1})^J b(z)``.  Moment conditions are linear and
solved exactly.  The interpolation identities are polynomial; when a random
probe shows they are affine in the remaining unknowns they are solved exactly
too, otherwise a damped Gauss-Newton multistart finds float roots which are
then snapped to rationals and re-checked exactly.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import linalg as sla
from scipy import optimize as sopt
from scipy.stats import qmc

from . import ratlinalg as rl
from .analysis import first_moment, linear_phase_check, sm2, sminf_lower_bound, sum_rule_factorization
from .errors import InfeasibleError, ResourceLimitError, SubdivError
from .interp import Admissibility, admissible_params, interpolation_residuals, window_for_support
from .seqalg import FiniteSequence, Mask, convolve, coset, delta, iterated_mask, symmetry_center

log = logging.getLogger(__name__)

NEWTON_STARTS = 64
NEWTON_ITERS = 200
NEWTON_TOL = 1e-12
ACCEPT_TOL = 1e-10
FD_STEP = 1e-7
SNAP_DENOMINATOR = 10**6


@dataclass(frozen=True)
class ConstructionSpec:
    dilation: int
    J: int
    support: tuple[int, int]
    s_a: Fraction
    symmetric: bool = False
    m: int = 0
    optimize: bool = False
    seed: int = 0
    starts: int = NEWTON_STARTS

    def __post_init__(self):
        object.__setattr__(self, "s_a", Fraction(self.s_a))
        l, h = self.support
        if self.dilation < 2:
            raise ValueError("dilation must be >= 2")
        if self.J < 0:
            raise ValueError("J must be >= 0")
        if self.h_tilde < l:
            raise InfeasibleError(
                f"support [{l}, {h}] too short for {self.J} sum rules (h - (M-1)J = {self.h_tilde} < {l})"
            )
        if self.symmetric:
            c = l + h
            if self.s_a != Fraction(c, 2 * (self.dilation - 1)):
                raise ValueError(
                    f"symmetric masks on [{l}, {h}] have s_a = {Fraction(c, 2 * (self.dilation - 1))}, not {self.s_a}"
                )

    @property
    def h_tilde(self) -> int:
        return self.support[1] - (self.dilation - 1) * self.J

    @property
    def m_a(self) -> Fraction:
        return (self.dilation - 1) * self.s_a


# -- linear model --------------------------------------------------------------


@dataclass
class LinearModel:
    """Mask coefficients on ``[l, h]`` as ``offset + basis @ x`` (exact)."""

    start: int
    offset: list
    basis: list  # columns, each a list over the support

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def length(self) -> int:
        return len(self.offset)

    def coeffs(self, x: Sequence) -> list:
        out = list(self.offset)
        for xi, col in zip(x, self.basis):
            if xi != 0:
                out = [o + xi * c for o, c in zip(out, col)]
        return out

    def mask(self, x: Sequence, M: int) -> Mask:
        return Mask(FiniteSequence(self.coeffs(x), self.start), M)

    def np_offset(self) -> np.ndarray:
        return np.array([float(c) for c in self.offset])

    def np_basis(self) -> np.ndarray:
        if not self.basis:
            return np.zeros((self.length, 0))
        return np.array([[float(c) for c in col] for col in self.basis]).T

    def restrict(self, particular: Sequence, directions: Sequence[Sequence]) -> "LinearModel":
        """Substitute ``x = particular + sum_i y_i directions[i]``."""
        off = self.coeffs(particular)
        cols = []
        for d in directions:
            col = [Fraction(0)] * self.length
            for di, bcol in zip(d, self.basis):
                if di != 0:
                    col = [c + di * b for c, b in zip(col, bcol)]
            cols.append(col)
        return LinearModel(self.start, off, cols)


def parameterize(spec: ConstructionSpec) -> LinearModel:
    """Unknowns ``b(l..h~)`` (folded when symmetric) mapped to mask coefficients."""
    M, J = spec.dilation, spec.J
    l, h = spec.support
    ht = spec.h_tilde
    nb = ht - l + 1
    ones = FiniteSequence([1] * M, 0)
    if spec.symmetric:
        groups = []
        for k in range((nb + 1) // 2):
            groups.append(sorted({k, nb - 1 - k}))
    else:
        groups = [[k] for k in range(nb)]
    cols = []
    for g in groups:
        bcoef = [Fraction(0)] * nb
        for k in g:
            bcoef[k] = Fraction(1)
        seq = FiniteSequence(bcoef, l)
        for _ in range(J):
            seq = convolve(seq, ones)
        cols.append([seq[k] for k in range(l, h + 1)])
    return LinearModel(l, [Fraction(0)] * (h - l + 1), cols)


def moment_rows(model: LinearModel, m_a: Fraction, J: int):
    """Rows/rhs for ``sum_k k^j a(k) = m_a^j``, ``j < J``."""
    ks = [Fraction(model.start + i) for i in range(model.length)]
    rows, rhs = [], []
    for j in range(J):
        pw = [k**j for k in ks]
        row = [sum((p * c for p, c in zip(pw, col)), Fraction(0)) for col in model.basis]
        base = sum((p * c for p, c in zip(pw, model.offset)), Fraction(0))
        rows.append(row)
        rhs.append(m_a**j - base)
    return rows, rhs


def solve_moment_constraints(model: LinearModel, spec: ConstructionSpec) -> LinearModel:
    """Exact elimination of the linear moment conditions ``j = 0..J-1``."""
    J = max(spec.J, 1)  # the sum must be one even without sum rules
    rows, rhs = moment_rows(model, spec.m_a, J)
    try:
        part, null = rl.solve_affine(rows, rhs, model.dim)
    except rl.Inconsistent as exc:
        raise InfeasibleError("moment conditions are inconsistent on this support") from exc
    return model.restrict(part, null)


# -- interpolation system ------------------------------------------------------


def _ceil_div(p: int, q: int) -> int:
    return -((-p) // q)


def _np_iterated(a: np.ndarray, M: int, n: int) -> np.ndarray:
    if n == 0:
        return np.array([1.0])
    out = a
    for _ in range(n - 1):
        up = np.zeros((len(out) - 1) * M + 1)
        up[::M] = out
        out = np.convolve(up, a)
    return out


class InterpSystem:
    """Residual map ``x -> F(x)`` for the interpolation identities.

    ``x`` stacks the reduced mask unknowns and, when ``m_s > 0``, the free
    parameters of the sampled sequence ``w`` after its own moment conditions.
    """

    def __init__(self, spec: ConstructionSpec, model: LinearModel):
        self.spec = spec
        self.model = model
        self.M = spec.dilation
        self.adm: Admissibility = admissible_params(spec.s_a, self.M)
        l, h = spec.support
        self.l, self.h = l, h
        M, adm = self.M, self.adm
        g = lambda n: (M**n - 1) // (M - 1)
        self.Mn = M**adm.n_s
        self.An_lo = g(adm.n_s) * l
        self.An_hi = g(adm.n_s) * h
        self.wmodel: Optional[LinearModel] = None
        if adm.m_s == 0:
            self.k13 = range(_ceil_div(self.An_lo - adm.gamma, self.Mn), (self.An_hi - adm.gamma) // self.Mn + 1)
        else:
            lw, hw = window_for_support((l, h), M, adm)
            if lw > hw:
                raise InfeasibleError("empty window for the sampled sequence")
            self.lw, self.hw = lw, hw
            nw = hw - lw + 1
            wm = LinearModel(lw, [Fraction(0)] * nw, [[Fraction(int(i == j)) for i in range(nw)] for j in range(nw)])
            target = spec.s_a - M**adm.m_s * spec.s_a
            J = max(spec.J, 1)
            rows, rhs = moment_rows(wm, target, J)
            try:
                part, null = rl.solve_affine(rows, rhs, wm.dim)
            except rl.Inconsistent as exc:
                raise InfeasibleError("moment conditions on w are inconsistent") from exc
            self.wmodel = wm.restrict(part, null)
            self.Mm = M**adm.m_s
            self.Am_lo = g(adm.m_s) * l
            self.Am_hi = g(adm.m_s) * h
            self.k12 = range(_ceil_div(self.Am_lo + lw, self.Mm), (self.Am_hi + hw) // self.Mm + 1)
            lo13 = min(_ceil_div(self.An_lo + lw - adm.gamma, self.Mn), lw)
            hi13 = max((self.An_hi + hw - adm.gamma) // self.Mn, hw)
            self.k13 = range(lo13, hi13 + 1)
        self.nu = model.dim
        self.ny = self.wmodel.dim if self.wmodel else 0
        self._off = model.np_offset()
        self._B = model.np_basis()
        if self.wmodel:
            self._woff = self.wmodel.np_offset()
            self._W = self.wmodel.np_basis()

    @property
    def dim(self) -> int:
        return self.nu + self.ny

    @property
    def n_eq(self) -> int:
        n = len(self.k13)
        if self.wmodel:
            n += len(self.k12)
        return n

    # float route
    def mask_np(self, x: np.ndarray) -> np.ndarray:
        return self._off + self._B @ x[: self.nu]

    def w_np(self, x: np.ndarray) -> np.ndarray:
        return self._woff + self._W @ x[self.nu:]

    def F(self, x: np.ndarray) -> np.ndarray:
        a = self.mask_np(x)
        adm = self.adm
        An = _np_iterated(a, self.M, adm.n_s)
        if self.wmodel is None:
            out = np.empty(len(self.k13))
            for i, k in enumerate(self.k13):
                j = adm.gamma + self.Mn * k - self.An_lo
                out[i] = (An[j] if 0 <= j < len(An) else 0.0) - (1.0 / self.Mn if k == 0 else 0.0)
            return out
        w = self.w_np(x)
        Am = _np_iterated(a, self.M, adm.m_s)
        c12 = np.convolve(Am, w)
        c12_lo = self.Am_lo + self.lw
        c13 = np.convolve(An, w)
        c13_lo = self.An_lo + self.lw
        out = np.empty(self.n_eq)
        i = 0
        for k in self.k12:
            j = self.Mm * k - c12_lo
            out[i] = (c12[j] if 0 <= j < len(c12) else 0.0) - (1.0 / self.Mm if k == 0 else 0.0)
            i += 1
        for k in self.k13:
            j = adm.gamma + self.Mn * k - c13_lo
            wk = w[k - self.lw] if self.lw <= k <= self.hw else 0.0
            out[i] = (c13[j] if 0 <= j < len(c13) else 0.0) - wk / self.Mn
            i += 1
        return out

    def jac(self, x: np.ndarray) -> np.ndarray:
        f0 = self.F(x)
        Jm = np.empty((len(f0), self.dim))
        for i in range(self.dim):
            e = x.copy()
            e[i] += FD_STEP
            Jm[:, i] = (self.F(e) - f0) / FD_STEP
        return Jm

    # exact route
    def split(self, x: Sequence):
        return list(x[: self.nu]), list(x[self.nu:])

    def mask_exact(self, x: Sequence) -> Mask:
        return self.model.mask(self.split(x)[0], self.M)

    def w_exact(self, x: Sequence) -> Optional[FiniteSequence]:
        if self.wmodel is None:
            return None
        return FiniteSequence(self.wmodel.coeffs(self.split(x)[1]), self.lw)

    def F_exact(self, x: Sequence) -> list:
        a = self.mask_exact(x)
        adm = self.adm
        An = iterated_mask(a, adm.n_s)
        if self.wmodel is None:
            return [An[adm.gamma + self.Mn * k] - (Fraction(1, self.Mn) if k == 0 else 0) for k in self.k13]
        w = self.w_exact(x)
        Am = iterated_mask(a, adm.m_s)
        c12 = convolve(Am, w)
        c13 = convolve(An, w)
        out = [c12[self.Mm * k] - (Fraction(1, self.Mm) if k == 0 else 0) for k in self.k12]
        out += [c13[adm.gamma + self.Mn * k] - w[k] / self.Mn for k in self.k13]
        return out


# -- families ------------------------------------------------------------------


class Family:
    """A set of masks indexed by a parameter vector."""

    dim: int = 0
    exact: bool = False

    def member(self, p: Sequence) -> Mask:
        raise NotImplementedError

    def default_params(self) -> list:
        return [0.0] * self.dim

    def bounds(self) -> list[tuple[float, float]]:
        return [(-1.0, 1.0)] * self.dim

    def describe(self) -> dict:
        return {"kind": type(self).__name__, "dim": self.dim}


@dataclass
class AffineFamily(Family):
    """``a = offset + sum_i p_i directions[i]``, exact for rational ``p``."""

    offset: FiniteSequence
    directions: list
    dilation: int
    exact: bool = True

    @property
    def dim(self) -> int:
        return len(self.directions)

    def member(self, p: Sequence) -> Mask:
        out = self.offset
        for pi, d in zip(p, self.directions):
            out = out + d.scale(pi)
        return Mask(out, self.dilation)

    def describe(self) -> dict:
        return {
            "kind": "affine",
            "dim": self.dim,
            "offset": {"support": list(self.offset.support or (0, -1)), "coeffs": [str(c) for c in self.offset.coeffs]},
            "directions": [
                {"support": list(d.support or (0, -1)), "coeffs": [str(c) for c in d.coeffs]} for d in self.directions
            ],
        }


class PinnedFamily(Family):
    """Local solution family through a float root, parameterized by pinned mask coefficients."""

    exact = False

    def __init__(self, system: InterpSystem, root: np.ndarray, pins: Sequence[int], span: Optional[float] = None):
        self.system = system
        self.root = np.asarray(root, dtype=float)
        self.pins = list(pins)
        self.span = span
        a = system.mask_np(self.root)
        self.pin_values = [float(a[k - system.l]) for k in self.pins]

    @property
    def dim(self) -> int:
        return len(self.pins)

    def default_params(self) -> list:
        return list(self.pin_values)

    def bounds(self) -> list[tuple[float, float]]:
        """Pinned coefficients range over ``[-1, 1]`` unless a span around the root is given."""
        if self.span is None:
            return [(-1.0, 1.0)] * self.dim
        return [(v - self.span, v + self.span) for v in self.pin_values]

    CONTINUATION_STEP = 0.02

    def _newton(self, target: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, float]:
        sys = self.system
        idx = [k - sys.l for k in self.pins]

        def G(y):
            return np.concatenate([sys.F(y), sys.mask_np(y)[idx] - target])

        return _gauss_newton(G, x)

    def solve(self, p: Sequence, x0: Optional[np.ndarray] = None) -> tuple[np.ndarray, float]:
        """Follow the family from the nearest solved point to the pin values ``p``."""
        target = np.asarray([float(v) for v in p])
        if not hasattr(self, "_solved"):
            self._solved = [(np.asarray(self.pin_values, dtype=float), self.root.copy())]
        if x0 is not None:
            return self._newton(target, np.asarray(x0, dtype=float))
        start_p, x = min(self._solved, key=lambda t: float(np.max(np.abs(t[0] - target))) if t[0].size else 0.0)
        dist = float(np.max(np.abs(target - start_p))) if target.size else 0.0
        steps = max(1, int(math.ceil(dist / self.CONTINUATION_STEP)))
        res = 0.0
        for i in range(1, steps + 1):
            pi = start_p + (target - start_p) * (i / steps)
            x, res = self._newton(pi, x)
            if res > ACCEPT_TOL:
                return x, res
        self._solved.append((target, x.copy()))
        return x, res

    def member(self, p: Sequence) -> Mask:
        x, res = self.solve(p)
        if res > ACCEPT_TOL:
            raise SubdivError(f"no family member for pins {dict(zip(self.pins, p))} (residual {res:.2e})")
        return Mask(FiniteSequence([float(c) for c in self.system.mask_np(x)], self.system.l), self.system.M)

    def with_pins(self, pins: Sequence[int]) -> "PinnedFamily":
        """Same family, parameterized by other mask coefficients."""
        return PinnedFamily(self.system, self.root, pins, self.span)

    def exact_member(self, p: Sequence, spec: Optional[ConstructionSpec] = None) -> Optional[Mask]:
        """Snap the member for ``p`` to rationals; return it only if every constraint re-checks exactly."""
        a = self.member(p)
        snapped = Mask(FiniteSequence(_snap(a.seq.coeffs), a.seq.start), a.dilation)
        ok, _ = verify_candidate(spec or self.system.spec, snapped)
        return snapped if ok else None

    def describe(self) -> dict:
        return {
            "kind": "pinned",
            "dim": self.dim,
            "pins": {str(k): repr(v) for k, v in zip(self.pins, self.pin_values)},
        }


class ParametricFamily(Family):
    """Wrap any callable ``params -> Mask``."""

    def __init__(self, func: Callable[..., Mask], dim: int, bounds=None, start=None):
        self.func = func
        self._dim = dim
        self._bounds = bounds or [(-1.0, 1.0)] * dim
        self._start = start

    @property
    def dim(self) -> int:
        return self._dim

    def bounds(self):
        return list(self._bounds)

    def default_params(self):
        if self._start is not None:
            return list(self._start)
        return [0.5 * (lo + hi) for lo, hi in self._bounds]

    def member(self, p):
        return self.func(*p)


# -- Newton ----------------------------------------------------------------------


def _gauss_newton(G: Callable[[np.ndarray], np.ndarray], x: np.ndarray, iters: int = NEWTON_ITERS,
                  tol: float = NEWTON_TOL) -> tuple[np.ndarray, float]:
    f = G(x)
    r = float(np.max(np.abs(f))) if f.size else 0.0
    for _ in range(iters):
        if r <= tol or not np.isfinite(r):
            break
        Jm = np.empty((len(f), len(x)))
        for i in range(len(x)):
            e = x.copy()
            e[i] += FD_STEP
            Jm[:, i] = (G(e) - f) / FD_STEP
        step, *_ = np.linalg.lstsq(Jm, -f, rcond=None)
        t = 1.0
        improved = False
        while t > 1e-6:
            xn = x + t * step
            fn = G(xn)
            rn = float(np.max(np.abs(fn)))
            if np.isfinite(rn) and rn < r:
                x, f, r = xn, fn, rn
                improved = True
                break
            t *= 0.5
        if not improved:
            break
    return x, r


def newton_multistart(system: InterpSystem, starts: int = NEWTON_STARTS, seed: int = 0) -> list[tuple[np.ndarray, float]]:
    """Converged roots from a deterministic low-discrepancy set of starting points."""
    d = system.dim
    if d == 0:
        x = np.zeros(0)
        return [(x, float(np.max(np.abs(system.F(x))) if system.n_eq else 0.0))]
    pts = qmc.Halton(d=d, scramble=False).random(starts + 1)[1:] * 2.0 - 1.0
    roots = []
    for p in pts:
        x, r = _gauss_newton(system.F, p.astype(float))
        if r <= ACCEPT_TOL:
            roots.append((x, r))
    return roots


# -- gate, optimizer ---------------------------------------------------------------


@dataclass
class GateResult:
    sm2: float
    lambda_c: complex
    accepted: bool
    threshold: float
    via: str = ""
    coset_bound: Optional[float] = None


GATE_COSET_LEVELS = 4


def smoothness_gate(a: Mask, m: int, n_max: int = GATE_COSET_LEVELS) -> GateResult:
    """Accept iff ``|lambda_c| < M^{-2m-2}``, or a coset lower bound with ``n <= n_max`` exceeds ``m``."""
    s2, lam = sm2(a)
    thr = float(a.dilation) ** (-2 * m - 2)
    if abs(lam) < thr:
        return GateResult(s2, lam, True, thr, "eigenvalue")
    best = None
    try:
        fact = sum_rule_factorization(a)
        if fact.J >= 1:
            for n in range(1, n_max + 1):
                v = sminf_lower_bound(a, n, fact)
                if best is None or v > best[0]:
                    best = (v, n)
    except ResourceLimitError:
        pass
    if best is not None and best[0] > m:
        return GateResult(s2, lam, True, thr, f"coset bound at n={best[1]}", best[0])
    return GateResult(s2, lam, False, thr, "", best[0] if best else None)


def _safe_sm2(family: Family, p) -> float:
    try:
        return sm2(family.member(p))[0]
    except (SubdivError, ValueError, ZeroDivisionError, np.linalg.LinAlgError):
        return -math.inf


@dataclass
class OptimizeResult:
    params: list
    value: float
    mask: Optional[Mask]


def optimize_free_parameters(family: Family, grid: int = 41, seed: int = 0) -> OptimizeResult:
    """Maximize ``sm_2`` over a family with at most three parameters."""
    d = family.dim
    if d == 0:
        m = family.member([])
        return OptimizeResult([], sm2(m)[0], m)
    if d > 3:
        raise ValueError("optimizer supports at most three free parameters")
    f = lambda p: _safe_sm2(family, p)
    bounds = family.bounds()
    x0 = list(family.default_params())
    v0 = f(x0)
    if d == 1:
        lo, hi = bounds[0]
        xs = np.linspace(lo, hi, grid)
        vals = [f([x]) for x in xs]
        i = int(np.argmax(vals))
        best_x, best_v = float(xs[i]), vals[i]
        if 0 < i < grid - 1 and np.isfinite(vals[i]):
            res = sopt.minimize_scalar(lambda t: -f([t]), bracket=(xs[i - 1], xs[i], xs[i + 1]),
                                       method="golden", options={"xtol": 1e-10})
            if -res.fun > best_v:
                best_x, best_v = float(res.x), float(-res.fun)
        if v0 >= best_v:
            best_x, best_v = x0[0], v0
        params = [best_x]
    else:
        rng = np.random.default_rng(seed)
        cands = [np.asarray(x0, dtype=float)]
        cands += [np.array([rng.uniform(lo, hi) for lo, hi in bounds]) for _ in range(8)]
        best_x, best_v = np.asarray(x0, dtype=float), v0
        for c in cands:
            res = sopt.minimize(lambda p: -f(list(p)), c, method="Nelder-Mead",
                                options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 2000})
            if -res.fun > best_v:
                best_x, best_v = res.x, float(-res.fun)
        params = [float(t) for t in best_x]
    if not np.isfinite(best_v):
        return OptimizeResult(params, best_v, None)
    return OptimizeResult(params, best_v, family.member(params))


# -- results ---------------------------------------------------------------------


@dataclass
class Candidate:
    mask: Mask
    exact: bool
    verified: bool
    residual: float
    gate: GateResult
    family: Optional[Family] = None
    w: Optional[FiniteSequence] = None
    notes: list = field(default_factory=list)

    def rank_key(self):
        coeffs = tuple(float(c) for c in self.mask.seq.coeffs)
        return (not self.verified, not self.gate.accepted, -self.gate.sm2, self.residual, coeffs)


@dataclass
class ConstructionResult:
    spec: ConstructionSpec
    candidates: list
    linear: bool
    family: Optional[Family] = None
    optimized: Optional[OptimizeResult] = None
    reason: str = ""

    @property
    def best(self) -> Optional[Candidate]:
        acc = [c for c in self.candidates if c.gate.accepted]
        return acc[0] if acc else None

    @property
    def accepted(self) -> bool:
        return self.best is not None

    @property
    def infeasible(self) -> bool:
        return not self.accepted

    def families(self) -> list:
        out = []
        for c in self.candidates:
            if c.family is not None and all(c.family is not f for f in out):
                out.append(c.family)
        return out


def verify_candidate(spec: ConstructionSpec, a: Mask, w: Optional[FiniteSequence] = None) -> tuple[bool, list]:
    """Exact re-check of every construction constraint on a rational mask."""
    notes = []
    if not a.is_exact:
        return False, ["float coefficients"]
    l, h = spec.support
    sup = a.support
    if sup is None or sup[0] < l or sup[1] > h:
        notes.append(f"support {sup} leaves [{l}, {h}]")
    if a.total() != 1:
        notes.append("coefficients do not sum to one")
    fact = sum_rule_factorization(a)
    if fact.J < spec.J:
        notes.append(f"only {fact.J} sum rules")
    if spec.symmetric and symmetry_center(a) != l + h:
        notes.append("not symmetric")
    if first_moment(a) != spec.m_a:
        notes.append("wrong first moment")
    lp = linear_phase_check(a, spec.J)
    if not lp.ok:
        notes.append(f"moment {lp.first_failure} fails")
    adm = admissible_params(spec.s_a, spec.dilation)
    try:
        if adm.m_s == 0:
            _, _, _, _, r14 = interpolation_residuals(a, adm)
            if r14 != 0:
                notes.append("coset identity fails")
        else:
            _, _, r12, r13, _ = interpolation_residuals(a, adm, w)
            if r12 != 0 or r13 != 0:
                notes.append("w identities fail")
    except SubdivError as exc:
        notes.append(str(exc))
    return not notes, notes


def _snap(values: Sequence[float]) -> list[Fraction]:
    return [Fraction(float(v)).limit_denominator(SNAP_DENOMINATOR) for v in values]


def _probe_affine(system: InterpSystem, trials: int = 3, seed: int = 12345) -> bool:
    rnd = random.Random(seed)
    d = system.dim
    F0 = system.F_exact([Fraction(0)] * d)
    for _ in range(trials):
        x = [Fraction(rnd.randint(-9, 9), rnd.randint(1, 7)) for _ in range(d)]
        y = [Fraction(rnd.randint(-9, 9), rnd.randint(1, 7)) for _ in range(d)]
        xy = [p + q for p, q in zip(x, y)]
        Fx, Fy, Fxy = system.F_exact(x), system.F_exact(y), system.F_exact(xy)
        if any(c - p - q + z != 0 for c, p, q, z in zip(Fxy, Fx, Fy, F0)):
            return False
    return True


def _independent_columns(cols: list[FiniteSequence]) -> list[FiniteSequence]:
    nonzero = [c for c in cols if not c.is_zero]
    if not nonzero:
        return []
    lo = min(c.support[0] for c in nonzero)
    hi = max(c.support[1] for c in nonzero)
    rows = [[c[k] for k in range(lo, hi + 1)] for c in nonzero]
    R, piv = rl.rref(rows)
    out = []
    for row in R[: len(piv)]:
        out.append(FiniteSequence(row, lo))
    return out


def _linear_solve(spec: ConstructionSpec, system: InterpSystem) -> ConstructionResult:
    d = system.dim
    zero = [Fraction(0)] * d
    F0 = system.F_exact(zero)
    cols = []
    for i in range(d):
        e = list(zero)
        e[i] = Fraction(1)
        Fi = system.F_exact(e)
        cols.append([p - q for p, q in zip(Fi, F0)])
    A = [[cols[j][i] for j in range(d)] for i in range(len(F0))]
    try:
        part, null = rl.solve_affine(A, [-c for c in F0], d)
    except rl.Inconsistent:
        return ConstructionResult(spec, [], True, reason="interpolation identities are inconsistent")
    base = system.mask_exact(part)
    dirs = []
    for v in null:
        u, _ = system.split(v)
        dirs.append(FiniteSequence(system.model.coeffs(u), system.l) - FiniteSequence(system.model.offset, system.l))
    dirs = _independent_columns(dirs)
    fam = AffineFamily(base.seq, dirs, spec.dilation) if dirs else None
    w = system.w_exact(part)
    if fam is None:
        masks = [(base, w)]
    else:
        masks = [(base, None)]
    cands = []
    for a, wv in masks:
        ok, notes = verify_candidate(spec, a, wv)
        cands.append(Candidate(a, True, ok, 0.0, smoothness_gate(a, spec.m), fam, wv, notes))
    res = ConstructionResult(spec, cands, True, fam)
    if fam is not None and spec.optimize and fam.dim <= 3:
        opt = optimize_free_parameters(fam, seed=spec.seed)
        res.optimized = opt
        if opt.mask is not None:
            p = [Fraction(t).limit_denominator(4096) for t in opt.params]
            a = fam.member(p)
            ok, notes = verify_candidate(spec, a)
            cands.append(Candidate(a, True, ok, 0.0, smoothness_gate(a, spec.m), fam, None,
                                   notes + [f"optimized parameters {[str(t) for t in p]}"]))
    res.candidates = sorted(cands, key=Candidate.rank_key)
    return res


def _tangent_pins(system: InterpSystem, x: np.ndarray) -> tuple[int, list[int]]:
    """Local family dimension in mask space and the pinned coefficient indices."""
    Jm = system.jac(x)
    if Jm.size == 0:
        null = np.eye(system.dim)
    else:
        null = sla.null_space(Jm, rcond=1e-7)
    if null.size == 0:
        return 0, []
    T = system._B @ null[: system.nu, :]
    if T.size == 0:
        return 0, []
    s = np.linalg.svd(T, compute_uv=False)
    rank = int(np.sum(s > 1e-7 * max(1.0, s[0] if len(s) else 0.0)))
    if rank == 0:
        return 0, []
    _, _, piv = sla.qr(T.T, pivoting=True)
    return rank, sorted(int(p) + system.l for p in piv[:rank])


def _same_family(fam: PinnedFamily, a_np: np.ndarray) -> bool:
    sys = fam.system
    p = [a_np[k - sys.l] for k in fam.pins]
    x, res = fam.solve(p)
    return res <= ACCEPT_TOL and float(np.max(np.abs(sys.mask_np(x) - a_np))) < 1e-7


def _root_candidate(spec: ConstructionSpec, system: InterpSystem, x: np.ndarray, r: float,
                    fam: Optional[Family]) -> Optional[Candidate]:
    a_np = system.mask_np(x)
    # exact snap in reduced coordinates first, then in mask coordinates
    exact_mask, w = None, None
    snapped = _snap(x)
    if all(v == 0 for v in system.F_exact(snapped)):
        exact_mask, w = system.mask_exact(snapped), system.w_exact(snapped)
    else:
        a_try = Mask(FiniteSequence(_snap(a_np), system.l), spec.dilation)
        if verify_candidate(spec, a_try)[0]:
            exact_mask = a_try
    if exact_mask is not None:
        ok, notes = verify_candidate(spec, exact_mask, w)
        return Candidate(exact_mask, True, ok, 0.0, smoothness_gate(exact_mask, spec.m), fam, w, notes)
    fm = Mask(FiniteSequence([float(c) for c in a_np], system.l), spec.dilation)
    try:
        gate = smoothness_gate(fm, spec.m)
    except SubdivError:
        return None
    wv = None
    if system.wmodel is not None:
        wv = FiniteSequence([float(c) for c in system.w_np(x)], system.lw)
    return Candidate(fm, False, False, r, gate, fam, wv, ["float root"])


MAX_FAMILIES = 8


def _nonlinear_solve(spec: ConstructionSpec, system: InterpSystem) -> ConstructionResult:
    roots = newton_multistart(system, spec.starts, spec.seed)
    if not roots:
        return ConstructionResult(spec, [], False, reason="no root of the interpolation identities found")
    isolated: list[np.ndarray] = []
    families: list[PinnedFamily] = []
    members: dict[int, list] = {}
    cands = []
    for x, r in sorted(roots, key=lambda t: t[1]):
        a_np = system.mask_np(x)
        dim, pins = _tangent_pins(system, x)
        if dim == 0:
            if any(np.max(np.abs(a_np - s)) < 1e-8 for s in isolated):
                continue
            isolated.append(a_np)
            c = _root_candidate(spec, system, x, r, None)
            if c is not None:
                cands.append(c)
            continue
        hit = next((i for i, f in enumerate(families) if f.dim == dim and _same_family(f, a_np)), None)
        if hit is None:
            if len(families) >= MAX_FAMILIES:
                continue
            families.append(PinnedFamily(system, x, pins))
            hit = len(families) - 1
        members.setdefault(hit, []).append((x, r))
    for i, fam in enumerate(families):
        best = None
        for x, r in members[i]:
            c = _root_candidate(spec, system, x, r, fam)
            if c is not None and (best is None or c.rank_key() < best.rank_key()):
                best = c
        if best is not None:
            cands.append(best)
    res = ConstructionResult(spec, sorted(cands, key=Candidate.rank_key), False, families[0] if families else None)
    if spec.optimize:
        best_opt = None
        for fam in families:
            if fam.dim > 3:
                continue
            opt = optimize_free_parameters(fam, seed=spec.seed)
            if opt.mask is None:
                continue
            gate = smoothness_gate(opt.mask, spec.m)
            res.candidates.append(Candidate(opt.mask, False, False, 0.0, gate, fam, None, ["optimized member"]))
            if best_opt is None or opt.value > best_opt[0].value:
                best_opt = (opt, fam)
        if best_opt is not None:
            res.optimized, res.family = best_opt
        res.candidates.sort(key=Candidate.rank_key)
    if not res.accepted and not res.reason:
        res.reason = "no candidate passes the smoothness gate"
    return res


def construct(spec: ConstructionSpec) -> ConstructionResult:
    """Run the whole pipeline; inspect ``result.accepted`` / ``result.reason``."""
    model = parameterize(spec)
    try:
        model = solve_moment_constraints(model, spec)
        system = InterpSystem(spec, model)
    except InfeasibleError as exc:
        return ConstructionResult(spec, [], True, reason=str(exc))
    if _probe_affine(system):
        res = _linear_solve(spec, system)
    else:
        res = _nonlinear_solve(spec, system)
    if not res.accepted and not res.reason:
        res.reason = "no candidate passes the smoothness gate"
    return res


def construct_or_raise(spec: ConstructionSpec) -> ConstructionResult:
    res = construct(spec)
    if not res.accepted:
        raise InfeasibleError(res.reason)
    return res
