"""Finitely supported sequences, masks and the subdivision operator.

Coefficients are either exact rationals (:class:`fractions.Fraction`) or
binary floats.  Mixing the two promotes to float, exactly as Python's own
numeric tower does, so exact inputs stay exact through every operation here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Integral, Rational, Real
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import check_budget

Scalar = Union[Fraction, float]


def as_scalar(x) -> Scalar:
    """Coerce ``x`` to a package scalar (Fraction or float)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        return Fraction(int(x))
    if isinstance(x, (Integral, np.integer)):
        return Fraction(int(x))
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, str):
        return parse_scalar(x)
    if isinstance(x, (Real, np.floating)):
        return float(x)
    raise TypeError(f"unsupported coefficient type {type(x).__name__}")


def parse_scalar(text: str) -> Scalar:
    """Parse ``"p/q"`` or an integer as exact, anything else as a float."""
    s = text.strip()
    if not s:
        raise ValueError("empty coefficient string")
    try:
        if "/" in s or not any(c in s for c in ".eEnN"):
            return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad rational coefficient {text!r}") from exc
    value = float(s)
    if not math.isfinite(value):
        raise ValueError(f"non-finite coefficient {text!r}")
    return value


def is_exact_scalar(x) -> bool:
    return isinstance(x, Fraction)


class FiniteSequence:
    """Immutable finitely supported sequence ``k -> v(k)`` on the integers.

    Stored as a start offset and a tuple of coefficients with no zero at
    either end.  The zero sequence is the empty tuple; its ``support`` is
    ``None``.
    """

    __slots__ = ("_start", "_coeffs")

    def __init__(self, coeffs: Iterable = (), start: int = 0):
        vals = [as_scalar(c) for c in coeffs]
        lo, hi = 0, len(vals)
        while lo < hi and vals[lo] == 0:
            lo += 1
        while hi > lo and vals[hi - 1] == 0:
            hi -= 1
        self._coeffs = tuple(vals[lo:hi])
        self._start = int(start) + lo if self._coeffs else 0

    @classmethod
    def _raw(cls, coeffs: tuple, start: int) -> "FiniteSequence":
        # trusted constructor: coeffs already scalars
        obj = cls.__new__(cls)
        lo, hi = 0, len(coeffs)
        while lo < hi and coeffs[lo] == 0:
            lo += 1
        while hi > lo and coeffs[hi - 1] == 0:
            hi -= 1
        obj._coeffs = tuple(coeffs[lo:hi])
        obj._start = int(start) + lo if obj._coeffs else 0
        return obj

    @classmethod
    def from_dict(cls, mapping: Mapping[int, object]) -> "FiniteSequence":
        items = {int(k): as_scalar(v) for k, v in mapping.items() if v != 0}
        if not items:
            return cls()
        lo, hi = min(items), max(items)
        zero = Fraction(0)
        return cls._raw(tuple(items.get(k, zero) for k in range(lo, hi + 1)), lo)

    @classmethod
    def delta(cls, at: int = 0) -> "FiniteSequence":
        return cls._raw((Fraction(1),), at)

    @property
    def start(self) -> int:
        return self._start

    @property
    def coeffs(self) -> tuple:
        return self._coeffs

    @property
    def support(self) -> Optional[tuple[int, int]]:
        if not self._coeffs:
            return None
        return self._start, self._start + len(self._coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self._coeffs)

    def __len__(self) -> int:
        return len(self._coeffs)

    def __getitem__(self, k: int) -> Scalar:
        i = k - self._start
        if 0 <= i < len(self._coeffs):
            return self._coeffs[i]
        return Fraction(0)

    def items(self) -> Iterator[tuple[int, Scalar]]:
        for i, c in enumerate(self._coeffs):
            if c != 0:
                yield self._start + i, c

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteSequence):
            return NotImplemented
        return self._start == other._start and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash((self._start, self._coeffs))

    def __repr__(self) -> str:
        if not self._coeffs:
            return "FiniteSequence(<zero>)"
        body = ", ".join(str(c) for c in self._coeffs)
        l, h = self.support
        return f"FiniteSequence({{{body}}}_[{l},{h}])"

    # arithmetic -------------------------------------------------------

    def _combine(self, other: "FiniteSequence", sign: int) -> "FiniteSequence":
        if self.is_zero:
            return other if sign > 0 else -other
        if other.is_zero:
            return self
        lo = min(self._start, other._start)
        hi = max(self._start + len(self) - 1, other._start + len(other) - 1)
        out = []
        for k in range(lo, hi + 1):
            out.append(self[k] + sign * other[k])
        return FiniteSequence._raw(tuple(out), lo)

    def __add__(self, other: "FiniteSequence") -> "FiniteSequence":
        return self._combine(other, 1)

    def __sub__(self, other: "FiniteSequence") -> "FiniteSequence":
        return self._combine(other, -1)

    def __neg__(self) -> "FiniteSequence":
        return FiniteSequence._raw(tuple(-c for c in self._coeffs), self._start)

    def scale(self, c) -> "FiniteSequence":
        c = as_scalar(c)
        return FiniteSequence._raw(tuple(c * x for x in self._coeffs), self._start)

    def __mul__(self, c) -> "FiniteSequence":
        return self.scale(c)

    __rmul__ = __mul__

    def shift(self, m: int) -> "FiniteSequence":
        """The sequence ``v(. - m)``."""
        return FiniteSequence._raw(self._coeffs, self._start + m)

    def reflect(self) -> "FiniteSequence":
        """The sequence ``v(-.)``."""
        if self.is_zero:
            return self
        return FiniteSequence._raw(self._coeffs[::-1], -(self._start + len(self) - 1))

    def total(self) -> Scalar:
        return sum(self._coeffs, Fraction(0))

    def norm1(self) -> Scalar:
        return sum((abs(c) for c in self._coeffs), Fraction(0))

    def norm_inf(self) -> Scalar:
        return max((abs(c) for c in self._coeffs), default=Fraction(0))

    def to_float(self) -> "FiniteSequence":
        return FiniteSequence._raw(tuple(float(c) for c in self._coeffs), self._start)

    def as_array(self) -> np.ndarray:
        return np.array([float(c) for c in self._coeffs], dtype=float)

    def symbol(self, z):
        """Evaluate the Laurent polynomial ``sum_k v(k) z^k``."""
        if self.is_zero:
            return 0 * z
        acc = 0
        for c in reversed(self._coeffs):
            acc = acc * z + c
        return acc * z**self._start

    def moment(self, j: int) -> Scalar:
        return sum((Fraction(k) ** j * c if isinstance(c, Fraction) else float(k) ** j * c
                    for k, c in self.items()), Fraction(0))


def delta(at: int = 0) -> FiniteSequence:
    return FiniteSequence.delta(at)


# -- core operations -------------------------------------------------------


def _to_scaled_ints(coeffs: Sequence[Fraction]) -> tuple[np.ndarray, int]:
    den = 1
    for c in coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = np.array([int(c.numerator * (den // c.denominator)) for c in coeffs], dtype=object)
    return ints, den


def convolve(u: FiniteSequence, v: FiniteSequence) -> FiniteSequence:
    """``[u*v](j) = sum_k u(k) v(j-k)``."""
    if u.is_zero or v.is_zero:
        return FiniteSequence()
    start = u.start + v.start
    if u.is_exact and v.is_exact:
        iu, du = _to_scaled_ints(u.coeffs)
        iv, dv = _to_scaled_ints(v.coeffs)
        prod = np.convolve(iu, iv)
        den = du * dv
        return FiniteSequence._raw(tuple(Fraction(int(p), den) for p in prod), start)
    prod = np.convolve(u.as_array(), v.as_array())
    return FiniteSequence._raw(tuple(float(p) for p in prod), start)


def upsample(u: FiniteSequence, L: int) -> FiniteSequence:
    """Place ``u(k)`` at ``L*k``; symbol ``u(z^L)``."""
    if L < 1:
        raise ValueError(f"upsampling factor must be >= 1, got {L}")
    if u.is_zero or L == 1:
        return u
    zero = Fraction(0)
    out = [zero] * ((len(u) - 1) * L + 1)
    out[::L] = u.coeffs
    return FiniteSequence._raw(tuple(out), L * u.start)


_NABLA = FiniteSequence((1, -1), 0)


def backward_difference(u: FiniteSequence, j: int = 1) -> FiniteSequence:
    """``nabla^j u`` with ``[nabla u](k) = u(k) - u(k-1)``."""
    if j < 0:
        raise ValueError("difference order must be >= 0")
    out = u
    for _ in range(j):
        out = convolve(out, _NABLA)
    return out


def coset(u: FiniteSequence, gamma: int, M: int) -> FiniteSequence:
    """The ``gamma``-coset ``k -> u(gamma + M k)``."""
    if M < 2:
        raise ValueError("dilation must be >= 2")
    if u.is_zero:
        return u
    l, h = u.support
    k0 = -((gamma - l) // M)  # ceil((l - gamma) / M)
    k1 = (h - gamma) // M
    return FiniteSequence._raw(tuple(u[gamma + M * k] for k in range(k0, k1 + 1)), k0)


def interleave(cosets: Sequence[FiniteSequence], M: int) -> FiniteSequence:
    """Inverse of taking all cosets ``0..M-1``."""
    out: dict[int, Scalar] = {}
    for gamma, c in enumerate(cosets):
        for k, x in c.items():
            out[gamma + M * k] = x
    return FiniteSequence.from_dict(out)


# -- masks -------------------------------------------------------------------


@dataclass(frozen=True)
class Mask:
    """A finitely supported mask together with its dilation factor."""

    seq: FiniteSequence
    dilation: int
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if int(self.dilation) < 2:
            raise ValueError(f"dilation factor must be >= 2, got {self.dilation}")
        if not isinstance(self.seq, FiniteSequence):
            object.__setattr__(self, "seq", FiniteSequence(self.seq))

    @classmethod
    def from_coeffs(cls, coeffs: Iterable, start: int, dilation: int, name: str | None = None) -> "Mask":
        return cls(FiniteSequence(coeffs, start), dilation, name)

    @property
    def M(self) -> int:
        return self.dilation

    @property
    def support(self) -> Optional[tuple[int, int]]:
        return self.seq.support

    @property
    def is_exact(self) -> bool:
        return self.seq.is_exact

    def __getitem__(self, k: int) -> Scalar:
        return self.seq[k]

    def total(self) -> Scalar:
        return self.seq.total()

    def is_normalized(self, tol: float = 1e-12) -> bool:
        s = self.total()
        if isinstance(s, Fraction):
            return s == 1
        return abs(s - 1.0) <= tol

    def symbol(self, z):
        return self.seq.symbol(z)

    def coset(self, gamma: int) -> FiniteSequence:
        return coset(self.seq, gamma, self.dilation)

    def to_float(self) -> "Mask":
        return Mask(self.seq.to_float(), self.dilation, self.name)

    def __repr__(self) -> str:
        tag = f" {self.name!r}" if self.name else ""
        return f"Mask{tag}(M={self.dilation}, {self.seq!r})"


def symmetry_center(a: Mask | FiniteSequence) -> Optional[int]:
    """Return ``c`` with ``a(c - k) = a(k)`` for all ``k``, or None."""
    seq = a.seq if isinstance(a, Mask) else a
    if seq.is_zero:
        return None
    l, h = seq.support
    if seq.coeffs == seq.coeffs[::-1]:
        return l + h
    return None


def subdivide_once(a: Mask, v: FiniteSequence) -> FiniteSequence:
    """``[S v](j) = M sum_k v(k) a(j - M k)``."""
    M = a.dilation
    if v.is_zero:
        return v
    check_budget(M * len(v) + len(a.seq), "subdivided data")
    return convolve(upsample(v, M), a.seq).scale(M)


def subdivide(a: Mask, v: FiniteSequence, n: int) -> FiniteSequence:
    if n < 0:
        raise ValueError("number of subdivision steps must be >= 0")
    for _ in range(n):
        v = subdivide_once(a, v)
    return v


def iterated_support(support: tuple[int, int], M: int, n: int) -> tuple[int, int]:
    """Support bound of ``A_n`` for a mask supported on ``support``."""
    l, h = support
    g = (M**n - 1) // (M - 1)
    return g * l, g * h


def iterated_mask(a: Mask, n: int) -> FiniteSequence:
    """``A_n = M^{-n} S^n delta`` with symbol ``a(z^{M^{n-1}}) ... a(z^M) a(z)``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0 or a.seq.is_zero:
        return delta() if n == 0 else FiniteSequence()
    lo, hi = iterated_support(a.support, a.dilation, n)
    check_budget(hi - lo + 1, f"A_{n}")
    # A_n(z) = a(z) A_{n-1}(z^M): short kernel, long upsampled operand
    out = a.seq
    for _ in range(n - 1):
        out = convolve(upsample(out, a.dilation), a.seq)
    return out
