"""Quasi-stationary schemes: masks ``a_1, ..., a_r`` applied cyclically.

One full cycle ``S_{a_r} ... S_{a_1}`` equals a single stationary step with
the composed mask ``a`` and dilation ``M^r``, whose symbol is
``a_1(z^{M^{r-1}}) ... a_{r-1}(z^M) a_r(z)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .analysis import shift_parameter, sum_rule_order
from .errors import SubdivError
from .interp import InterpolationCertificate, Verdict, verify_interpolatory
from .seqalg import FiniteSequence, Mask, backward_difference, convolve, delta, subdivide_once, upsample

FLOAT_TOL = 1e-12


@dataclass(frozen=True)
class SchemeSpec:
    dilation: int
    masks: tuple
    name: Optional[str] = None

    def __post_init__(self):
        masks = tuple(self.masks)
        object.__setattr__(self, "masks", masks)
        if not masks:
            raise ValueError("a scheme needs at least one mask")
        for i, a in enumerate(masks, 1):
            if a.dilation != self.dilation:
                raise ValueError(f"mask {i} has dilation {a.dilation}, scheme has {self.dilation}")
            if not a.is_normalized(1e-12):
                raise ValueError(f"mask {i} sums to {a.total()}, not 1")

    @classmethod
    def stationary(cls, a: Mask) -> "SchemeSpec":
        return cls(a.dilation, (a,), a.name)

    @property
    def r(self) -> int:
        return len(self.masks)

    @property
    def is_exact(self) -> bool:
        return all(a.is_exact for a in self.masks)

    @cached_property
    def composed(self) -> Mask:
        return compose_masks(self)


def compose_by_symbol(spec: SchemeSpec) -> FiniteSequence:
    out = spec.masks[0].seq
    for a in spec.masks[1:]:
        out = convolve(upsample(out, spec.dilation), a.seq)
    return out


def compose_by_operator(spec: SchemeSpec) -> FiniteSequence:
    """``M^{-r} S_{a_r} ... S_{a_1} delta``."""
    v = delta()
    for a in spec.masks:
        v = subdivide_once(a, v)
    return v.scale(Fraction(1, spec.dilation**spec.r))


def compose_masks(spec: SchemeSpec) -> Mask:
    """Composed mask with dilation ``M^r``; both constructions are computed and must agree."""
    sym = compose_by_symbol(spec)
    op = compose_by_operator(spec)
    if spec.is_exact:
        if sym != op:
            raise SubdivError("symbol and operator compositions disagree")
    else:
        diff = float((sym - op).norm_inf())
        if diff > FLOAT_TOL * max(1.0, float(sym.norm1())):
            raise SubdivError(f"symbol and operator compositions disagree by {diff:.3e}")
    return Mask(sym, spec.dilation**spec.r, spec.name)


def quasi_subdivide(spec: SchemeSpec, v: FiniteSequence, n: int) -> FiniteSequence:
    """``n`` subdivision steps cycling through ``a_1, a_2, ...`` (``a_1`` first)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    for i in range(n):
        v = subdivide_once(spec.masks[i % spec.r], v)
    return v


@dataclass
class QuasiCertificate:
    spec: SchemeSpec
    m: int
    sum_rules: list
    composed: InterpolationCertificate
    verdict: Verdict
    cauchy: list = field(default_factory=list)


def verify_quasi(spec: SchemeSpec, m: int = 0, s_a=None, n_max: int = 4) -> QuasiCertificate:
    """Certificate for ``C^m`` convergence and the cyclic interpolation property."""
    a = spec.composed
    srs = [sum_rule_order(x) for x in spec.masks]
    cert = verify_interpolatory(a, s_a, m, n_max=n_max)
    low = [i + 1 for i, s in enumerate(srs) if s <= m]
    if low:
        verdict = Verdict("failed", m, f"masks {low} have at most {m} sum rules")
    else:
        verdict = cert.verdict
    return QuasiCertificate(spec, m, srs, cert, verdict)


def cauchy_diagnostic(spec: SchemeSpec, v: FiniteSequence, blocks: int = 4, j: int = 0,
                      s_a=None) -> list[float]:
    """Sup-distance between scaled differences at consecutive full-cycle levels.

    Level ``q`` data index ``k`` sits at parameter ``N^{-q}(s_a + k) - s_a`` with
    ``N = M^r``; the finer level is read at the nearest matching index.  This
    is a convergence diagnostic only and never enters a verdict.
    """
    a = spec.composed
    N = a.dilation
    if s_a is None:
        s_a = shift_parameter(a)
    s = float(s_a)
    levels = [v]
    for _ in range(blocks):
        levels.append(quasi_subdivide(spec, levels[-1], spec.r))
    quot = []
    for q, data in enumerate(levels):
        d = backward_difference(data, j) if j else data
        quot.append((d.start, np.array([float(x) for x in d.coeffs]) * float(N) ** (j * q)))
    out = []
    for q in range(blocks):
        (s0, c0), (s1, c1) = quot[q], quot[q + 1]
        worst = 0.0
        for i, val in enumerate(c0):
            k = s0 + i
            kk = int(round(N * (s + k) - s))
            idx = kk - s1
            fine = c1[idx] if 0 <= idx < len(c1) else 0.0
            worst = max(worst, abs(fine - val))
        out.append(worst)
    return out
