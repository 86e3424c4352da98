"""Componentwise subdivision of control polygons."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .analysis import sum_rule_order
from .errors import SubdivError, check_budget
from .quasistat import SchemeSpec, quasi_subdivide
from .seqalg import FiniteSequence, delta


def _ceil_div(p: int, q: int) -> int:
    return -((-p) // q)


@dataclass(frozen=True)
class RefinedPolygon:
    """Level-``levels`` points with data indices ``first_index, first_index + 1, ...``.

    ``parameters[i]`` is the exact parameter of point ``i`` when the scheme
    reproduces linear data, otherwise None.
    """

    points: list
    first_index: int
    levels: int
    dilation: int
    closed: bool
    parameters: Optional[list]

    @property
    def drift(self) -> Optional[Fraction]:
        """Parameter of data index 0 at this level."""
        if self.parameters is None:
            return None
        return self.parameters[0] - Fraction(self.first_index, self.dilation**self.levels)


def cumulative_support(spec: SchemeSpec, n: int) -> tuple[int, int]:
    """Support of ``n`` quasi-stationary steps applied to the Dirac sequence."""
    sup = quasi_subdivide(spec, delta(), n).support
    if sup is None:
        raise SubdivError("the scheme annihilates the Dirac sequence")
    return sup


def output_range(spec: SchemeSpec, P: int, n: int, closed: bool) -> tuple[int, int]:
    """Level-``n`` indices emitted for ``P`` control points."""
    Mn = spec.dilation**n
    if closed:
        return 0, P * Mn - 1
    l_n, h_n = cumulative_support(spec, n)
    return h_n - Mn + 1, P * Mn + l_n - 1


def input_range(spec: SchemeSpec, P: int, n: int, closed: bool) -> tuple[int, int]:
    """Coarse indices feeding the emitted range (wrapped around when closed)."""
    if not closed:
        return 0, P - 1
    Mn = spec.dilation**n
    l_n, h_n = cumulative_support(spec, n)
    lo, hi = output_range(spec, P, n, True)
    return _ceil_div(lo - h_n, Mn), (hi - l_n) // Mn


def subdivide_polygon(spec: SchemeSpec, points: Sequence[Sequence[float]], levels: int,
                      closed: bool = False) -> RefinedPolygon:
    """Apply ``levels`` steps of the scheme to each coordinate.

    Open polygons keep only points whose whole stencil lies on the input;
    closed polygons are treated as periodic and return one period.
    """
    if levels < 0:
        raise ValueError("levels must be >= 0")
    P = len(points)
    if P < 2:
        raise ValueError("a polygon needs at least two points")
    M = spec.dilation
    check_budget(P * M**levels, f"level-{levels} polygon")
    lo, hi = output_range(spec, P, levels, closed)
    if hi < lo:
        raise ValueError(f"{P} points are too few for an open polygon at level {levels}")
    k0, k1 = input_range(spec, P, levels, closed)
    dim = len(points[0])
    cols = []
    for c in range(dim):
        data = FiniteSequence([float(points[k % P][c]) for k in range(k0, k1 + 1)], k0)
        out = quasi_subdivide(spec, data, levels)
        cols.append([float(out[j]) for j in range(lo, hi + 1)])
    pts = [list(row) for row in zip(*cols)]
    params = None
    if all(sum_rule_order(a) >= 2 for a in spec.masks):
        lin = FiniteSequence([Fraction(k) for k in range(k0, k1 + 1)], k0)
        if not spec.is_exact:
            lin = lin.to_float()
        # linear data k is carried to the parameter of each refined point
        t = quasi_subdivide(spec, lin, levels)
        params = [t[j] for j in range(lo, hi + 1)]
    return RefinedPolygon(pts, lo, levels, M, closed, params)
