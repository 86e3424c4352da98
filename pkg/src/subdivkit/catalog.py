"""Reference masks and schemes used for regression checks and demos.

Rational masks are stored exactly.  Masks whose coefficients involve square
roots are only available in float64.
"""

from __future__ import annotations

import math
from fractions import Fraction as F
from typing import Callable

from .seqalg import FiniteSequence, Mask, convolve, upsample


def _mask(coeffs, start, M, name=None) -> Mask:
    return Mask(FiniteSequence([F(c) if not isinstance(c, float) else c for c in coeffs], start), M, name)


def _symmetric_half(half, M, name) -> Mask:
    """Mask with ``a(1 - k) = a(k)`` from its values on ``[1, len(half)]``."""
    n = len(half)
    coeffs = list(reversed(half)) + list(half)
    return _mask(coeffs, 1 - n, M, name)


def hat() -> Mask:
    return _mask(["1/4", "1/2", "1/4"], -1, 2, "hat")


def quadratic_bspline() -> Mask:
    return _mask(["1/8", "3/8", "3/8", "1/8"], -1, 2, "quadratic-bspline")


def ex4M2C1(t=F(0)) -> Mask:
    """One-parameter ``1/3``-shifted family with ``M = 2``, two sum rules; ``t != -2/3``."""
    t = F(t) if not isinstance(t, float) else t
    if t == F(-2, 3):
        raise ValueError("t = -2/3 is excluded")
    coeffs = [
        -(3 * t + 1) ** 2 / (18 * t + 12),
        (3 * t + 1) / (9 * t + 6),
        (63 * t**2 + 78 * t + 28) / (72 * t + 48),
        2 / (9 * t + 6),
        -3 * t * (t + 1) / (12 * t + 8),
        t / (6 * t + 4),
        -3 * t**2 / (24 * t + 16),
    ]
    return Mask(FiniteSequence(coeffs, -2), 2, f"ex4M2C1(t={t})")


def ex4M2sr2d7() -> Mask:
    return _mask(["-1/28", "3/14", "15/28", "2/7"], -2, 2, "ex4M2sr2d7")


def ex5_J2() -> Mask:
    return _mask(["-1/36", "1/36", "1/6", "1/3", "1/3", "1/6", "1/36", "-1/36"], -3, 3, "ex5_J2")


def ex5_J3(t=F(7, 256)) -> Mask:
    t = F(t) if not isinstance(t, float) else t
    half = [F(137, 432), F(3, 16), F(1, 16) - F(2, 3) * t, F(-19, 432) + F(2, 3) * t,
            F(-1, 48), F(-1, 72) + t / 3, F(5, 432) - t / 3]
    return _symmetric_half(half, 3, f"ex5_J3(t={t})")


def ex5_J5() -> Mask:
    half = [F(87651329, 277385472), F(25, 128), F(3486281, 69346368), F(-40618421, 1386927360),
            F(-25, 768), F(-95969, 10668672), F(4981993, 1040195520), F(1, 256),
            F(3609913, 4160782080), F(-130015, 416078208), F(0), F(26003, 4160782080)]
    return _symmetric_half(half, 3, "ex5_J5")


def ex6_J2() -> Mask:
    return _mask(["-1/64", "1/64", "3/32", "5/32", "1/4", "1/4", "5/32", "3/32", "1/64", "-1/64"],
                 -4, 4, "ex6_J2")


def ex6_J3() -> Mask:
    half = [F(807, 3328), F(607, 3328), F(645, 6656), F(141, 6656), F(-83, 6656),
            F(-123, 6656), F(-9, 832), F(-1, 832)]
    return _symmetric_half(half, 4, "ex6_J3")


def ex6_J5() -> Mask:
    half = [F(6327597, 26083328), F(34295435, 182583296), F(18691499, 182583296),
            F(37613109, 1460666368), F(-24468257, 1460666368), F(-10210465, 365166592),
            F(-6463745, 365166592), F(-3546873, 912916480), F(186261, 91291648),
            F(1281515, 365166592), F(710475, 365166592), F(331365, 1460666368),
            F(198819, 7303331840)]
    return _symmetric_half(half, 4, "ex6_J5")


# -- quasi-stationary families ----------------------------------------------


def _factor_family(power: int, inner: list, inner_start: int, scale) -> FiniteSequence:
    """``scale * (1+z)^power * inner(z)`` with the overall shift baked into ``inner_start``."""
    one = F(1)
    out = FiniteSequence(inner, inner_start)
    for _ in range(power):
        out = convolve(out, FiniteSequence([one, one], 0))
    return out.scale(scale)


def two_ring(t1, t2) -> Mask:
    """Symmetric ``M = 2`` mask on ``[-4, 4]`` with four sum rules."""
    inner = [t2, t1, 1 - 2 * t1 - 2 * t2, t1, t2]
    return Mask(_factor_family(4, inner, -4, F(1, 16)), 2)


def one_ring(t1) -> Mask:
    """Symmetric ``M = 2`` mask on ``[-2, 2]`` with two sum rules."""
    return Mask(_factor_family(2, [t1, 1 - 2 * t1, t1], -2, F(1, 4)), 2)


def one_ring_sr4(t5) -> Mask:
    """Symmetric ``M = 2`` mask on ``[-3, 3]`` with four sum rules."""
    return Mask(_factor_family(4, [t5, 1 - 2 * t5, t5], -3, F(1, 16)), 2)


def ex1_masks() -> list[Mask]:
    return [_mask(["-11/168", "1/4", "53/84", "1/4", "-11/168"], -2, 2, "ex1_a1"),
            _mask(["11/128", "1/4", "21/64", "1/4", "11/128"], -2, 2, "ex1_a2")]


def ex2_masks(choice: int = 2) -> list[Mask]:
    """Float masks for the two surd parameter choices (``choice`` 1 or 2)."""
    if choice == 1:
        r = math.sqrt(721)
        t1, t2, t3, t4 = -(r + 55) / 256, 0.0, (r - 33) / 64, -9 / 32
    elif choice == 2:
        r = math.sqrt(161)
        t1, t2, t3, t4 = -(r + 19) / 16, 5 / 16, (r - 11) / 4, 0.0
    else:
        raise ValueError("choice must be 1 or 2")
    return [two_ring(t1, t2), two_ring(t3, t4)]


def ex3_masks() -> list[Mask]:
    r = math.sqrt(713)
    t1 = -(r + 41) / 32
    t2 = 11 / 32
    t3 = 179 * r / 616 - 140873 / 19712
    t4 = 40137 / 39424 - 51 * r / 1232
    t5 = 19 / 64
    return [two_ring(t1, t2), two_ring(t3, t4), one_ring_sr4(t5)]


STATIONARY: dict[str, Callable[[], Mask]] = {
    "hat": hat,
    "ex4M2C1_t0": lambda: ex4M2C1(F(0)),
    "ex4M2C1_t-3/16": lambda: ex4M2C1(F(-3, 16)),
    "ex4M2sr2d7": ex4M2sr2d7,
    "ex5_J2": ex5_J2,
    "ex5_J3_t5/144": lambda: ex5_J3(F(5, 144)),
    "ex5_J3_t7/256": lambda: ex5_J3(F(7, 256)),
    "ex5_J5": ex5_J5,
    "ex6_J2": ex6_J2,
    "ex6_J3": ex6_J3,
    "ex6_J5": ex6_J5,
}

QUASI: dict[str, Callable[[], list]] = {
    "ex1": ex1_masks,
    "ex2_tval1": lambda: ex2_masks(1),
    "ex2_tval2": lambda: ex2_masks(2),
    "ex3": ex3_masks,
}


def get(name: str):
    """Look up a stationary mask or a quasi-stationary mask list by name."""
    if name in STATIONARY:
        return STATIONARY[name]()
    if name in QUASI:
        return QUASI[name]()
    raise KeyError(f"unknown fixture {name!r}; known: {sorted(STATIONARY) + sorted(QUASI)}")


def scheme(name: str):
    """Any fixture as a :class:`~subdivkit.quasistat.SchemeSpec`."""
    from .quasistat import SchemeSpec

    obj = get(name)
    if isinstance(obj, Mask):
        return SchemeSpec.stationary(obj)
    return SchemeSpec(obj[0].dilation, tuple(obj), name)
