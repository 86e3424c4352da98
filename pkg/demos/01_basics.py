"""Masks, symbols, sum rules and one round of subdivision in exact arithmetic."""

from __future__ import annotations

from fractions import Fraction as F

from subdivkit import FiniteSequence, iterated_mask, subdivide, sum_rule_factorization, sum_rule_order
from subdivkit import catalog as C
from subdivkit.analysis import shift_parameter


def main():
    a = C.ex4M2sr2d7()
    print("mask         ", a)
    print("sum rules    ", sum_rule_order(a))
    fact = sum_rule_factorization(a)
    print("factor b     ", fact.b)
    print("shift s_a    ", shift_parameter(a))
    v = FiniteSequence([F(k) for k in range(-6, 7)], -6)
    out = subdivide(a, v, 1)
    print("S(k) at 0..3 ", [str(out[j]) for j in range(4)])
    print("a_2 support  ", iterated_mask(a, 2).support)


if __name__ == "__main__":
    main()
