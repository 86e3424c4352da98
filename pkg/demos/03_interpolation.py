"""Certify shifted interpolation and evaluate the refinable function."""

from __future__ import annotations

from fractions import Fraction as F

from subdivkit import catalog as C
from subdivkit import eval_phi, verify_interpolatory


def main():
    a = C.ex4M2C1(F(0))
    cert = verify_interpolatory(a, m=0)
    print("verdict     ", cert.verdict)
    s = cert.admissibility.s_a
    print("s_a         ", s)
    for k in range(-2, 3):
        print(f"phi(s_a{k:+d}) ", eval_phi(a, s + k))
    print("C^1 check   ", verify_interpolatory(a, m=1).verdict)


if __name__ == "__main__":
    main()
