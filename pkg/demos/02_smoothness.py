"""Sobolev exponent and coset lower bounds for the catalogued masks."""

from __future__ import annotations

from subdivkit import catalog as C
from subdivkit import sm2, sminf_lower_bound


def main():
    print(f"{'mask':16s} {'sm2':>9s} {'coset n=3':>10s}")
    for name, make in C.STATIONARY.items():
        a = make()
        print(f"{name:16s} {sm2(a)[0]:9.6f} {sminf_lower_bound(a, 3):10.6f}")


if __name__ == "__main__":
    main()
