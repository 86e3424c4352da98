"""Build a mask from dilation, shift, support and sum rules, then optimize a family."""

from __future__ import annotations

from fractions import Fraction as F

from subdivkit import ConstructionSpec, construct


def main():
    res = construct(ConstructionSpec(2, 2, (-2, 1), F(1, 7)))
    print("exact mask  ", res.best.mask)
    spec = ConstructionSpec(3, 3, (-6, 7), F(1, 4), symmetric=True, optimize=True)
    res = construct(spec)
    fam = res.families()[0]
    print("family dim  ", fam.dim)
    print("optimized   ", f"{res.optimized.value:.6f}")
    print("half shift on [-3, 4]:", construct(ConstructionSpec(2, 2, (-3, 4), F(1, 2))).reason)


if __name__ == "__main__":
    main()
