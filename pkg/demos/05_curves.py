"""Refine a closed control polygon with a quasi-stationary scheme and write SVG."""

from __future__ import annotations

import math
import sys

from subdivkit import catalog as C
from subdivkit import formats, subdivide_polygon


def main(argv=None):
    pts = [(math.cos(2 * math.pi * k / 6), math.sin(2 * math.pi * k / 6)) for k in range(6)]
    ref = subdivide_polygon(C.scheme("ex2_tval2"), pts, 4, closed=True)
    print(f"{len(ref.points)} points, drift {ref.drift}", file=sys.stderr)
    sys.stdout.write(formats.polygon_to_svg(ref.points, closed=True))


if __name__ == "__main__":
    main()
