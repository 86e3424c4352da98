"""File formats: mask/scheme JSON, polygon CSV, SVG and JSON emitters.

Mask file::

    {"dilation": 2, "support": [-1, 1], "coeffs": ["1/4", "1/2", "1/4"], "name": "hat"}

Coefficients are strings: ``"p/q"`` or an integer is read exactly, anything
with a decimal point or exponent is read as a float.  Integers are also
accepted as JSON numbers.  Scheme files hold ``{"dilation", "masks", "name"}``
where each entry of ``masks`` is a mask object whose ``dilation`` may be
omitted.  Unknown fields are rejected.
"""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import jsonschema

from .seqalg import FiniteSequence, Mask, parse_scalar

_COEFF = {"oneOf": [{"type": "string", "minLength": 1}, {"type": "integer"}]}
_SUPPORT = {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2}

MASK_SCHEMA = {
    "type": "object",
    "properties": {
        "dilation": {"type": "integer", "minimum": 2},
        "support": _SUPPORT,
        "coeffs": {"type": "array", "items": _COEFF, "minItems": 1},
        "name": {"type": "string"},
    },
    "required": ["dilation", "support", "coeffs"],
    "additionalProperties": False,
}

_INNER_MASK = dict(MASK_SCHEMA, required=["support", "coeffs"])

SCHEME_SCHEMA = {
    "type": "object",
    "properties": {
        "dilation": {"type": "integer", "minimum": 2},
        "masks": {"type": "array", "items": _INNER_MASK, "minItems": 1},
        "name": {"type": "string"},
    },
    "required": ["dilation", "masks"],
    "additionalProperties": False,
}


class FormatError(ValueError):
    """Malformed input file."""


def render_scalar(x) -> str:
    """Exact rationals as ``"p/q"`` (or ``"p"``), floats as shortest round-trip decimals."""
    if isinstance(x, Fraction):
        return str(x)
    return repr(float(x))


def render_float(x) -> str:
    return format(float(x), ".17g")


def _validate(obj, schema, what: str):
    try:
        jsonschema.validate(obj, schema)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path)
        raise FormatError(f"invalid {what}{' at ' + path if path else ''}: {exc.message}") from None


def _mask_from_obj(obj: dict, dilation: int) -> Mask:
    l, h = obj["support"]
    coeffs = obj["coeffs"]
    if h - l + 1 != len(coeffs):
        raise FormatError(f"support [{l}, {h}] needs {h - l + 1} coefficients, got {len(coeffs)}")
    try:
        vals = [Fraction(c) if isinstance(c, int) else parse_scalar(c) for c in coeffs]
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    return Mask(FiniteSequence(vals, l), dilation, obj.get("name"))


def mask_from_json(obj: dict) -> Mask:
    _validate(obj, MASK_SCHEMA, "mask file")
    return _mask_from_obj(obj, obj["dilation"])


def mask_to_json(a: Mask) -> dict:
    out = {"dilation": a.dilation}
    if a.seq.is_zero:
        out.update(support=[0, 0], coeffs=["0"])
    else:
        out.update(support=list(a.support), coeffs=[render_scalar(c) for c in a.seq.coeffs])
    if a.name:
        out["name"] = a.name
    return out


def scheme_from_json(obj: dict):
    """A scheme object, or a single mask object read as a one-mask scheme."""
    from .quasistat import SchemeSpec

    if isinstance(obj, dict) and "masks" in obj:
        _validate(obj, SCHEME_SCHEMA, "scheme file")
        M = obj["dilation"]
        masks = []
        for i, m in enumerate(obj["masks"], 1):
            if m.get("dilation", M) != M:
                raise FormatError(f"mask {i} has dilation {m['dilation']}, scheme has {M}")
            masks.append(_mask_from_obj(m, M))
        try:
            return SchemeSpec(M, tuple(masks), obj.get("name"))
        except ValueError as exc:
            raise FormatError(str(exc)) from None
    a = mask_from_json(obj)
    try:
        return SchemeSpec.stationary(a)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def scheme_to_json(spec) -> dict:
    out = {"dilation": spec.dilation, "masks": []}
    for a in spec.masks:
        d = mask_to_json(a)
        d.pop("dilation")
        out["masks"].append(d)
    if spec.name:
        out["name"] = spec.name
    return out


def load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from None


def load_mask(path: str) -> Mask:
    return mask_from_json(load_json(path))


def load_scheme(path: str):
    return scheme_from_json(load_json(path))


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


# -- polygons -------------------------------------------------------------------


def _is_number(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


def parse_polygon(text: str) -> tuple[list[str], list[list[float]]]:
    """``(column names, rows)``; a non-numeric first row is taken as the header."""
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    header = None
    if rows and not all(_is_number(c) for c in rows[0]):
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
    if len(rows) < 2:
        raise FormatError("a polygon needs at least two points")
    dim = len(rows[0])
    if dim not in (2, 3):
        raise FormatError(f"points must have 2 or 3 coordinates, got {dim}")
    pts = []
    for i, r in enumerate(rows, 1):
        if len(r) != dim:
            raise FormatError(f"row {i} has {len(r)} fields, expected {dim}")
        try:
            vals = [float(c) for c in r]
        except ValueError:
            raise FormatError(f"row {i} is not numeric: {r}") from None
        if not all(math.isfinite(v) for v in vals):
            raise FormatError(f"row {i} has a non-finite value")
        pts.append(vals)
    if header is None:
        header = ["x", "y", "z"][:dim]
    elif len(header) != dim:
        raise FormatError("header and data widths differ")
    return header, pts


def load_polygon(path: str):
    with open(path, encoding="utf-8") as fh:
        return parse_polygon(fh.read())


def polygon_to_csv(header: Sequence[str], pts: Iterable[Sequence[float]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for p in pts:
        w.writerow([render_float(v) for v in p])
    return buf.getvalue()


def polygon_to_svg(pts: Sequence[Sequence[float]], closed: bool = False, stroke_width: Optional[float] = None) -> str:
    """SVG 1.1 document with a single path through the first two coordinates."""
    xs = [p[0] for p in pts]
    ys = [0.0 - p[1] for p in pts]  # SVG y axis points down; 0.0 - avoids "-0"
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    span = max(x1 - x0, y1 - y0, 1e-12)
    pad = 0.05 * span
    vb = [x0 - pad, y0 - pad, (x1 - x0) + 2 * pad, (y1 - y0) + 2 * pad]
    sw = stroke_width if stroke_width is not None else span / 400
    cmds = [f"M {render_float(xs[0])} {render_float(ys[0])}"]
    cmds += [f"L {render_float(x)} {render_float(y)}" for x, y in zip(xs[1:], ys[1:])]
    if closed:
        cmds.append("Z")
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{" ".join(render_float(v) for v in vb)}">\n'
        f'  <path d="{" ".join(cmds)}" fill="none" stroke="black" stroke-width="{render_float(sw)}"/>\n'
        "</svg>\n"
    )


def phi_samples_to_csv(samples) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "value" if samples.deriv == 0 else f"d{samples.deriv}"])
    for x, v in samples.points():
        w.writerow([render_float(x), render_float(v)])
    return buf.getvalue()


def complex_to_json(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}
