from __future__ import annotations

import json
import math
import xml.etree.ElementTree as ET
from fractions import Fraction as F

import pytest
from hypothesis import given

from conftest import masks
from subdivkit import catalog as C
from subdivkit import formats as fmt
from subdivkit.cli import _join_signed, main
from subdivkit.transition import eval_phi


def _write_mask(tmp_path, name, a):
    p = tmp_path / f"{name}.json"
    p.write_text(json.dumps(fmt.mask_to_json(a)))
    return str(p)


def _write_scheme(tmp_path, name):
    p = tmp_path / f"{name}.json"
    p.write_text(json.dumps(fmt.scheme_to_json(C.scheme(name))))
    return str(p)


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


# -- formats ------------------------------------------------------------------


@given(masks(normalized=False))
def test_mask_json_roundtrip(data):
    a, _, _ = data
    obj = json.loads(json.dumps(fmt.mask_to_json(a)))
    b = fmt.mask_from_json(obj)
    assert b.seq == a.seq and b.dilation == a.dilation
    assert b.is_exact


def test_float_coefficients_roundtrip():
    a = C.ex2_masks(2)[0]
    b = fmt.mask_from_json(json.loads(json.dumps(fmt.mask_to_json(a))))
    assert b.seq == a.seq


@pytest.mark.parametrize(
    "obj",
    [
        {"dilation": 2, "support": [-1, 1], "coeffs": ["1/4", "1/2", "1/4"], "extra": 1},
        {"dilation": 2, "support": [-1, 1], "coeffs": ["1/4", "1/2"]},
        {"dilation": 1, "support": [0, 0], "coeffs": ["1"]},
        {"dilation": 2, "support": [-1, 1], "coeffs": ["1/4", "x", "1/4"]},
        {"dilation": 2, "support": [-1, 1], "coeffs": ["1/4", 0.5, "1/4"]},
        {"support": [-1, 1], "coeffs": ["1/4", "1/2", "1/4"]},
    ],
)
def test_mask_schema_rejections(obj):
    with pytest.raises(fmt.FormatError):
        fmt.mask_from_json(obj)


def test_scheme_rejects_unnormalized_mask():
    obj = {"dilation": 2, "masks": [{"support": [0, 1], "coeffs": ["1", "1"]}]}
    with pytest.raises(fmt.FormatError):
        fmt.scheme_from_json(obj)


def test_polygon_parsing():
    header, pts = fmt.parse_polygon("x,y\n0,0\n1,2\n")
    assert header == ["x", "y"] and pts == [[0.0, 0.0], [1.0, 2.0]]
    header, pts = fmt.parse_polygon("0,0,1\n1,2,3\n")
    assert header == ["x", "y", "z"]
    for bad in ("", "x,y\n", "x,y\n0,0\n", "0,0\n1\n", "0,0\nnan,1\n", "0\n1\n"):
        with pytest.raises(fmt.FormatError):
            fmt.parse_polygon(bad)


def test_svg_well_formed():
    svg = fmt.polygon_to_svg([[0, 0], [1, 0], [1, 1]], closed=True)
    root = ET.fromstring(svg)
    paths = [e for e in root.iter() if e.tag.endswith("path")]
    assert len(paths) == 1
    assert "-0 " not in paths[0].get("d")


def test_signed_option_rewrite():
    assert _join_signed(["construct", "--support", "-2:2", "--sa", "-1/3"]) == \
        ["construct", "--support=-2:2", "--sa=-1/3"]


# -- analyze ------------------------------------------------------------------


def test_analyze_ex4M2sr2d7(tmp_path, capsys):
    path = _write_mask(tmp_path, "ex4M2sr2d7", C.ex4M2sr2d7())
    code, out, _ = _run(capsys, ["analyze", path, "--m", "0"])
    rep = json.loads(out)
    assert code == 0
    assert rep["certificate"]["verdict"] == "verified"
    assert rep["smoothness"]["sm2"] == pytest.approx(1.29617, abs=1e-4)
    assert rep["s_a"] == "1/7"


def test_analyze_hat(tmp_path, capsys):
    code, out, _ = _run(capsys, ["analyze", _write_mask(tmp_path, "hat", C.hat())])
    rep = json.loads(out)
    assert code == 0 and rep["s_a"] == "0" and rep["symmetry_center"] == 0


def test_analyze_ex5_J2_c1(tmp_path, capsys):
    path = _write_mask(tmp_path, "ex5", C.ex5_J2())
    code, out, _ = _run(capsys, ["analyze", path, "--m", "1", "--n-max", "4"])
    rep = json.loads(out)
    assert code == 0
    assert rep["certificate"]["s_a"] == "1/4"


def test_analyze_exit_codes(tmp_path, capsys):
    hat = _write_mask(tmp_path, "hat", C.hat())
    assert _run(capsys, ["analyze", hat, "--m", "1"])[0] == 2
    cub = tmp_path / "cub.json"
    cub.write_text(json.dumps({"dilation": 2, "support": [-2, 2], "coeffs": ["1/16", "1/4", "3/8", "1/4", "1/16"]}))
    assert _run(capsys, ["analyze", str(cub)])[0] == 1
    bad = tmp_path / "bad.json"
    bad.write_text('{"dilation": 2, "support": [0, 0], "coeffs": ["1"], "typo": 3}')
    code, _, err = _run(capsys, ["analyze", str(bad)])
    assert code == 64 and "typo" in err
    (tmp_path / "junk.json").write_text("{not json")
    assert _run(capsys, ["analyze", str(tmp_path / "junk.json")])[0] == 64
    assert _run(capsys, ["analyze", str(tmp_path / "missing.json")])[0] == 64


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["construct", "--dilation", "2"])
    assert exc.value.code == 64
    with pytest.raises(SystemExit) as exc:
        main(["nosuchcommand"])
    assert exc.value.code == 64


def test_analyze_scheme_file(tmp_path, capsys):
    code, out, _ = _run(capsys, ["analyze", _write_scheme(tmp_path, "ex1"), "--m", "1"])
    rep = json.loads(out)
    assert code == 0 and rep["component_sum_rules"] == [2, 2]


def test_resource_exit_code(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("SUBDIVKIT_MAX_COEFFS", "50")
    path = _write_mask(tmp_path, "ex5", C.ex5_J2())
    assert _run(capsys, ["sample-phi", path, "--level", "6"])[0] == 4


def test_analyze_is_deterministic(tmp_path, capsys):
    path = _write_mask(tmp_path, "ex5", C.ex5_J3(F(7, 256)))
    first = _run(capsys, ["analyze", path, "--m", "2"])[1]
    second = _run(capsys, ["analyze", path, "--m", "2"])[1]
    assert first == second


# -- construct ----------------------------------------------------------------


def test_construct_ex4M2sr2d7(capsys):
    code, out, _ = _run(capsys, ["construct", "--dilation", "2", "--sa", "1/7", "--support", "-2:2",
                                 "--sum-rules", "2"])
    assert code == 0
    rep = json.loads(out)
    a = fmt.mask_from_json(rep["mask"])
    assert a.seq == C.ex4M2sr2d7().seq


def test_construct_ex5(capsys):
    code, out, _ = _run(capsys, ["construct", "--dilation", "3", "--sa", "1/4", "--support", "-3:4",
                                 "--sum-rules", "2", "--symmetric"])
    assert code == 0
    assert fmt.mask_from_json(json.loads(out)["mask"]).seq == C.ex5_J2().seq


def test_construct_family_with_optimized_member(capsys):
    code, out, _ = _run(capsys, ["construct", "--dilation", "3", "--sa", "1/4", "--support", "-6:7",
                                 "--sum-rules", "3", "--symmetric", "--optimize"])
    assert code == 0
    fam = json.loads(out)["families"][0]
    assert fam["description"]["kind"] == "affine"
    assert fam["optimized"]["sm2"] >= 2.469368 - 1e-3


def test_construct_infeasible(capsys):
    code, _, err = _run(capsys, ["construct", "--dilation", "2", "--sa", "1/2", "--support", "-3:4",
                                 "--sum-rules", "2"])
    assert code == 3 and "infeasible" in err


# -- subdivide ----------------------------------------------------------------


def test_subdivide_hat_square(tmp_path, capsys):
    poly = tmp_path / "sq.csv"
    poly.write_text("x,y\n0,0\n1,0\n1,1\n0,1\n")
    hat = _write_mask(tmp_path, "hat", C.hat())
    code, out, _ = _run(capsys, ["subdivide", hat, str(poly), "--levels", "1", "--closed"])
    assert code == 0
    rows = [list(map(float, r.split(","))) for r in out.strip().splitlines()[1:]]
    assert rows == [[0, 0], [0.5, 0], [1, 0], [1, 0.5], [1, 1], [0.5, 1], [0, 1], [0, 0.5]]
    code, out, _ = _run(capsys, ["subdivide", hat, str(poly), "--levels", "1"])
    assert out.splitlines()[0] == "x,y"
    assert len(out.strip().splitlines()) == 8


def test_subdivide_svg_and_json(tmp_path, capsys):
    poly = tmp_path / "p.csv"
    poly.write_text("\n".join(f"{math.cos(k)},{math.sin(2 * k)}" for k in range(12)) + "\n")
    path = _write_mask(tmp_path, "a", C.ex4M2sr2d7())
    code, out, _ = _run(capsys, ["subdivide", path, str(poly), "--levels", "3", "--format", "svg"])
    root = ET.fromstring(out)
    assert code == 0 and len([e for e in root.iter() if e.tag.endswith("path")]) == 1
    code, out, _ = _run(capsys, ["subdivide", path, str(poly), "--levels", "2", "--format", "json"])
    rep = json.loads(out)
    assert rep["s_a"] == "1/7"
    assert F(rep["drift"]) == -(1 - F(1, 4)) * F(1, 7)
    t = [F(p) for p in rep["parameters"]]
    j0 = rep["first_index"]
    assert all(t[i] == F(j0 + i, 4) + F(rep["drift"]) for i in range(len(t)))


def test_subdivide_ex2_two_step_interpolation(tmp_path, capsys):
    pts = [(math.cos(0.7 * k) * 3, math.sin(1.3 * k) + k) for k in range(14)]
    poly = tmp_path / "p.csv"
    poly.write_text("\n".join(f"{x!r},{y!r}" for x, y in pts) + "\n")
    code, out, _ = _run(capsys, ["subdivide", _write_scheme(tmp_path, "ex2_tval2"), str(poly), "--levels", "2",
                                 "--format", "json"])
    rep = json.loads(out)
    j0 = rep["first_index"]
    hits = 0
    for i, p in enumerate(rep["points"]):
        j = j0 + i
        if j % 4 == 0:
            x, y = pts[j // 4]
            assert abs(p[0] - x) < 1e-9 and abs(p[1] - y) < 1e-9
            hits += 1
    assert hits > 0


def test_subdivide_empty_polygon(tmp_path, capsys):
    poly = tmp_path / "e.csv"
    poly.write_text("x,y\n")
    assert _run(capsys, ["subdivide", _write_mask(tmp_path, "hat", C.hat()), str(poly), "--levels", "1"])[0] == 64


# -- sample-phi and spectrum --------------------------------------------------


def test_sample_phi_hat(tmp_path, capsys):
    code, out, _ = _run(capsys, ["sample-phi", _write_mask(tmp_path, "hat", C.hat()), "--level", "1"])
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "x,value"
    assert [tuple(map(float, l.split(","))) for l in lines[1:]] == [(-1, 0), (-0.5, 0.5), (0, 1), (0.5, 0.5), (1, 0)]


def test_sample_phi_ex4_level6(tmp_path, capsys):
    a = C.ex4M2C1(F(-3, 16))
    code, out, _ = _run(capsys, ["sample-phi", _write_mask(tmp_path, "ex4", a), "--level", "6"])
    assert code == 0
    rows = {F(r.split(",")[0]).limit_denominator(64): float(r.split(",")[1]) for r in out.strip().splitlines()[1:]}
    for x in (F(1, 2), F(-3, 4), F(5, 8)):
        assert rows[x] == pytest.approx(float(eval_phi(a, x)), abs=1e-15)
    assert max(abs(eval_phi(a, F(1, 3) + k) - (1 if k == 0 else 0)) for k in range(-3, 4)) == 0


def test_sample_phi_derivative_finite(tmp_path, capsys):
    path = _write_mask(tmp_path, "ex5", C.ex5_J3(F(7, 256)))
    code, out, _ = _run(capsys, ["sample-phi", path, "--level", "4", "--deriv", "2"])
    vals = [float(r.split(",")[1]) for r in out.strip().splitlines()[1:]]
    assert code == 0 and vals and all(math.isfinite(v) for v in vals)


def test_spectrum_hat(tmp_path, capsys):
    hat = _write_mask(tmp_path, "hat", C.hat())
    e0 = json.loads(_run(capsys, ["spectrum", hat, "--gamma", "0"])[1])
    e1 = json.loads(_run(capsys, ["spectrum", hat, "--gamma", "1"])[1])
    vals0 = sorted(z["re"] for z in e0["eigenvalues"])
    assert vals0 == pytest.approx([0.5, 0.5, 1.0])
    assert sorted(z["re"] for z in e1["eigenvalues"]) == pytest.approx(vals0)
    assert e0["moduli"] == sorted(e0["moduli"], reverse=True)


def test_spectrum_ex4M2sr2d7(tmp_path, capsys):
    rep = json.loads(_run(capsys, ["spectrum", _write_mask(tmp_path, "a", C.ex4M2sr2d7()), "--gamma", "0"])[1])
    vals = [complex(z["re"], z["im"]) for z in rep["eigenvalues"]]
    for target in (1, 0.5):
        assert min(abs(v - target) for v in vals) < 1e-9
    rep = json.loads(_run(capsys, ["spectrum", _write_mask(tmp_path, "a", C.ex4M2sr2d7()), "--gamma", "1",
                                   "--power", "3"])[1])
    assert rep["power"] == 3 and rep["dilation"] == 8
