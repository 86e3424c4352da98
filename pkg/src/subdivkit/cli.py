"""Command-line interface: ``subdivkit analyze|construct|subdivide|sample-phi|spectrum``.

Exit codes: 0 verified/success, 2 smoothness unconfirmed, 1 failed,
3 infeasible construction, 4 resource limit, 64 usage or input error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import formats as fmt
from .analysis import linear_phase_check, shift_parameter, smoothness_report, sum_rule_order
from .construct import ConstructionSpec, construct, optimize_free_parameters
from .curves import subdivide_polygon
from .errors import EigenError, InadmissibleError, InfeasibleError, ResourceLimitError, SubdivError
from .interp import verify_interpolatory
from .quasistat import verify_quasi
from .seqalg import Mask, iterated_mask, parse_scalar, symmetry_center
from .transition import sample_phi_grid, spectrum, transition_matrix

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_UNCONFIRMED = 2
EXIT_INFEASIBLE = 3
EXIT_RESOURCE = 4
EXIT_USAGE = 64

VERDICT_EXIT = {"verified": EXIT_OK, "unconfirmed": EXIT_UNCONFIRMED, "failed": EXIT_FAILED}

# options whose values may start with "-" (negative numbers, ranges like -2:2)
_SIGNED_OPTIONS = ("--support", "--sa", "--gamma")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _join_signed(argv: Sequence[str]) -> list[str]:
    out, it = [], iter(argv)
    for tok in it:
        if tok in _SIGNED_OPTIONS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _support(text: str) -> tuple[int, int]:
    try:
        l, h = (int(p) for p in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"support must look like l:h, got {text!r}") from None
    if l > h:
        raise argparse.ArgumentTypeError(f"empty support {text!r}")
    return l, h


def _write(text: str, path: Optional[str]):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _scalar(x):
    return fmt.render_scalar(x) if x is not None else None


def _seq_json(s):
    if s is None:
        return None
    if s.is_zero:
        return {"support": None, "coeffs": []}
    return {"support": list(s.support), "coeffs": [fmt.render_scalar(c) for c in s.coeffs]}


def _smoothness_json(rep) -> Optional[dict]:
    if rep is None:
        return None
    return {
        "sum_rules": rep.sr,
        "sm2": rep.sm2,
        "lambda_c": fmt.complex_to_json(rep.lambda_c),
        "lambda_c_modulus": abs(complex(rep.lambda_c)),
        "sminf_lower": {str(n): v for n, v in sorted(rep.sminf_lower.items())},
        "certified_lower": rep.certified_sminf,
    }


def _certificate_json(cert) -> dict:
    adm = cert.admissibility
    return {
        "s_a": _scalar(adm.s_a) if adm else None,
        "m_s": adm.m_s if adm else None,
        "n_s": adm.n_s if adm else None,
        "gamma": adm.gamma if adm else None,
        "w": _seq_json(cert.w),
        "support_window": list(cert.support_window) if cert.support_window else None,
        "residual_first": _scalar(cert.residual_12),
        "residual_eigen": _scalar(cert.residual_13),
        "residual_coset": _scalar(cert.residual_14),
        "exact": cert.exact,
        "verdict": cert.verdict.kind,
        "m": cert.verdict.m,
        "reason": cert.verdict.reason,
    }


def mask_report(a: Mask, m: int, n_max: int, s_a=None) -> tuple[dict, str]:
    rep = smoothness_report(a, n_max=n_max)
    cert = verify_interpolatory(a, s_a, m, n_max=n_max, report=rep)
    lp = linear_phase_check(a)
    out = {
        "mask": fmt.mask_to_json(a),
        "dilation": a.dilation,
        "exact": a.is_exact,
        "smoothness": _smoothness_json(rep),
        "m_a": _scalar(lp.m_a),
        "s_a": _scalar(shift_parameter(a)),
        "symmetry_center": symmetry_center(a),
        "linear_phase": lp.ok,
        "certificate": _certificate_json(cert),
    }
    return out, cert.verdict.kind


def cmd_analyze(args) -> int:
    spec = fmt.load_scheme(args.mask)
    if spec.r == 1:
        out, kind = mask_report(spec.masks[0], args.m, args.n_max, args.sa)
    else:
        qc = verify_quasi(spec, args.m, args.sa, n_max=args.n_max)
        out, _ = mask_report(spec.composed, args.m, args.n_max, args.sa)
        out["scheme"] = fmt.scheme_to_json(spec)
        out["component_sum_rules"] = qc.sum_rules
        out["certificate"]["verdict"] = qc.verdict.kind
        out["certificate"]["reason"] = qc.verdict.reason
        kind = qc.verdict.kind
    _write(fmt.dump_json(out), args.output)
    return VERDICT_EXIT[kind]


def cmd_construct(args) -> int:
    try:
        spec = ConstructionSpec(args.dilation, args.sum_rules, args.support, args.sa, symmetric=args.symmetric,
                                m=args.m, optimize=args.optimize, seed=args.seed, starts=args.starts)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    res = construct(spec)
    if not res.accepted:
        print(f"infeasible: {res.reason}", file=sys.stderr)
        return EXIT_INFEASIBLE
    best = res.best
    out = {
        "mask": fmt.mask_to_json(best.mask),
        "exact": best.exact,
        "verified": best.verified,
        "sm2": best.gate.sm2,
        "lambda_c_modulus": abs(complex(best.gate.lambda_c)),
        "gate": best.gate.via,
        "w": _seq_json(best.w),
        "candidates": len(res.candidates),
        "families": [],
    }
    for fam in res.families():
        entry = {"description": fam.describe()}
        if fam.dim:
            try:
                opt = res.optimized if res.optimized is not None and fam is res.family else \
                    optimize_free_parameters(fam, seed=args.seed)
            except SubdivError:
                opt = None
            if opt is not None and opt.mask is not None:
                entry["optimized"] = {
                    "params": [repr(float(p)) for p in opt.params],
                    "sm2": opt.value,
                    "mask": fmt.mask_to_json(opt.mask),
                }
        out["families"].append(entry)
    _write(fmt.dump_json(out), args.output)
    return EXIT_OK


def cmd_subdivide(args) -> int:
    spec = fmt.load_scheme(args.scheme)
    header, pts = fmt.load_polygon(args.polygon)
    try:
        ref = subdivide_polygon(spec, pts, args.levels, closed=args.closed)
    except ValueError as exc:
        raise fmt.FormatError(str(exc)) from None
    if args.format == "csv":
        text = fmt.polygon_to_csv(header, ref.points)
    elif args.format == "svg":
        text = fmt.polygon_to_svg(ref.points, closed=args.closed)
    else:
        s_a = shift_parameter(spec.composed) if sum_rule_order(spec.composed) >= 1 else None
        obj = {
            "dilation": ref.dilation,
            "levels": ref.levels,
            "closed": ref.closed,
            "columns": header,
            "first_index": ref.first_index,
            "s_a": _scalar(s_a),
            "drift": _scalar(ref.drift),
            "parameters": [fmt.render_scalar(p) for p in ref.parameters] if ref.parameters is not None else None,
            "points": [[float(v) for v in p] for p in ref.points],
        }
        text = fmt.dump_json(obj)
    _write(text, args.output)
    return EXIT_OK


def cmd_sample_phi(args) -> int:
    a = fmt.load_mask(args.mask)
    samples = sample_phi_grid(a, args.level, args.deriv)
    _write(fmt.phi_samples_to_csv(samples), args.output)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    a = fmt.load_mask(args.mask)
    if args.power > 1:
        a = Mask(iterated_mask(a, args.power), a.dilation**args.power)
    T = transition_matrix(a, args.gamma)
    eig = spectrum(T)
    out = {
        "dilation": a.dilation,
        "gamma": args.gamma,
        "power": args.power,
        "index_range": list(T.index_range) if T.index_range else None,
        "eigenvalues": [fmt.complex_to_json(z) for z in eig],
        "moduli": [abs(complex(z)) for z in eig],
    }
    _write(fmt.dump_json(out), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="subdivkit", description="Analyze, construct and run interpolatory subdivision schemes.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("analyze", help="smoothness and interpolation report for a mask or scheme file")
    q.add_argument("mask")
    q.add_argument("--m", type=int, default=0, help="target smoothness order (default 0)")
    q.add_argument("--n-max", type=int, default=4, help="deepest level for coset bounds (default 4)")
    q.add_argument("--sa", type=_rational, default=None, help="shift s_a; default from the first moment")
    q.add_argument("--output", "-o")
    q.set_defaults(func=cmd_analyze)

    q = sub.add_parser("construct", help="solve for an s_a-interpolating mask")
    q.add_argument("--dilation", type=int, required=True)
    q.add_argument("--sa", type=_rational, required=True)
    q.add_argument("--support", type=_support, required=True, help="l:h")
    q.add_argument("--sum-rules", type=int, required=True)
    q.add_argument("--symmetric", action="store_true")
    q.add_argument("--m", type=int, default=0)
    q.add_argument("--optimize", action="store_true", help="maximize sm2 over free parameters")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--starts", type=int, default=64, help="Newton starting points")
    q.add_argument("--output", "-o")
    q.set_defaults(func=cmd_construct)

    q = sub.add_parser("subdivide", help="refine a control polygon")
    q.add_argument("scheme")
    q.add_argument("polygon")
    q.add_argument("--levels", type=int, required=True)
    q.add_argument("--format", choices=("csv", "svg", "json"), default="csv")
    q.add_argument("--closed", action="store_true", help="treat the polygon as periodic")
    q.add_argument("--output", "-o")
    q.set_defaults(func=cmd_subdivide)

    q = sub.add_parser("sample-phi", help="refinable function on a dyadic-type grid")
    q.add_argument("mask")
    q.add_argument("--level", type=int, required=True)
    q.add_argument("--deriv", type=int, default=0)
    q.add_argument("--output", "-o")
    q.set_defaults(func=cmd_sample_phi)

    q = sub.add_parser("spectrum", help="eigenvalues of a transition matrix")
    q.add_argument("mask")
    q.add_argument("--gamma", type=int, default=0)
    q.add_argument("--power", type=int, default=1)
    q.add_argument("--output", "-o")
    q.set_defaults(func=cmd_spectrum)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(_join_signed(argv))
    for name in ("levels", "level", "deriv", "n_max", "m", "power", "starts"):
        if getattr(args, name, 0) is not None and getattr(args, name, 0) < 0:
            parser.error(f"--{name.replace('_', '-')} must be >= 0")
    if getattr(args, "power", 1) == 0:
        parser.error("--power must be >= 1")
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (EigenError, InadmissibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (fmt.FormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SubdivError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    raise SystemExit(main())
