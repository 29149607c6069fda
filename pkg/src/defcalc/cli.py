"""Command-line front end.

Exit status: 0 when every check passes, 1 when a check fails, 2 for usage,
parse, or precondition errors.
"""

from __future__ import annotations

import argparse
import re
import sys
import time
from typing import Sequence

from . import cohomology, deformation, s3rep
from .errors import BudgetExceeded, CheckFailure, PreconditionError
from .matgroup import gamma_array
from .parser import SpecSyntaxError, parse_ring_spec
from .report import Report
from .ring import element_array, maximal_ideal_array

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
ENUMERATION_CHECK_LIMIT = 10**6


class UsageError(Exception):
    pass


def _ring(text: str):
    return parse_ring_spec(text).to_ring_spec()


def split_specs(text: str) -> list[str]:
    """Split a comma-separated list of ring specs, ignoring commas inside brackets."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur).strip())
    if any(not s for s in parts):
        raise UsageError(f"empty ring spec in {text!r}")
    return parts


def _prec(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"\s*(\d+)\s*,\s*(\d+)\s*", text)
    if not m:
        raise argparse.ArgumentTypeError("expected k,N")
    return int(m.group(1)), int(m.group(2))


# -- commands ---------------------------------------------------------------


def cmd_ring_info(args) -> Report:
    expr = parse_ring_spec(args.spec)
    R = expr.to_ring_spec()
    rep = Report("ring info", {"spec": str(expr)})
    rep.results.update(
        {
            "cardinality": R.cardinality,
            "maximal_ideal_size": R.maximal_ideal_size,
            "gamma_order": R.gamma_order,
            "nilpotency_index": R.nilpotency_index,
            "dim": R.dim,
        }
    )
    if R.cardinality <= ENUMERATION_CHECK_LIMIT:
        rep.check("cardinality matches enumeration", len(element_array(R)) == R.cardinality)
        m = len(maximal_ideal_array(R))
        rep.check("|m| matches enumeration", m == R.maximal_ideal_size)
        rep.check("|Gamma| = |m|^4", R.gamma_order == m**4)
    if R.gamma_order <= ENUMERATION_CHECK_LIMIT:
        rep.check("|Gamma| matches enumeration", len(gamma_array(R)) == R.gamma_order)
    return rep


def cmd_rep_decompose(args) -> Report:
    rho = s3rep.rep_by_name(args.rep, args.p)
    mult = s3rep.decompose(rho)
    rep = Report("rep decompose", {"p": args.p, "rep": args.rep})
    rep.results["multiplicities"] = {"triv": mult[0], "sign": mult[1], "std": mult[2]}
    rep.results["dim"] = rho.dim
    rep.check("representation is a homomorphism", rho.is_homomorphism())
    rep.check(
        "intertwiner dimensions match multiplicities",
        tuple(s3rep.equivariant_hom_dim(irr, rho) for irr in s3rep.irreducibles(args.p)) == mult,
    )
    return rep


def _cohom_group(name: str, p: int) -> cohomology.FiniteGroup:
    if name == "s3":
        return cohomology.s3_group()
    if name == "trivial":
        return cohomology.trivial_group()
    if name == "zp":
        return cohomology.cyclic_group(p)
    m = re.fullmatch(r"z(\d+)", name)
    if m and int(m.group(1)) >= 1:
        return cohomology.cyclic_group(int(m.group(1)))
    raise UsageError(f"unknown group {name!r}")


def _cohom_module(G: cohomology.FiniteGroup, module: str, p: int) -> cohomology.GModule:
    m = re.fullmatch(r"f_p\^(\d+)", module)
    if m:
        return cohomology.trivial_module(G, int(m.group(1)), p)
    if module == "triv":
        return cohomology.trivial_module(G, 1, p)
    if G.name != "S3":
        raise UsageError(f"module {module!r} is only defined for s3")
    try:
        return cohomology.module_from_rep(s3rep.rep_by_name(module, p))
    except KeyError as exc:
        raise UsageError(str(exc)) from None


def cmd_cohom(args) -> Report:
    p = args.p
    M = _cohom_module(_cohom_group(args.group, p), args.module, p)
    res = cohomology.cohomology_dim(M, args.degree)
    rep = Report("cohom", {"group": args.group, "module": args.module, "degree": args.degree, "p": p})
    rep.results.update(
        {"dim": res.dim, "cocycle_dim": res.cocycle_dim, "coboundary_dim": res.coboundary_dim}
    )
    rep.check("module action is a homomorphism", M.is_action())
    return rep


def cmd_deform_count(args) -> Report:
    R = _ring(args.ring)
    try:
        rho = deformation.residual_by_name(args.group, R.p)
    except KeyError as exc:
        raise UsageError(str(exc)) from None
    lifts = deformation.enumerate_lifts(rho, R, threads=args.threads)
    classes = deformation.strict_equiv_classes(lifts, R)
    rep = Report("deform count", {"group": args.group, "ring": str(R)})
    rep.results.update(
        {
            "lifts": len(lifts),
            "classes": len(classes),
            "orbit_sizes": [c.orbit_size for c in classes],
            "representatives": [[str(m) for m in c.representative] for c in classes],
        }
    )
    rep.check("residual representation respects relations", rho.is_homomorphism())
    rep.check("orbit sizes sum to the lift count", sum(c.orbit_size for c in classes) == len(lifts))
    return rep


def cmd_deform_tangent(args) -> Report:
    gens = tuple(g.strip() for g in args.generators.split(",") if g.strip())
    rep = Report("deform tangent", {"p": args.p, "generators": list(gens)})
    try:
        t = deformation.tangent_dim(args.p, gens)
    except CheckFailure as exc:
        rep.results.update(exc.witness)
        rep.check("routes agree", False, exc.witness)
        return rep
    rep.results.update(
        {"tangent_dim": t.value, "route_count": t.route_count, "route_linear_algebra": t.route_linear_algebra}
    )
    rep.check("routes agree", t.route_count == t.route_linear_algebra)
    return rep


def cmd_deform_verify_boston(args) -> Report:
    R = _ring(args.ring)
    if R.p != args.p:
        raise UsageError(f"ring {R} is not over F_{args.p}")
    k, N = args.prec if args.prec else deformation.dominating_precision([R])
    datum = deformation.build_datum(args.p, k, N)
    s1 = deformation.verify_step1_bijection(
        datum, R, mode=args.mode, seed=args.seed, samples=args.samples, threads=args.threads
    )
    rep = Report(
        "deform verify-boston",
        {"p": args.p, "ring": str(R), "mode": args.mode, "seed": args.seed, "prec": [k, N], "samples": args.samples},
    )
    rep.results.update(s1.as_dict())
    rep.check("well-defined and S3-equivariant", s1.equivariant and s1.homomorphism, s1.witness)
    rep.check("injective", s1.injective)
    rep.check("surjective", s1.surjective)
    return rep


def cmd_report_counterexample(args) -> Report:
    k, N = args.prec
    rings = None
    if args.rings:
        rings = [_ring(s) for s in split_specs(args.rings)]
    return deformation.counterexample_report(
        args.p, k, N, rings=rings, threads=args.threads, seed=args.seed, samples=args.samples
    )


# -- argument parsing ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default=None, help="default: text on stdout, json with --out")
    common.add_argument("--out", help="write the report to this file")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--timing", action="store_true", help="record wall time in the report")

    parser = argparse.ArgumentParser(prog="defcalc", description="Desk-scale deformation calculator.")
    sub = parser.add_subparsers(dest="group_cmd", required=True)

    ring = sub.add_parser("ring").add_subparsers(dest="cmd", required=True)
    info = ring.add_parser("info", parents=[common])
    info.add_argument("spec")
    info.set_defaults(func=cmd_ring_info)

    rep = sub.add_parser("rep").add_subparsers(dest="cmd", required=True)
    dec = rep.add_parser("decompose", parents=[common])
    dec.add_argument("--p", type=int, required=True)
    dec.add_argument("--rep", choices=("std", "sign", "triv", "ad"), default="ad")
    dec.set_defaults(func=cmd_rep_decompose)

    coh = sub.add_parser("cohom", parents=[common])
    coh.add_argument("--group", required=True, help="s3, zp, z<n> or trivial")
    coh.add_argument("--module", required=True, help="triv, sign, std, ad or f_p^d")
    coh.add_argument("--degree", type=int, choices=(0, 1, 2), required=True)
    coh.add_argument("--p", type=int, default=5)
    coh.set_defaults(func=cmd_cohom)

    deform = sub.add_parser("deform").add_subparsers(dest="cmd", required=True)
    count = deform.add_parser("count", parents=[common])
    count.add_argument("--group", choices=("s3", "trivial"), default="s3")
    count.add_argument("--ring", required=True)
    count.set_defaults(func=cmd_deform_count)
    tangent = deform.add_parser("tangent", parents=[common])
    tangent.add_argument("--p", type=int, required=True)
    tangent.add_argument("--generators", default="X,Y")
    tangent.set_defaults(func=cmd_deform_tangent)
    boston = deform.add_parser("verify-boston", parents=[common])
    boston.add_argument("--p", type=int, required=True)
    boston.add_argument("--ring", required=True)
    boston.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    boston.add_argument("--seed", type=int, default=0)
    boston.add_argument("--samples", type=int, default=200)
    boston.add_argument("--prec", type=_prec, default=None)
    boston.set_defaults(func=cmd_deform_verify_boston)

    report = sub.add_parser("report").add_subparsers(dest="cmd", required=True)
    ce = report.add_parser("counterexample", parents=[common])
    ce.add_argument("--p", type=int, required=True)
    ce.add_argument("--prec", type=_prec, default=(1, 2))
    ce.add_argument("--rings", default=None)
    ce.add_argument("--seed", type=int, default=0)
    ce.add_argument("--samples", type=int, default=200)
    ce.set_defaults(func=cmd_report_counterexample)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.threads < 1:
        print("defcalc: --threads must be positive", file=sys.stderr)
        return EXIT_USAGE
    start = time.perf_counter()
    try:
        report = args.func(args)
    except (SpecSyntaxError, UsageError, PreconditionError, BudgetExceeded) as exc:
        print(f"defcalc: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CheckFailure as exc:
        print(f"defcalc: check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"defcalc: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.timing:
        report.timing_ms = round((time.perf_counter() - start) * 1000, 1)
    fmt = args.format or ("json" if args.out else "text")
    text = report.to_json() if fmt == "json" else report.to_text()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"{'PASS' if report.passed else 'FAIL'}: wrote {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
