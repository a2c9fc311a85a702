"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 when ``verify --assert-bound`` is
exceeded.
"""
from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from . import kmsf
from .classifier import DirectionSet, classify, reduced_classify
from .lab import (
    FIELD_KINDS,
    EnsembleConfig,
    LabError,
    adversarial_search,
    estimate_constant,
    load_catalog,
    null_family_demo,
)
from .norms import lp_norm
from .presets import SpecError, load_spec, part_map_preset
from .report import write_report
from .spectral import FieldError, Grid, kms_correction
from .symbols import DEFAULT_TOL, SymbolError

EXIT_OK, EXIT_INPUT, EXIT_BOUND = 0, 2, 3
DEFAULT_GRID = {2: 64, 3: 32}


class InputError(Exception):
    pass


def _common(p: argparse.ArgumentParser, report_out: bool = True):
    p.add_argument("--format", choices=("json", "text"), default="json", help="report format (default: json)")
    if report_out:
        p.add_argument("-o", dest="output", default=None, help="report path (default: stdout)")


def _ensemble_flags(p: argparse.ArgumentParser):
    p.add_argument("catalog", nargs="?", default=None, help="scenario catalog JSON (default: bundled catalog)")
    p.add_argument("--scenario", action="append", default=None,
                   help="scenario label; repeatable (default: every scenario in the catalog)")
    p.add_argument("--p", type=float, default=None, help="override the scenario exponent p")
    p.add_argument("--grid", type=int, default=None, help="points per axis (default: 32 in 3D, 64 in 2D)")
    p.add_argument("--seed", type=int, default=0, help="ensemble seed (default: 0)")
    p.add_argument("--maxfreq", type=int, default=4, help="largest trigonometric frequency (default: 4)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kmslab", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify an operator (and its restriction to ker A)")
    p.add_argument("spec", help="operator spec JSON or presets:<partmap>,<operator>")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="relative rank tolerance (default: 1e-9)")
    p.add_argument("--seed", type=int, default=0, help="direction-sampling seed (default: 0)")
    p.add_argument("--directions", type=int, default=64, help="random directions on top of axes/diagonals (default: 64)")
    _common(p)

    p = sub.add_parser("project", help="write f - Pi_B Pi_kerA f for a KMSF field")
    p.add_argument("spec", help="operator spec JSON or presets:<partmap>,<operator>")
    p.add_argument("field", help="input KMSF file")
    p.add_argument("-o", dest="output", required=True, help="output KMSF file")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="relative rank tolerance (default: 1e-9)")
    p.add_argument("--mode", choices=("full", "restricted"), default="full",
                   help="project onto ker B[xi] (full) or ker B[xi] ∩ ker A (restricted)")
    _common(p, report_out=False)

    p = sub.add_parser("verify", help="ensemble estimate of the inequality constant")
    _ensemble_flags(p)
    p.add_argument("--count", type=int, default=200, help="ensemble size (default: 200)")
    p.add_argument("--q", type=float, default=None,
                   help="check the L^q estimate with a negative-order norm instead of the main inequality")
    p.add_argument("--kind", choices=FIELD_KINDS, default="generic", help="test-field family (default: generic)")
    p.add_argument("--assert-bound", type=float, default=None, dest="assert_bound",
                   help="exit 3 if any scenario's max ratio exceeds this value")
    _common(p)

    p = sub.add_parser("search", help="adversarial SPSA ratio ascent")
    _ensemble_flags(p)
    p.add_argument("--iters", type=int, default=500, help="iterations (default: 500)")
    p.add_argument("-o", dest="output", default=None, help="write the witness field as KMSF")
    _common(p, report_out=False)

    p = sub.add_parser("demo", help="divergence-free gradient family without/with the correction")
    p.add_argument("--grid", type=int, default=32, help="points per axis (default: 32)")
    p.add_argument("--seed", type=int, default=0, help="field seed (default: 0)")
    p.add_argument("--index", type=int, default=0, help="family member j (default: 0)")
    p.add_argument("--maxfreq", type=int, default=4, help="largest trigonometric frequency (default: 4)")
    _common(p)
    return parser


def _scenarios(args):
    catalog = load_catalog(args.catalog)
    labels = args.scenario or list(catalog)
    out = []
    for label in labels:
        if label not in catalog:
            raise InputError(f"unknown scenario {label!r}; known: {', '.join(catalog)}")
        sc = catalog[label]
        out.append(sc.with_p(args.p) if args.p is not None else sc)
    return out


def _grid(args, n: int) -> Grid:
    return Grid(n, args.grid or DEFAULT_GRID.get(n, 32))


def cmd_classify(args) -> int:
    A, op = load_spec(args.spec)
    dirs = DirectionSet.default(op.n, seed=args.seed, extra=args.directions)
    plain = classify(op, dirs, args.tol)
    report = {"spec": args.spec, "seed": args.seed, "tol": args.tol, "operator": plain.to_dict()}
    if A is not None:
        red = reduced_classify(op, A, dirs, args.tol)
        report.update({
            "part_map": A.name,
            "reduced": red.to_dict(),
            "reduced_elliptic": red.elliptic,
            "reduced_constant_rank": red.constant_rank,
            "reduced_rank": red.rank,
            "reduced_cancelling": red.cancelling,
            "restricted_symbol_zero": red.constant_rank and red.rank == 0,
        })
    write_report(report, args.format, args.output)
    return EXIT_OK


def cmd_project(args) -> int:
    A, op = load_spec(args.spec)
    if A is None:
        A = part_map_preset("zero", op.dimE)
    f = kmsf.read(args.field)
    if f.dimV != op.dimE or f.grid.n != op.n:
        raise InputError(f"field ({f.grid.n}D, {f.dimV} components) does not match "
                         f"operator ({op.n}D, {op.dimE} components)")
    out = f - kms_correction(op, A, f, args.tol, args.mode)
    kmsf.write(args.output, out)
    write_report({"input": args.field, "output": args.output, "mode": args.mode,
                  "input_l2": lp_norm(f, 2), "output_l2": lp_norm(out, 2)}, args.format, None)
    return EXIT_OK


def cmd_verify(args) -> int:
    results, exceeded = [], False
    for sc in _scenarios(args):
        grid = _grid(args, sc.n)
        cfg = EnsembleConfig(count=args.count, max_frequency=args.maxfreq, seed=args.seed, field_kind=args.kind)
        summary = estimate_constant(sc, grid, cfg, q=args.q)
        d = summary.to_dict()
        if args.assert_bound is not None:
            d["assert_bound"] = args.assert_bound
            d["within_bound"] = summary.max_ratio <= args.assert_bound
            exceeded |= not d["within_bound"]
        results.append(d)
    write_report({"verify": results}, args.format, args.output)
    return EXIT_BOUND if exceeded else EXIT_OK


def cmd_search(args) -> int:
    scenarios = _scenarios(args)
    if len(scenarios) != 1:
        raise InputError("search needs exactly one --scenario")
    sc = scenarios[0]
    res = adversarial_search(sc, _grid(args, sc.n), args.iters, args.seed, args.maxfreq)
    d = res.to_dict()
    d["scenario"] = sc.summary()
    d["grid"] = _grid(args, sc.n).summary()
    if args.output:
        kmsf.write(args.output, res.best_field)
        d["witness"] = args.output
    write_report(d, args.format, None)
    return EXIT_OK


def cmd_demo(args) -> int:
    rep = null_family_demo(Grid(3, args.grid), args.index, args.seed, args.maxfreq)
    write_report(rep, args.format, args.output)
    return EXIT_OK


COMMANDS = {"classify": cmd_classify, "project": cmd_project, "verify": cmd_verify,
            "search": cmd_search, "demo": cmd_demo}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (InputError, SpecError, SymbolError, FieldError, LabError, kmsf.KMSFError, ValueError) as exc:
        print(f"kmslab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"kmslab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
