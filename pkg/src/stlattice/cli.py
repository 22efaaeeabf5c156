"""Command-line interface: construct, count, analyze, energy, totient, sweep.

Exit status is 0 on success, 1 on validation errors and 2 when a resource cap
is hit; failures print a JSON object on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import energy as en
from . import numtheory as nt
from .construct import construct_elekes, construct_erdos, construct_general_alpha, construct_random
from .errors import InvalidArgument, ResourceLimit
from .exactnum import format_number, parse_number, sqrt
from .geom import (AnalyzerConfig, GridSpec, Line, count_histogram,
                   per_line_counts, points_to_product, read_lines, read_points, write_lines,
                   write_points)
from .structure import SlopeWindow, analyze_configuration, verify_lattice_structure
from .sweep import KINDS, TARGETS, SweepSpec, emit_report, run_sweep


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidArgument(message)


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidArgument(f"not a rational number: {text!r}") from exc


def parse_shift(text: str):
    """'p/q' or 'sqrt:D:p/q:r/s' meaning p/q + (r/s) sqrt(D)."""
    if text.startswith("sqrt:"):
        parts = text.split(":")
        if len(parts) != 4:
            raise InvalidArgument(f"bad shift {text!r}; expected sqrt:D:p/q:r/s")
        d, a, b = parts[1:]
        return _frac(a) + _frac(b) * sqrt(int(d))
    return parse_number(text)


def _write(path: str | None, data: bytes):
    if path is None or path == "-":
        sys.stdout.write(data.decode())
    else:
        Path(path).write_bytes(data)


def _dump(obj) -> bytes:
    return emit_report(obj, "json")


# -- subcommands ------------------------------------------------------------------

def cmd_construct(args) -> int:
    win = SlopeWindow(args.kt, args.ks)
    if args.kind == "elekes":
        P, L, man = construct_elekes(args.w)
    elif args.kind == "erdos":
        P, L, man = construct_erdos(args.w, args.lines, win, args.k, args.complete)
    elif args.kind == "general":
        if args.h is None:
            raise InvalidArgument("--h is required for --kind general")
        P, L, man = construct_general_alpha(GridSpec(args.w, args.h), win, args.k, args.lines,
                                            args.complete)
    else:  # random baseline
        g = GridSpec(args.w, args.h or args.w)
        P, L, man = construct_random(g, args.lines or g.N, args.seed)
    write_points(args.out_points, P)
    write_lines(args.out_lines, L)
    if args.manifest:
        Path(args.manifest).write_text(man.to_json() + "\n")
    return 0


def _load(args):
    P = points_to_product(read_points(args.points))
    return P, read_lines(args.lines)


def cmd_count(args) -> int:
    P, L = _load(args)
    if args.oracle:
        if len(P) * len(L) > args.oracle_cap:
            raise ResourceLimit(f"|P|*|L| = {len(P) * len(L)} exceeds oracle cap {args.oracle_cap}")
        pts = P.points()
        counts = [sum(1 for (x, y) in pts if ln.contains(x, y)) for ln in L]
    else:
        counts = per_line_counts(P, L)
    _write(args.out, _dump({"incidences": int(sum(counts)),
                            "per_line_histogram": {str(k): v for k, v in count_histogram(counts).items()}}))
    return 0


def cmd_analyze(args) -> int:
    P, L = _load(args)
    cfg = AnalyzerConfig(k=args.k, oracle_cap=args.oracle_cap)
    g = P.as_grid()
    if g is not None:
        rep = verify_lattice_structure(g, L, cfg, SlopeWindow(args.kt, args.ks))
        body, fams = rep.to_dict(), rep.families
    else:
        body = analyze_configuration(P, L, cfg)
        fams = body.pop("families")
    if args.csv:
        buf = io.StringIO()
        cols = sorted({key for f in fams for key in f})
        wr = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        wr.writeheader()
        for f in fams:
            wr.writerow(f)
        _write(args.out, buf.getvalue().encode())
    else:
        _write(args.out, _dump(body))
    return 0


def cmd_energy(args) -> int:
    with open(args.set) as fh:
        A = [parse_number(line) for line in fh if line.strip() and not line.startswith("#")]
    shift = parse_shift(args.shift) if args.shift else None
    if shift is not None and args.interval is None:
        raise InvalidArgument("--shift needs --interval")
    if args.oracle and len(set(A)) > en.ORACLE_CAP:
        raise ResourceLimit(f"--oracle capped at |A| <= {en.ORACLE_CAP}")
    rep = en.energy_report(A, args.interval, shift, args.oracle)
    body = rep.to_dict()
    if shift is not None:
        body["shift"] = format_number(shift)
    _write(args.out, _dump(body))
    return 0


def totient_records(limit: int, check: str) -> list[dict]:
    """One record per checkpoint n = 16, 32, ... <= limit (plus limit itself)."""
    ns, n = [], 16
    while n < limit:
        ns.append(n)
        n *= 2
    ns.append(limit)
    table = nt.totient_table(limit)
    out = []
    for n in ns:
        if check == "a":
            lhs, rhs = int(table.phi[1:n + 1].sum()), n * n
        elif check == "b":
            lhs, rhs = nt.totient_over_j_sum(n), n
        elif check == "c":
            m = 10
            lhs, rhs = nt.phi_m(m * n, n), m * int(table.phi[n])
        elif check == "d":
            ph = int(table.phi[n])
            lhs = max(abs(nt.phi_m(m, n) - Fraction(m * ph, n)) for m in range(1, n + 1))
            rhs = 2 ** int(table.omega[n])
        elif check == "e":
            lhs = int((1 << table.omega[1:n + 1].astype("int64")).sum())
            rhs = n * math.log(math.log(n)) if n > 2 else 1.0
        else:
            raise InvalidArgument(f"unknown check {check!r}")
        out.append({"lemma": check, "n": n, "lhs": float(lhs) if isinstance(lhs, Fraction) else lhs,
                    "rhs": rhs, "ratio": float(lhs) / float(rhs)})
    return out


def cmd_totient(args) -> int:
    if args.limit < 1:
        raise InvalidArgument("--limit must be >= 1")
    lines = [json.dumps(r, sort_keys=True) for r in totient_records(args.limit, args.check)]
    _write(args.out, ("\n".join(lines) + "\n").encode())
    return 0


def cmd_sweep(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    spec = SweepSpec(args.kind, args.alpha, sizes, args.target, SlopeWindow(args.kt, args.ks), args.k)
    fit, rows = run_sweep(spec, args.threads)
    _write(args.out_json, _dump({"fit": fit, "spec": {"kind": spec.kind, "alpha": spec.alpha,
                                                       "sizes": sizes, "fit_target": spec.fit_target},
                                 "points": rows}))
    if args.out_csv:
        _write(args.out_csv, emit_report(fit, "csv"))
    if args.out_svg:
        _write(args.out_svg, emit_report(fit, "svg-loglog"))
    return 0


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stlattice", description=__doc__.splitlines()[0])
    # global flags are accepted before or after the subcommand
    common = _Parser(add_help=False)
    for parser, default in ((p, None), (common, argparse.SUPPRESS)):
        parser.add_argument("--threads", type=int, default=1 if default is None else default)
        parser.add_argument("--seed", type=int, default=0 if default is None else default)
        parser.add_argument("--oracle-cap", type=int,
                            default=50_000_000 if default is None else default)
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    c = sub.add_parser("construct", help="generate a configuration", parents=[common])
    c.add_argument("--kind", choices=("erdos", "elekes", "general", "random"), required=True)
    c.add_argument("--w", type=int, required=True, help="columns (r for elekes, m for erdos)")
    c.add_argument("--h", type=int)
    c.add_argument("--kt", type=_frac, default=Fraction(2))
    c.add_argument("--ks", type=_frac, default=Fraction(2))
    c.add_argument("--k", type=_frac, default=Fraction(4))
    c.add_argument("--lines", type=int)
    c.add_argument("--complete", action="store_true",
                   help="keep every line through the leftmost columns / bottom rows")
    c.add_argument("--out-points", required=True)
    c.add_argument("--out-lines", required=True)
    c.add_argument("--manifest")
    c.set_defaults(func=cmd_construct)

    c = sub.add_parser("count", help="count incidences", parents=[common])
    c.add_argument("--points", required=True)
    c.add_argument("--lines", required=True)
    c.add_argument("--oracle", action="store_true")
    c.add_argument("--out")
    c.set_defaults(func=cmd_count)

    c = sub.add_parser("analyze", help="structure report", parents=[common])
    c.add_argument("--points", required=True)
    c.add_argument("--lines", required=True)
    c.add_argument("--k", type=_frac, default=Fraction(4))
    c.add_argument("--kt", type=_frac, default=Fraction(2))
    c.add_argument("--ks", type=_frac, default=Fraction(2))
    fmt = c.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", default=True)
    fmt.add_argument("--csv", action="store_true")
    c.add_argument("--out")
    c.set_defaults(func=cmd_analyze)

    c = sub.add_parser("energy", help="energies of a set", parents=[common])
    c.add_argument("--set", required=True)
    c.add_argument("--interval", type=int)
    c.add_argument("--shift")
    c.add_argument("--oracle", action="store_true")
    c.add_argument("--out")
    c.set_defaults(func=cmd_energy)

    c = sub.add_parser("totient", help="totient lemma checkpoints", parents=[common])
    c.add_argument("--limit", type=int, required=True)
    c.add_argument("--check", choices=tuple("abcde"), required=True)
    c.add_argument("--out")
    c.set_defaults(func=cmd_totient)

    c = sub.add_parser("sweep", help="sweep sizes and fit an exponent", parents=[common])
    c.add_argument("--kind", choices=KINDS, default="general")
    c.add_argument("--alpha", type=float, default=0.4)
    c.add_argument("--sizes", default=f"{2 ** 12},{2 ** 15},{2 ** 18}")
    c.add_argument("--target", choices=TARGETS, default="incidence")
    c.add_argument("--kt", type=_frac, default=Fraction(2))
    c.add_argument("--ks", type=_frac, default=Fraction(2))
    c.add_argument("--k", type=_frac, default=Fraction(4))
    c.add_argument("--out-json")
    c.add_argument("--out-csv")
    c.add_argument("--out-svg")
    c.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except ResourceLimit as exc:
        sys.stderr.write(json.dumps({"error": "resource-limit", "message": str(exc)}) + "\n")
        return 2
    except (InvalidArgument, OSError, ZeroDivisionError) as exc:
        sys.stderr.write(json.dumps({"error": "invalid-argument", "message": str(exc)}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
