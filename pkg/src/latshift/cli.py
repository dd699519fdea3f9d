"""Command line front end: ``latshift <subcommand> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import cbc, io, oracle, quadrature, wce
from .kernel import HalfShift, LatticeRule
from .weights import parse_weight_spec

log = logging.getLogger("latshift")


def _write(out: str | None, data: bytes | str) -> None:
    if isinstance(data, str):
        data = data.encode("utf-8")
    if out is None or out == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        Path(out).write_bytes(data)


def _indices(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None


def _jobs(args) -> int:
    return args.jobs if args.jobs is not None else cbc.default_jobs()


def cmd_cbc_z(args) -> int:
    w = parse_weight_spec(args.weights, args.smax)
    res = cbc.cbc_vector(args.n, args.smax, w, "all" if args.all_candidates else "coprime")
    _write(args.out, io.write_vector_file(None, res.z))
    if args.out not in (None, "-"):
        print(f"wrote {len(res.z)} components to {args.out}; e_sh^2(s={args.smax}) = {res.esh2[-1]:.10e}")
    return 0


def cmd_cbc_shift(args) -> int:
    w = parse_weight_spec(args.weights, args.smax)
    z = io.load_vector_file(args.z_file, args.n, args.smax)
    res = cbc.cbc_shift(args.n, z, args.smax, w, summation=args.summation, jobs=_jobs(args))
    table = io.shift_table_from_result(res, z_file=args.z_file, weights_spec=args.weights)
    _write(args.out, io.emit_shift_table(table, args.format))
    if args.shift_out:
        Path(args.shift_out).write_text(io.format_shift_file(res.shift))
    return 0


def _resolve_shift(args, n: int, s: int):
    if args.shift_file:
        shift = io.parse_shift_file(args.shift_file, n)
        size = shift.s if isinstance(shift, HalfShift) else len(shift)
        if size < s:
            raise ValueError(f"shift file has {size} components, need {s}")
        if isinstance(shift, HalfShift):
            return HalfShift(n, shift.m[:s])
        return shift[:s]
    if args.half_shift_indices:
        if len(args.half_shift_indices) < s:
            raise ValueError(f"{len(args.half_shift_indices)} half-shift indices given, need {s}")
        return HalfShift(n, args.half_shift_indices[:s])
    if getattr(args, "zero_shift", False):
        return np.zeros(s)
    return None


def cmd_wce(args) -> int:
    z = io.load_vector_file(args.z_file, args.n, args.smax)
    rule = LatticeRule(args.n, z)
    w = parse_weight_spec(args.weights, rule.s)
    shift = _resolve_shift(args, args.n, rule.s)
    esh2 = wce.shift_avg_sq_wce(rule, w, args.summation)
    print(f"n = {rule.n}  s = {rule.s}  weights = {args.weights}")
    print(f"e_sh^2      = {esh2:.12e}")
    print(f"e_halfsh^2  = {wce.half_shift_avg_sq_wce(rule, w):.12e}")
    if shift is not None:
        rep = wce.error_report(rule, shift, w, args.summation)
        if args.per_dim:
            print("s\te2\tesh2\tkappa\tkappa0")
            for r in rep:
                print(f"{r.s}\t{r.e2:.12e}\t{r.esh2:.12e}\t{r.kappa:.6f}\t{r.kappa0:.6f}")
        print(f"e^2         = {rep.last.e2:.12e}")
        print(f"kappa       = {rep.last.kappa:.6f}")
        print(f"kappa0      = {rep.last.kappa0:.6f}")
    return 0


def cmd_bound(args) -> int:
    w = parse_weight_spec(args.weights, args.smax)
    if args.theorem1:
        print(f"{wce.theorem1_bound(args.n, w, args.smax):.12e}")
    else:
        if args.lam is None:
            raise ValueError("--lambda is required unless --theorem1 is given")
        print(f"{wce.theoretical_bound(args.n, w, args.smax, args.lam):.6f}")
    return 0


def cmd_verify(args) -> int:
    rep = oracle.verify_suite(args.max_n, args.max_s)
    print(f"{rep.checks} checks, {len(rep.failures)} failures")
    for f in rep.failures[:20]:
        print(f"FAIL {f}")
    return 0 if rep.ok else 1


def cmd_integrate(args) -> int:
    z = io.load_vector_file(args.z_file, args.n, args.smax)
    rule = LatticeRule(args.n, z)
    f = quadrature.make_integrand(args.f, rule.s, args.params or ())
    if args.random:
        est = quadrature.random_shift_estimate(rule, f, args.q, args.seed)
        print(f"mean   = {est.mean:.15g}")
        print(f"stderr = {est.stderr:.6e}  (q={est.q}, seed={est.seed})")
        value = est.mean
    else:
        shift = _resolve_shift(args, args.n, rule.s)
        if shift is None:
            w = parse_weight_spec(args.weights, rule.s)
            res = cbc.cbc_shift(args.n, z, rule.s, w, summation=args.summation, jobs=_jobs(args))
            shift = res.shift
            print(f"constructed shift m = {list(shift.m)}")
        value = quadrature.apply_rule(rule, shift, f)
        print(f"Q      = {value:.15g}")
    if f.exact is not None:
        print(f"exact  = {f.exact:.15g}")
        print(f"error  = {value - f.exact:.6e}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="latshift", description="Shifted rank-1 lattice rules.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, weights_required=True):
        sp.add_argument("--n", type=int, required=True, help="number of lattice points")
        sp.add_argument("--weights", required=weights_required, default=None,
                        help="prod:1/j^2 | prod:geo:<a> | prod:file:<path> | explicit:[...]")

    def numerics(sp):
        sp.add_argument("--summation", choices=("stable", "plain"), default="stable")
        sp.add_argument("--jobs", type=int, default=None,
                        help="worker threads for the shift search (default $LATSHIFT_JOBS or 1)")

    sp = sub.add_parser("cbc-z", help="construct a generating vector")
    common(sp)
    sp.add_argument("--smax", type=int, required=True)
    sp.add_argument("--all-candidates", action="store_true",
                    help="search all of 1..n-1 instead of values coprime to n")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_cbc_z)

    sp = sub.add_parser("cbc-shift", help="construct a half-shift for a given vector")
    common(sp)
    numerics(sp)
    sp.add_argument("--smax", type=int, required=True)
    sp.add_argument("--z-file", required=True)
    sp.add_argument("--format", choices=io.FORMATS, default="csv")
    sp.add_argument("--out", default=None)
    sp.add_argument("--shift-out", default=None, help="also write the shift as 's m delta' lines")
    sp.set_defaults(func=cmd_cbc_shift)

    sp = sub.add_parser("wce", help="evaluate worst-case errors")
    common(sp)
    sp.add_argument("--summation", choices=("stable", "plain"), default="stable")
    sp.add_argument("--z-file", required=True)
    sp.add_argument("--smax", type=int, default=None)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--shift-file")
    g.add_argument("--zero-shift", action="store_true")
    g.add_argument("--half-shift-indices", type=_indices)
    sp.add_argument("--per-dim", action="store_true")
    sp.set_defaults(func=cmd_wce)

    sp = sub.add_parser("bound", help="theoretical error bounds")
    common(sp)
    sp.add_argument("--smax", type=int, required=True)
    sp.add_argument("--lambda", dest="lam", type=float, default=None)
    sp.add_argument("--theorem1", action="store_true",
                    help="bound on the gap between full and half-shift averages")
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("verify", help="exhaustive checks of the averaging bound and oracles")
    sp.add_argument("--max-n", type=int, default=12)
    sp.add_argument("--max-s", type=int, default=3)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("integrate", help="apply a rule to a built-in integrand")
    common(sp, weights_required=False)
    numerics(sp)
    sp.add_argument("--z-file", required=True)
    sp.add_argument("--smax", type=int, default=None)
    sp.add_argument("--f", required=True, choices=sorted(quadrature.INTEGRANDS))
    sp.add_argument("--params", type=float, nargs="*")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--shift-file")
    g.add_argument("--zero-shift", action="store_true")
    g.add_argument("--half-shift-indices", type=_indices)
    g.add_argument("--random", action="store_true")
    sp.add_argument("--q", type=int, default=16)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_integrate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "integrate" and not (args.random or args.shift_file or args.zero_shift
                                            or args.half_shift_indices) and not args.weights:
        parser.error("integrate: --weights is needed to construct a shift when none is given")
    try:
        return args.func(args)
    except (ValueError, OSError, MemoryError) as exc:
        print(f"latshift: error: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"latshift: numerical error: {exc}", file=sys.stderr)
        return 1
