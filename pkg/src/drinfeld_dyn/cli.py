"""Command-line front end.

Exit codes: 0 on success, 1 on domain errors (one ``error:`` line on stderr),
2 on usage and parse errors.
"""

from __future__ import annotations

import argparse
import csv
import random
import sys
from fractions import Fraction

from .drinfeld import j_invariant, parse_module, torsion_global, torsion_local, SearchConfig
from .errors import DomainError, DrinfeldError, UsageError
from .funcfield import (PolyA, RatFunc, fmt_ratfunc, parse_place, parse_poly,
                        parse_ratfunc, weighted_height)
from .localfield import LaurentSeries, embed

DEFAULT_PREC = 40
DEFAULT_BUDGET_DEG = 2
ROOT_COLUMNS = ["slope", "count", "rational", "certified"]


def fmt(x):
    if x is None:
        return "none"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else "%d/%d" % (x.numerator, x.denominator)
    if isinstance(x, RatFunc):
        return fmt_ratfunc(x)
    if isinstance(x, PolyA):
        return fmt_ratfunc(RatFunc(x))
    if isinstance(x, LaurentSeries):
        return _fmt_series(x)
    if isinstance(x, (set, frozenset)):
        return "{" + ", ".join(fmt(y) for y in sorted(x)) + "}"
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(fmt(y) for y in x) + "]"
    return str(x)


def _fmt_series(s):
    if s.is_zero():
        return "O(pi^%d)" % s.prec
    terms = []
    for k in range(s.valuation(), s.prec):
        c = s.coefficient(k)
        if c != 0:
            terms.append("(%s)*pi^%d" % (s.K.fmt(c), k))
    return " + ".join(terms + ["O(pi^%d)" % s.prec])


def emit_csv(rows, schema, out=None):
    """Header plus rows; rationals as p/q, '\\n' line endings.  ``out`` is a
    stream or a path (None means stdout)."""
    if isinstance(out, str):
        with open(out, "w", newline="", encoding="utf-8") as fh:
            return emit_csv(rows, schema, fh)
    out = sys.stdout if out is None else out
    w = csv.writer(out, lineterminator="\n")
    w.writerow(schema)
    for row in rows:
        row = list(row)
        if len(row) != len(schema):
            raise ValueError("row has %d fields, schema has %d" % (len(row), len(schema)))
        w.writerow(["" if x == "" else fmt(x) for x in row])
    return out


def _kv(name, value, out):
    out.write("%s: %s\n" % (name, fmt(value)))


# ----------------------------------------------------------------------
# input helpers
# ----------------------------------------------------------------------

def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as ex:
        raise UsageError("cannot read %s: %s" % (path, ex.strerror)) from None


def _module(args):
    return parse_module(_read(args.module))


def _poly(text, F):
    return parse_poly(text, F)


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------

def cmd_jinv(args, out):
    phi = _module(args)
    J = j_invariant(phi)
    _kv("weights", list(J.weights), out)
    _kv("coords", [fmt_ratfunc(c) for c in J.coords], out)
    _kv("height", weighted_height(J), out)


def cmd_local(args, out):
    from .localdyn import component_module, component_size_bound, local_report
    phi = _module(args)
    v = parse_place(args.place, phi.F)
    rep = local_report(phi, v)
    for name in ("place", "c_v", "j_v", "stable_rank", "s", "phi0_log_radius",
                 "B_T_log", "vj"):
        _kv(name, getattr(rep, name), out)
    if args.component and not v.is_infinite:
        M = component_module(phi, v, prec=args.prec if args.prec_given else None)
        _kv("component_size", M.size, out)
        _kv("invariant_factors", [fmt_ratfunc(RatFunc(f)) for f in M.invariant_factors], out)
        _kv("component_bound", component_size_bound(rep), out)


def cmd_julia(args, out):
    from .localdyn import height_decompose, julia_contains, local_height
    phi = _module(args)
    v = parse_place(args.place, phi.F)
    x = parse_ratfunc(args.x, phi.F)
    inside = julia_contains(phi, v, x)
    _kv("in_filled_julia", inside, out)
    _kv("local_height", local_height(phi, v, x, check=False), out)
    if args.decompose and inside:
        d = height_decompose(phi, v, x)
        _kv("lambda", d.lambda_, out)
        _kv("B_part", d.B_part, out)
        _kv("E_part", d.E_part, out)
        _kv("coset_trivial", d.coset_trivial, out)


def cmd_torsion(args, out):
    phi = _module(args)
    a = _poly(args.a, phi.F)
    if args.place is not None:
        v = parse_place(args.place, phi.F)
        rep = torsion_local(phi, a, v, prec=args.prec)
        emit_csv(rep.rows(), ROOT_COLUMNS, out)
        return
    tm = torsion_global(phi, a, SearchConfig(method=args.method))
    _kv("a", a, out)
    _kv("count", len(tm.points), out)
    _kv("module_structure", [fmt_ratfunc(RatFunc(f)) for f in tm.module_structure], out)
    _kv("complete", tm.complete, out)
    for p in sorted(tm.points, key=fmt_ratfunc):
        out.write("point: %s\n" % fmt_ratfunc(p))


def cmd_mu(args, out):
    from .globalmu import adelic_check, mu
    phi = _module(args)
    a = _poly(args.ideal, phi.F)
    res = mu(phi, args.N, a)
    _kv("mu", res.mu, out)
    _kv("S_bad", res.S_bad, out)
    _kv("S_a", res.S_a, out)
    _kv("witness_S", res.witness_S, out)
    for v in sorted(res.per_place_j):
        out.write("j[%s]: %s\n" % (fmt(v), fmt(res.per_place_j[v])))
    if args.N == 0:
        ok, _ = adelic_check(phi, a)
        _kv("adelic_check", ok, out)


def cmd_tate(args, out):
    from .tate import Lattice, division_points, uniformize
    psi = _module(args)
    F = psi.F
    v = parse_place(args.place, F)
    prec = args.prec
    gens = [embed(parse_ratfunc(w, F), v, prec) for w in args.omega]
    try:
        lat = Lattice(psi, v, gens, deg_budget=args.budget_deg)
        U = uniformize(psi, lat, n=args.n, prec=prec)
    except ValueError as ex:
        raise DomainError(str(ex)) from None
    _kv("rank", lat.rank + psi.rank, out)
    _kv("prec", U.prec, out)
    for i in range(1, U.phi.rank + 1):
        out.write("a%d: %s\n" % (i, _fmt_series(U.phi.a(i))))
    _kv("residual_valuations", U.residual_valuations, out)
    if args.a is not None:
        a = _poly(args.a, F)
        classes = division_points(psi, lat, a, prec=prec)
        _kv("division_classes", len(classes), out)
        _kv("rational_classes", sum(1 for c in classes if c.rational), out)


def cmd_family(args, out):
    from .globalmu import FAMILY_COLUMNS, family_scan, parse_family
    spec = parse_family(_read(args.family))
    a = _poly(args.ideal, spec.F) if args.ideal else None
    scan = family_scan(spec, args.H, N=args.N, a_gen=a, max_torsion_deg=args.budget_deg)
    rows = [r.as_list() for r in scan.rows] + [scan.summary()]
    if args.out:
        emit_csv(rows, FAMILY_COLUMNS, args.out)
    else:
        emit_csv(rows, FAMILY_COLUMNS, out)


def cmd_elliptic(args, out):
    from .elliptic import ingest_csv, mu_elliptic, szpiro_ratio, theorem_check
    from .errors import NotSemistable, NTooSmall, TrivialConductor
    recs = sorted(ingest_csv(args.csv), key=lambda r: r.label)
    rows = []
    for rec in recs:
        try:
            sigma = szpiro_ratio(rec)
        except TrivialConductor:
            rows.append([rec.label, "none", fmt(mu_elliptic(rec, args.N, args.n)), "trivial_conductor"])
            continue
        m = mu_elliptic(rec, args.N, args.n)
        try:
            ok, _, rhs = theorem_check(rec, args.n)
            check = "pass" if ok else "FAIL"
        except NotSemistable:
            check = "not_semistable"
        except NTooSmall:
            check = "n_too_small"
        rows.append([rec.label, fmt(sigma), fmt(m), check])
    emit_csv(rows, ["label", "sigma", "mu", "check"], out)


def cmd_selftest(args, out):
    from .acceptance import run_all
    results = run_all(seed=args.seed, quick=args.quick, budget_deg=args.budget_deg)
    for r in results:
        out.write("%s %s: %s\n" % ("PASS" if r.ok else "FAIL", r.name, r.detail))
    npass = sum(1 for r in results if r.ok)
    out.write("summary: %d/%d passed\n" % (npass, len(results)))
    if npass != len(results):
        raise _SelftestFailed()


class _SelftestFailed(Exception):
    pass


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------

def _global_flags(p, suppress):
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--prec", type=int, default=d if suppress else DEFAULT_PREC,
                   help="working precision in uniformizer digits")
    p.add_argument("--budget-deg", type=int, default=d if suppress else DEFAULT_BUDGET_DEG,
                   help="degree budget for enumerations")
    p.add_argument("--seed", type=int, default=d if suppress else 0,
                   help="seed for randomized corpora")


def build_parser():
    ap = argparse.ArgumentParser(prog="drinfeld-dyn", allow_abbrev=False)
    _global_flags(ap, False)
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    _global_flags(common, True)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_, allow_abbrev=False)
        p.set_defaults(func=fn)
        return p

    p = add("jinv", cmd_jinv, "j-invariant and its height")
    p.add_argument("--module", required=True)
    p = add("local", cmd_local, "local report at a place")
    p.add_argument("--module", required=True)
    p.add_argument("--place", required=True)
    p.add_argument("--component", action="store_true", help="also compute the component module")
    p = add("julia", cmd_julia, "filled Julia set membership and local height")
    p.add_argument("--module", required=True)
    p.add_argument("--place", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--decompose", action="store_true")
    p = add("torsion", cmd_torsion, "a-torsion over L, or the local root report at --place")
    p.add_argument("--module", required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--place")
    p.add_argument("--method", choices=["linear", "reconstruct"], default="linear")
    p = add("mu", cmd_mu, "the mu statistic")
    p.add_argument("--module", required=True)
    p.add_argument("--N", type=int, default=0)
    p.add_argument("--ideal", default="T")
    p = add("tate", cmd_tate, "Tate uniformization of psi by a lattice")
    p.add_argument("--module", required=True)
    p.add_argument("--place", required=True)
    p.add_argument("--omega", action="append", default=[], help="lattice generator (repeatable)")
    p.add_argument("--n", type=int, help="tau-degree truncation")
    p.add_argument("--a", help="also count division classes for this a")
    p = add("family", cmd_family, "scan a one-parameter family")
    p.add_argument("--family", required=True)
    p.add_argument("--H", type=int, required=True)
    p.add_argument("--N", type=int, default=0)
    p.add_argument("--ideal")
    p.add_argument("--out")
    p = add("elliptic", cmd_elliptic, "Szpiro ratio and mu for elliptic curve records")
    p.add_argument("--csv", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--N", type=int, default=0)
    p = add("selftest", cmd_selftest, "run the acceptance corpus")
    p.add_argument("--quick", action="store_true", help="smaller corpora, skip the family scan")
    return ap


def run(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as ex:
        return int(ex.code or 0)
    args.prec_given = "--prec" in (argv if argv is not None else sys.argv[1:])
    for name in ("prec", "budget_deg"):
        if getattr(args, name) < 0:
            err.write("error: usage: --%s must be non-negative\n" % name.replace("_", "-"))
            return 2
    random.seed(args.seed)
    try:
        args.func(args, out)
    except _SelftestFailed:
        return 1
    except UsageError as ex:
        err.write("error: %s: %s\n" % (ex.code, ex))
        return 2
    except DrinfeldError as ex:
        err.write("error: %s: %s\n" % (ex.code, ex))
        return 1
    except (ValueError, ZeroDivisionError) as ex:
        err.write("error: domain: %s\n" % ex)
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
