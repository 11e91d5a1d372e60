"""The acceptance corpus, runnable from the CLI (``selftest``) and from pytest.

Each check returns a Result; ``run_all`` runs them in order.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from math import floor

from .drinfeld import DrinfeldModule, j_invariant, torsion_global
from .funcfield import (GF, PolyA, RatFunc, height, monic_polys, parse_place,
                        product_formula_check, relevant_places, weighted_height)
from .localfield import LaurentSeries, local_roots

FAMILY_TEXT = "q = 5\ncoeffs = [1, beta^3 - beta]\nparam = beta\n"


@dataclass
class Result:
    name: str
    ok: bool
    detail: str
    seconds: float


def _timed(name, limit, fn):
    t0 = time.perf_counter()
    ok, detail = fn()
    dt = time.perf_counter() - t0
    if limit is not None and dt >= limit:
        ok = False
        detail += "; took %.1fs, limit %ss" % (dt, limit)
    return Result(name, ok, "%s (%.2fs)" % (detail, dt), dt)


# ----------------------------------------------------------------------
# corpora
# ----------------------------------------------------------------------

def _rand_poly(rng, F, d, monic=False):
    c = [rng.randrange(F.size) for _ in range(d)]
    c.append(1 if monic else rng.randrange(1, F.size))
    return PolyA(F, c)


def _rand_coeff(rng, F, maxdeg=4):
    if rng.random() < 0.2:
        return RatFunc(PolyA(F, []))
    num = _rand_poly(rng, F, rng.randint(0, maxdeg))
    if rng.random() < 0.3:
        return RatFunc(num, _rand_poly(rng, F, rng.randint(1, maxdeg), monic=True))
    return RatFunc(num)


def random_modules(seed=0, count=200, qs=(2, 3, 4, 5), max_rank=3, maxdeg=4):
    """Random modules with q <= 5, rank <= 3 and coefficient degrees <= maxdeg."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        q = rng.choice(qs)
        F = GF(q)
        r = rng.randint(1, max_rank)
        cs = [_rand_coeff(rng, F, maxdeg) for _ in range(r)]
        if cs[-1].is_zero():
            continue
        out.append(DrinfeldModule(q, cs))
    return out


def torsion_modules(seed=0, count=12):
    """Modules with a designed rational T-torsion point x0."""
    rng = random.Random(seed + 1)
    out = []
    while len(out) < count:
        q = rng.choice((2, 3))
        F = GF(q)
        t = RatFunc.t(F)
        x0 = _rand_coeff(rng, F, 2)
        if x0.is_zero():
            continue
        r = rng.randint(1, 2)
        if r == 1:
            cs = [-(t * x0) / x0 ** q]
        else:
            a2 = _rand_coeff(rng, F, 2)
            if a2.is_zero():
                continue
            cs = [-(t * x0 + a2 * x0 ** (q * q)) / x0 ** q, a2]
        if cs[-1].is_zero():
            continue
        out.append(DrinfeldModule(q, cs))
    return out


# (q, place, leading coefficients of omega at valuation -len)
TATE_INSTANCES = [
    (2, "t", (1, 0)), (2, "t", (1, 1)), (2, "t", (1, 0, 0, 0)), (2, "t", (1, 0, 0, 1)),
    (2, "t+1", (1, 0)), (2, "t+1", (1, 0, 0, 0)),
    (3, "t-1", (1, 0, 0)), (3, "t-1", (1, 0, 1)), (3, "t-1", (2, 0, 2)),
    (3, "t", (1, 0, 0)), (3, "t", (1, 0, 2)),
    (2, "t^2+t+1", (1, 2)), (2, "t^2+t+1", (2, 2)),
    (2, "t", (1, 1, 1)), (3, "t", (1, 2)), (3, "t-1", (2, 1, 0, 1)), (4, "t", (1, 2)),
]


def tate_instances(prec=40):
    from .tate import Lattice, uniformize
    out = []
    for q, pl, cs in TATE_INSTANCES:
        psi = DrinfeldModule.carlitz(q)
        v = parse_place(pl, psi.F)
        w = LaurentSeries(v, -len(cs), list(cs), prec)
        lat = Lattice(psi, v, [w])
        out.append((psi, v, lat, uniformize(psi, lat, n=4, prec=prec)))
    return out


def _polys_deg_le(F, d):
    out = []
    for k in range(d + 1):
        for c in itertools.product(range(F.size), repeat=k + 1):
            if c[-1]:
                out.append(PolyA(F, list(c)))
    return out


# ----------------------------------------------------------------------
# criteria
# ----------------------------------------------------------------------

def check_carlitz_infinity():
    from .localdyn import j_of_subring_generator, local_report
    bad = []
    for q in (2, 3, 4, 5):
        phi = DrinfeldModule.carlitz(q)
        F = phi.F
        inf = parse_place("inf", F)
        jT = local_report(phi, inf).j_v
        jT2 = j_of_subring_generator(phi, PolyA(F, [0, 0, 1]), inf)
        if jT != 0 or jT2 != Fraction(q, q - 1):
            bad.append((q, jT, jT2))
    return not bad, "q=2..5 j_T=0, j_T2=q/(q-1)" if not bad else "mismatch %s" % bad


def check_height_identity(seed=0, count=200):
    from .localdyn import local_report
    bad = 0
    for phi in random_modules(seed, count):
        total = sum((local_report(phi, v).j_v for v in relevant_places(list(phi.coeffs))),
                    Fraction(0))
        if total != weighted_height(j_invariant(phi)):
            bad += 1
    return bad == 0, "%d modules, %d mismatches" % (count, bad)


def check_product_formula(maxdeg=3):
    n = bad = 0
    for q in (2, 3):
        F = GF(q)
        dens = [d for k in range(maxdeg + 1) for d in monic_polys(F, k)]
        nums = _polys_deg_le(F, maxdeg)
        for d in dens:
            for nm in nums:
                if nm.gcd(d).deg > 0:
                    continue
                x = RatFunc(nm, d)
                n += 1
                if product_formula_check(x) != 0 or height(x) != max(nm.deg, d.deg):
                    bad += 1
    return bad == 0, "%d reduced fractions, %d failures" % (n, bad)


def check_component_vs_tate(max_a_deg=2, good_count=50, seed=0):
    from .localdyn import component_module, local_report
    from .tate import division_points
    comparisons = bad = nontrivial = 0
    for psi, v, lat, U in tate_instances():
        M = component_module(U.phi, v)
        nontrivial += M.size > 1
        for a in _polys_deg_le(psi.F, max_a_deg):
            comparisons += 1
            rational = sum(1 for c in division_points(psi, lat, a) if c.rational)
            if rational != M.torsion_count(a):
                bad += 1
    good_bad = 0
    rng = random.Random(seed + 2)
    for phi in random_modules(seed + 3, good_count):
        v = _good_place(phi, rng)
        if component_module(phi, v).size != 1 or local_report(phi, v).s != 0:
            good_bad += 1
    ok = bad == 0 and good_bad == 0 and nontrivial > 0
    return ok, ("%d instances (%d nontrivial), %d comparisons, %d mismatches; "
                "%d good-reduction modules, %d nontrivial" % (
                    len(TATE_INSTANCES), nontrivial, comparisons, bad, good_count, good_bad))


def _good_place(phi, rng):
    """A finite place of degree <= 4 away from every coefficient's support."""
    from .funcfield import Place
    F = phi.F
    support = set()
    for c in phi.coeffs:
        if not c.is_zero():
            support |= set(c.support())
    cands = [Place.finite(p) for d in (1, 2, 3, 4) for p in monic_polys(F, d)
             if p.is_irreducible()]
    cands = [v for v in cands if v not in support]
    return rng.choice(cands)


def check_size_bound():
    from .localdyn import component_module, component_size_bound, local_report
    bad = []
    for psi, v, lat, U in tate_instances():
        M = component_module(U.phi, v)
        b = component_size_bound(local_report(U.phi, v))
        if M.size > b:
            bad.append((psi.q, v, M.size, b))
    return not bad, "%d instances, violations %s" % (len(TATE_INSTANCES), bad or "none")


def _rank2_lattices(prec=30):
    from .tate import Lattice
    out = []
    for q, pl, w1, w2 in [(2, "t", (1, 0), (1, 0, 1)), (2, "t+1", (1, 1), (1, 0, 0)),
                          (3, "t", (1, 0), (1, 1, 1))]:
        psi = DrinfeldModule.carlitz(q)
        v = parse_place(pl, psi.F)
        gens = [LaurentSeries(v, -len(w), list(w), prec) for w in (w1, w2)]
        out.append(Lattice(psi, v, gens))
    return out


def check_rigid():
    from .tate import lattice_reduce, rigid_holds
    lats = [lat for _, _, lat, _ in tate_instances()] + _rank2_lattices()
    bad = 0
    for lat in lats:
        if not rigid_holds(lattice_reduce(lat), 2):
            bad += 1
    return bad == 0, "%d reduced lattices, %d failures" % (len(lats), bad)


def refine_instances(seed=0):
    """(phi, X, v): X the rational T- or T^2-torsion, v among the first places
    where the coefficients are not units."""
    out = []
    for phi in torsion_modules(seed):
        F = phi.F
        T = PolyA(F, [0, 1])
        places = [v for v in relevant_places(list(phi.coeffs))]
        for a in (T, T * T):
            X = torsion_global(phi, a).points
            if len(X) <= 1:
                continue
            for v in places[:3]:
                out.append((phi, set(X), v))
    return out


def check_refine(seed=0, minimum=20):
    from .localdyn import generic_lambda_bound, local_height, refine_generic_subgroup
    insts = refine_instances(seed)
    bad = []
    for phi, X, v in insts:
        q, r = phi.q, phi.rank
        Y = refine_generic_subgroup(phi, X, v)
        lb = generic_lambda_bound(phi, v)
        size_ok = len(Y) * q ** (4 * r * r) >= len(X) and Y <= X
        lam_ok = all(local_height(phi, v, y) >= lb for y in Y if not y.is_zero())
        if not (size_ok and lam_ok):
            bad.append((phi.coeffs, v, len(X), len(Y)))
    ok = not bad and len(insts) >= minimum
    return ok, "%d instances, %d failures" % (len(insts), len(bad))


def _global_torsion_deg2(phi, max_deg=2):
    """Order of the group generated by phi[a](L), deg a <= max_deg, by root search."""
    total = 1
    for d in range(1, max_deg + 1):
        for p in monic_polys(phi.F, d):
            if p.is_irreducible():
                total *= len(torsion_global(phi, p ** (max_deg // d)).points)
    return total


def check_torsion_bound(seed=0, count=200, H=3):
    from .globalmu import family_scan, mu, parse_family, torsion_bound, torsion_found
    checked = viol = disagree = 0
    for phi in random_modules(seed, count) + torsion_modules(seed):
        T = PolyA(phi.F, [0, 1])
        if mu(phi, 0, T).mu < Fraction(1, phi.q):
            continue
        checked += 1
        n = _global_torsion_deg2(phi)
        if n != torsion_found(phi, 2)[0]:
            disagree += 1
        if n > torsion_bound(phi.rank, 0, T):
            viol += 1
    detail = "%d corpus modules with mu >= 1/q, %d violations, %d prefilter disagreements" % (
        checked, viol, disagree)
    if H is None:
        return viol == 0 and disagree == 0, detail
    t0 = time.perf_counter()
    scan = family_scan(parse_family(FAMILY_TEXT), H)
    dt = time.perf_counter() - t0
    flagged = [r for r in scan.rows if "BOUND_VIOLATED" in r.flags]
    ok = viol == 0 and disagree == 0 and not flagged and dt < 600 and scan.max_torsion <= scan.rows[0].bound
    return ok, detail + "; family H=%d: %d fibres, max torsion %d, %.0fs" % (
        H, len(scan.rows), scan.max_torsion, dt)


def check_adelic(seed=0, count=200):
    from .globalmu import adelic_check, mu
    n = bad = 0
    for phi in random_modules(seed, count) + torsion_modules(seed):
        T = PolyA(phi.F, [0, 1])
        verdict, _ = adelic_check(phi, T)
        n += 1
        if verdict != (mu(phi, 0, T).mu >= Fraction(1, phi.q)):
            bad += 1
    return bad == 0, "%d modules, %d disagreements" % (n, bad)


FIXTURE_11A1 = "label,p,ord_delta,ord_cond,ord_j,weight\n11a1,11,5,1,-5,1\n"


def random_semistable_records(seed=0, count=100):
    from .elliptic import CurveRecord, EllipticLocalData
    rng = random.Random(seed + 4)
    primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
    out = []
    for i in range(count):
        ps = rng.sample(primes, rng.randint(1, 4))
        data = []
        for p in ps:
            if rng.random() < 0.2:
                data.append(EllipticLocalData(p, 0, 0, rng.randint(0, 3)))
            else:
                k = rng.randint(1, 12)
                data.append(EllipticLocalData(p, k, 1, -k))
        if all(d.ord_conductor == 0 for d in data):
            k = rng.randint(1, 12)
            data.append(EllipticLocalData(41, k, 1, -k))
        out.append(CurveRecord("r%d" % i, tuple(data)))
    return out


def check_elliptic(seed=0, count=100):
    from .elliptic import (Interval, ingest_text, mu_elliptic, szpiro_ratio,
                           theorem_check)
    (rec,) = ingest_text(FIXTURE_11A1)
    fixture = (szpiro_ratio(rec) == 5 and mu_elliptic(rec, 0, 6) == 1
               and theorem_check(rec, 6) == (True, 1, Fraction(1, 25)))
    rng = random.Random(seed + 5)
    n = bad = 0
    for r in random_semistable_records(seed, count):
        s = szpiro_ratio(r)
        hi = s.hi if isinstance(s, Interval) else s
        nn = int(hi) + 1 + rng.randint(0, 5)
        n += 1
        if not theorem_check(r, nn)[0]:
            bad += 1
    return fixture and bad == 0, "11a1 fixture %s; %d random records, %d failures" % (
        "ok" if fixture else "WRONG", n, bad)


def _series_terms(x, q):
    """Frobenius on a Laurent polynomial {k: a} over the prime field F_q."""
    return {k * q: a for k, a in x.items()}


def _eval_additive(coeffs, x, p):
    """sum c_i x^(q^i) for monomial coefficients c_i = (a, k) at the place t."""
    total = {}
    y = dict(x)
    for i, c in enumerate(coeffs):
        if i:
            y = _series_terms(y, p)
        if c is None:
            continue
        a, k = c
        for e, b in y.items():
            total[e + k] = (total.get(e + k, 0) + a * b) % p
    return {e: b for e, b in total.items() if b}


def brute_roots(coeffs, p, lo, P):
    """Truncations mod t^P of L_v-roots, by exhaustive digit search from t^lo."""
    ks = [(i, c[1]) for i, c in enumerate(coeffs) if c is not None]

    def need(level):
        return min(k + p ** i * level for i, k in ks)

    out = []
    stack = [({}, lo)]
    while stack:
        x, k = stack.pop()
        fx = _eval_additive(coeffs, x, p)
        if fx and min(fx) < need(k):
            continue
        if k == P:
            out.append(x)
            continue
        for a in range(p):
            y = dict(x)
            if a:
                y[k] = a
            stack.append((y, k + 1))
    return out


def _root_floor(cs, p):
    """Nonzero roots need two terms of equal valuation: a lower bound for v(x)."""
    ks = [(p ** i, c[1]) for i, c in enumerate(cs) if c is not None]
    return floor(min(Fraction(k1 - k2, e2 - e1) for (e1, k1), (e2, k2)
                     in itertools.combinations(ks, 2)))


def check_local_roots(P=6):
    n = bad = repeated = 0
    for p in (2, 3):
        F = GF(p)
        v = parse_place("t", F)
        t = RatFunc.t(F)
        choices = [None] + [(a, k) for a in range(1, p) for k in (-2, -1, 0)]
        for cs in itertools.product(choices, repeat=3):
            if cs[-1] is None or sum(c is not None for c in cs) < 2:
                continue
            f = {p ** i: RatFunc.const(F, c[0]) * t ** c[1]
                 for i, c in enumerate(cs) if c is not None}
            rep = local_roots(f, v, P + 4)
            n += 1
            roots = [r for r, _ in rep.rational_roots]
            brute = {tuple(sorted((k, a) for k, a in b.items() if k < P))
                     for b in brute_roots(list(cs), p, _root_floor(cs, p), P + 3)}
            repeated += not rep.complete
            ok = len(brute) == len(roots)
            if ok:
                want = brute
                got = {tuple(sorted((k, r.coefficient(k)) for k in range(r.valuation(), P)
                                    if not r.is_zero() and r.coefficient(k)))
                       for r in roots}
                ok = want == got
            if not ok:
                bad += 1
    return bad == 0, "%d additive polynomials (%d with repeated roots), %d disagreements" % (
        n, repeated, bad)


# ----------------------------------------------------------------------

def run_all(seed=0, quick=False, budget_deg=2):
    count = 60 if quick else 200
    res = []
    res.append(_timed("1 carlitz infinity", 1, check_carlitz_infinity))
    res.append(_timed("2 height identity", 30, lambda: check_height_identity(seed, count)))
    res.append(_timed("3 product formula", 30, check_product_formula))
    res.append(_timed("4 component module vs tate", 300,
                      lambda: check_component_vs_tate(budget_deg, 20 if quick else 50, seed)))
    res.append(_timed("5 component size bound", None, check_size_bound))
    res.append(_timed("6 rigid lattices", None, check_rigid))
    res.append(_timed("7 generic subgroup", None, lambda: check_refine(seed)))
    res.append(_timed("8 torsion bound", None,
                      lambda: check_torsion_bound(seed, count, 2 if quick else 3)))
    res.append(_timed("9 adelic equivalence", None, lambda: check_adelic(seed, count)))
    res.append(_timed("10 elliptic", 5, lambda: check_elliptic(seed)))
    res.append(_timed("11 local roots", 120, check_local_roots))
    return res
