"""Global assembly over L = F_q(t): bad places, S_phi(a), mu, the torsion
bound, the adelic form of the N = 0 statement, and simple-family scans."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil

from .drinfeld import (DrinfeldModule, j_invariant, parse_kv, split_list,
                       torsion_global)
from .errors import (DomainError, IncompleteComponentData, ParseError,
                     ZeroArgument)
from .funcfield import (GF, Place, PolyA, RatFunc, eval_expr, base_env,
                        monic_polys, parse_expr, prime_power, relevant_places,
                        weighted_height)
from .localdyn import component_module, local_report

log = logging.getLogger(__name__)


def _candidate_places(phi):
    """Places where some j_v or B_T can be nonzero: inf, (t) and the supports."""
    F = phi.F
    ps = set(relevant_places(list(phi.coeffs) + [phi.t]))
    ps.add(Place.infinity(F))
    return sorted(ps, key=lambda v: v.key())


def per_place_j(phi):
    hit = phi.__dict__.get("_per_place_j")
    if hit is None:
        hit = phi._per_place_j = {v: local_report(phi, v).j_v
                                  for v in relevant_places(list(phi.coeffs))}
    return dict(hit)


def bad_places(phi):
    return {v for v, j in per_place_j(phi).items() if j > 0}


def S_of_ideal(phi, a_gen):
    if a_gen.is_zero():
        raise ZeroArgument("the ideal generator must be nonzero")
    out = set()
    for v in bad_places(phi):
        if v.is_infinite:
            continue
        M = component_module(phi, v)
        if not M.complete:
            raise IncompleteComponentData("component module at %r is incomplete" % (v,))
        if M.size > 1 and M.torsion_count(a_gen) != M.size:
            out.add(v)
    return out


@dataclass
class MuResult:
    mu: Fraction
    S_bad: set
    S_a: set
    witness_S: frozenset
    per_place_j: dict = field(repr=False)


def _ratio(jv, S_a, S):
    den = sum((j for v, j in jv.items() if v not in S), Fraction(0))
    if den == 0:
        return Fraction(1)
    num = sum((j for v, j in jv.items() if v not in S and v not in S_a), Fraction(0))
    return num / den


def mu(phi, N, a_gen):
    if N < 0:
        raise ValueError("N must be non-negative")
    pj = per_place_j(phi)
    S_bad = {v for v, j in pj.items() if j > 0}
    S_a = S_of_ideal(phi, a_gen)
    finite = {v: j for v, j in pj.items() if j > 0 and not v.is_infinite}
    order = sorted(finite, key=lambda v: v.key())
    best, witness = None, frozenset()
    for k in range(min(N, len(order)) + 1):
        for S in itertools.combinations(order, k):
            val = _ratio(finite, S_a, set(S))
            if best is None or val > best:
                best, witness = val, frozenset(S)
    return MuResult(best, S_bad, S_a, witness, pj)


def torsion_bound(r, N, a_gen, num_gens=1, degT=1, ext_degree=1):
    """Norm(a)^r q^(4 r^2 (sum deg T_i [L:K] + N))."""
    q = a_gen.F.size
    return q ** (r * a_gen.deg) * q ** (4 * r * r * (num_gens * degT * ext_degree + N))


def adelic_check(phi, a_gen):
    """S = {inf} + S_phi(a) against sum_S j_v <= j_inf/q + (1 - 1/q) h(j)."""
    q = phi.q
    pj = per_place_j(phi)
    inf = Place.infinity(phi.F)
    S = {inf} | S_of_ideal(phi, a_gen)
    lhs = sum((pj.get(v, Fraction(0)) for v in S), Fraction(0))
    h = weighted_height(j_invariant(phi))
    rhs = pj.get(inf, Fraction(0)) / q + (1 - Fraction(1, q)) * h
    return lhs <= rhs, S


# ----------------------------------------------------------------------
# torsion prefilter
# ----------------------------------------------------------------------

def julia_rr_bound(phi):
    """(Z, Dn, degree bound) with every torsion point of the form Z*N/Dn,
    deg N <= bound; bound < 0 means the torsion is {0}.

    Torsion points stay in every filled Julia set, so |x|_v <= B_T at all v.
    Away from the candidate places B_T = 0 and x is integral.
    """
    F = phi.F
    Z = PolyA(F, [1])
    Dn = PolyA(F, [1])
    m_inf = 0
    for v in _candidate_places(phi):
        m = ceil(-local_report(phi, v).B_T_log / v.deg)
        if v.is_infinite:
            m_inf = m
        elif m > 0:
            Z = Z * v.poly ** m
        elif m < 0:
            Dn = Dn * v.poly ** (-m)
    return Z, Dn, Dn.deg - m_inf - Z.deg


RR_ENUM_CAP = 5 ** 3


def _rr_torsion(phi, Z, Dn, bound):
    """phi_T on the torsion inside {N Z / Dn : deg N <= bound}.

    The space is finite and contains all torsion, so a point is torsion
    exactly when its orbit never leaves it.
    """
    F = phi.F
    unit = RatFunc(Z, Dn)
    space = {}
    for cs in itertools.product(range(F.size), repeat=bound + 1):
        x = RatFunc(PolyA(F, list(cs))) * unit
        space[x] = None

    def inside(y):
        n = y * RatFunc(Dn, Z)
        return n.den.deg == 0 and n.num.deg <= bound

    succ = {}
    status = {}
    for x in space:
        path = []
        y = x
        while y not in status and y not in path:
            path.append(y)
            z = succ[y] = phi.phi_T(y)
            if not inside(z):
                status[y] = False
                break
            y = z
        verdict = status.get(y, True)
        for p in path:
            status.setdefault(p, verdict)
    tors = [x for x, ok in status.items() if ok]
    return tors, succ


def _annihilated(tors, succ, a):
    n = 0
    for x in tors:
        acc = None
        y = x
        for k, c in enumerate(a.c):
            if k:
                y = succ[y]
            if c:
                term = RatFunc.const(a.F, c) * y
                acc = term if acc is None else acc + term
        n += acc is None or acc.is_zero()
    return n


def torsion_found(phi, max_deg=2):
    """#(subgroup generated by phi[a](L), deg a <= max_deg), with a flag
    telling how it was settled: "prefilter" (the torsion is {0}), "rr-orbit"
    (orbits inside the bounding space) or "searched" (root search)."""
    Z, Dn, bound = julia_rr_bound(phi)
    if bound < 0:
        return 1, "prefilter"
    F = phi.F
    primes = [(p, max_deg // d) for d in range(1, max_deg + 1)
              for p in monic_polys(F, d) if p.is_irreducible()]
    # the subgroup is the product over primes p of phi[p^k](L), p^k of maximal degree
    total = 1
    if F.size ** (bound + 1) <= RR_ENUM_CAP:
        tors, succ = _rr_torsion(phi, Z, Dn, bound)
        for p, k in primes:
            total *= _annihilated(tors, succ, p ** k)
        return total, "rr-orbit"
    for p, k in primes:
        total *= len(torsion_global(phi, p ** k).points)
    return total, "searched"


# ----------------------------------------------------------------------
# simple families
# ----------------------------------------------------------------------

@dataclass
class FamilySpec:
    q: int
    param: str
    coeff_texts: list
    trees: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        if not self.trees:
            self.trees = [parse_expr(s) for s in self.coeff_texts]
        self.F = GF(self.q)
        self._env = base_env(self.F)
        if self.param in self._env:
            raise ParseError("parameter name %r clashes with a field symbol" % self.param)

    @property
    def rank(self):
        return len(self.coeff_texts)

    def specialize(self, beta):
        env = dict(self._env)
        env[self.param] = beta
        try:
            cs = [eval_expr(t, self.F, env) for t in self.trees]
        except ZeroDivisionError as ex:
            raise DomainError("coefficients not regular at this parameter value") from ex
        if cs[-1].is_zero():
            raise DomainError("top coefficient vanishes (rank drops)")
        return DrinfeldModule(self.q, cs)

    def beta_degree(self, i):
        """Degree in the parameter of coefficient i (by a large-degree substitution)."""
        F = self.F
        N = 64
        env = dict(self._env)
        env[self.param] = RatFunc(PolyA(F, [0] * N + [1]))
        x = eval_expr(self.trees[i], F, env)
        if x.is_zero():
            return 0
        return round((x.num.deg - x.den.deg) / N)


def parse_family(text):
    kv = parse_kv(text)
    allowed = {"q", "rank", "coeffs", "param"}
    extra = set(kv) - allowed
    if extra:
        raise ParseError("unknown keys: %s" % ", ".join(sorted(extra)))
    for k in ("q", "coeffs", "param"):
        if k not in kv:
            raise ParseError("missing key %r" % k)
    try:
        q = int(kv["q"])
    except ValueError:
        raise ParseError("q must be an integer") from None
    if prime_power(q) is None:
        raise ParseError("q = %d is not a prime power" % q)
    coeffs = split_list(kv["coeffs"])
    if not coeffs:
        raise ParseError("coeffs must be non-empty")
    if "rank" in kv and int(kv["rank"]) != len(coeffs):
        raise ParseError("rank does not match the number of coefficients")
    param = kv["param"].strip()
    if not param.isidentifier():
        raise ParseError("bad parameter name %r" % param)
    spec = FamilySpec(q, param, coeffs)
    F = spec.F
    for t in spec.trees:  # validate symbols
        env = dict(spec._env)
        env[param] = RatFunc.t(F)
        try:
            eval_expr(t, F, env)
        except ZeroDivisionError:
            pass
    return spec


def betas_up_to(F, H):
    """P^1(L) points of height <= H ordered by (height, lexicographic); inf first."""
    yield None, 0
    zero = PolyA(F, [])
    for h in range(H + 1):
        dens = [d for k in range(h + 1) for d in monic_polys(F, k)]
        for d in dens:
            for num_deg in range(-1, h + 1):
                if max(num_deg, d.deg) != h:
                    continue
                if num_deg < 0:
                    if d.deg == 0:
                        yield RatFunc(zero), 0
                    continue
                for tail in itertools.product(range(F.size), repeat=num_deg):
                    for lead in range(1, F.size):
                        n = PolyA(F, list(tail) + [lead])
                        if d.deg > 0 and n.gcd(d).deg > 0:
                            continue
                        yield RatFunc(n, d, _canonical=True), h


FAMILY_COLUMNS = ["beta", "h_j", "mu", "S_a_size", "torsion_found", "bound", "flags"]


@dataclass
class FamilyRow:
    beta: str
    h_j: Fraction
    mu: Fraction
    S_a_size: int
    torsion_found: int
    bound: int
    flags: str

    def as_list(self):
        return [self.beta, self.h_j, self.mu, self.S_a_size, self.torsion_found,
                self.bound, self.flags]


@dataclass
class FamilyScan:
    rows: list
    rejected: list
    min_mu: Fraction
    max_torsion: int

    def summary(self):
        return ["summary", "", self.min_mu, max((r.S_a_size for r in self.rows), default=0),
                self.max_torsion, "",
                "fibres=%d;rejected=%d" % (len(self.rows), len(self.rejected))]


def family_scan(spec, beta_height_max, N=0, a_gen=None, max_torsion_deg=2):
    F = spec.F
    a_gen = a_gen if a_gen is not None else PolyA(F, [0, 1])
    q, r = spec.q, spec.rank
    rows, rejected = [], []
    for beta, h in betas_up_to(F, beta_height_max):
        label = "inf" if beta is None else repr(beta)
        try:
            if beta is None:
                if any(spec.beta_degree(i) > 0 for i in range(r)):
                    raise DomainError("coefficients have a pole at beta = inf")
                raise DomainError("fibre at beta = inf is not evaluated")
            phi = spec.specialize(beta)
            m = mu(phi, N, a_gen)
            tors, how = torsion_found(phi, max_torsion_deg)
        except DomainError as ex:
            log.info("beta = %s rejected: %s", label, ex)
            rejected.append((label, str(ex)))
            continue
        hj = sum(m.per_place_j.values(), Fraction(0))
        bound = torsion_bound(r, N, a_gen)
        flags = [how]
        if m.mu < Fraction(1, q):
            flags.append("mu_below_1/q")
        elif tors > bound:
            flags.append("BOUND_VIOLATED")
        rows.append(FamilyRow(label, hj, m.mu, len(m.S_a), tors, bound, ";".join(flags)))
    min_mu = min((r_.mu for r_ in rows), default=Fraction(1))
    max_t = max((r_.torsion_found for r_ in rows), default=0)
    return FamilyScan(rows, rejected, min_mu, max_t)
