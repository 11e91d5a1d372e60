"""Twisted polynomials, Drinfeld F_q[T]-modules over F_q(t), and torsion.

A twisted polynomial sum c_i tau^i stands for the additive polynomial
sum c_i x^(q^i); multiplication is composition.  Coefficients may be RatFunc
(global) or LaurentSeries (local); both provide .frobenius(k).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from math import floor

from . import linalg
from .errors import ParseError, ZeroArgument, ZeroTwist
from .funcfield import (GF, PolyA, RatFunc, WeightedPoint, parse_ratfunc,
                        prime_power, relevant_places, valuation)
from .localfield import LaurentSeries, embed, local_roots, newton_polygon


def _is_zero(c):
    return c is None or c.is_zero()


class TwistedPoly:
    """sum_i c_i tau^i with tau c = c^q tau."""

    __slots__ = ("coeffs", "q")

    def __init__(self, coeffs, q):
        cs = list(coeffs)
        while cs and _is_zero(cs[-1]):
            cs.pop()
        self.coeffs = tuple(cs)
        self.q = q

    @property
    def degree(self):
        """tau-degree (q-degree); -1 for zero."""
        return len(self.coeffs) - 1

    def x_degree(self):
        return self.q ** self.degree if self.coeffs else 0

    def __getitem__(self, i):
        return self.coeffs[i]

    def __len__(self):
        return len(self.coeffs)

    def __add__(self, o):
        a, b = list(self.coeffs), list(o.coeffs)
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return TwistedPoly(out, self.q)

    def __neg__(self):
        return TwistedPoly([-c for c in self.coeffs], self.q)

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        """Composition: (f.g)_k = sum_{i+j=k} f_i g_j^(q^i)."""
        if not self.coeffs or not o.coeffs:
            return TwistedPoly([], self.q)
        n = len(self.coeffs) + len(o.coeffs) - 1
        out = [None] * n
        for i, fi in enumerate(self.coeffs):
            if _is_zero(fi):
                continue
            for j, gj in enumerate(o.coeffs):
                if _is_zero(gj):
                    continue
                term = fi * gj.frobenius(i)
                out[i + j] = term if out[i + j] is None else out[i + j] + term
        zero = self.coeffs[0] - self.coeffs[0]
        return TwistedPoly([zero if c is None else c for c in out], self.q)

    def scalar(self, c):
        """c * self (left multiplication by a constant of the coefficient ring)."""
        return TwistedPoly([c * x for x in self.coeffs], self.q)

    def __call__(self, x):
        total = None
        for i, c in enumerate(self.coeffs):
            if _is_zero(c):
                continue
            term = c * x.frobenius(i)
            total = term if total is None else total + term
        if total is None:
            return x - x
        return total

    def as_dict(self):
        """exponent -> coefficient, for root finding."""
        return {self.q ** i: c for i, c in enumerate(self.coeffs) if not _is_zero(c)}

    def __eq__(self, o):
        if not isinstance(o, TwistedPoly):
            return NotImplemented
        return self.q == o.q and len(self) == len(o) and all(
            a == b for a, b in zip(self.coeffs, o.coeffs))

    __hash__ = None

    def __repr__(self):
        parts = []
        for i, c in enumerate(self.coeffs):
            if _is_zero(c):
                continue
            mono = "x" if i == 0 else "x^%d" % (self.q ** i)
            cs = repr(c)
            if cs == "1":
                parts.append(mono)
            else:
                parts.append("(%s)*%s" % (cs, mono))
        return " + ".join(parts) if parts else "0"


class DrinfeldModule:
    """phi_T = t x + a_1 x^q + ... + a_r x^(q^r) over L = F_q(t)."""

    def __init__(self, q, coeffs):
        if prime_power(q) is None:
            raise ValueError("q = %r is not a prime power" % (q,))
        self.q = q
        self.F = GF(q)
        cs = [self._lift(c) for c in coeffs]
        if not cs:
            raise ValueError("rank must be at least 1")
        if cs[-1].is_zero():
            raise ValueError("leading coefficient a_r is zero")
        self.coeffs = tuple(cs)
        self.rank = len(cs)
        self.t = RatFunc.t(self.F)
        self._images = {}

    def _lift(self, c):
        if isinstance(c, RatFunc):
            return c
        if isinstance(c, PolyA):
            return RatFunc(c)
        if isinstance(c, int):
            return RatFunc.from_int(self.F, c)
        if isinstance(c, str):
            return parse_ratfunc(c, self.F)
        raise TypeError("unsupported coefficient %r" % (c,))

    @classmethod
    def carlitz(cls, q):
        return cls(q, [1])

    def a(self, i):
        """Coefficient a_i of phi_T, with a_0 = t."""
        return self.t if i == 0 else self.coeffs[i - 1]

    @property
    def phi_T(self):
        return TwistedPoly((self.t,) + self.coeffs, self.q)

    def __eq__(self, o):
        return isinstance(o, DrinfeldModule) and self.q == o.q and self.coeffs == o.coeffs

    def __hash__(self):
        return hash((self.q, self.coeffs))

    def __repr__(self):
        return "phi_T = %r" % (self.phi_T,)


class LocalDrinfeldModule:
    """A Drinfeld module whose phi_T coefficients are Laurent series at one place."""

    def __init__(self, q, place, coeffs, prec=None):
        self.q = q
        self.F = GF(q)
        self.place = place
        cs = list(coeffs)
        if not cs or cs[-1].is_zero():
            raise ValueError("leading coefficient vanishes to working precision")
        self.coeffs = tuple(cs)
        self.rank = len(cs)
        self.prec = prec if prec is not None else min(c.prec for c in cs)
        self.t = embed(RatFunc.t(self.F), place, self.prec)
        self._images = {}

    def a(self, i):
        return self.t if i == 0 else self.coeffs[i - 1]

    @property
    def phi_T(self):
        return TwistedPoly((self.t,) + self.coeffs, self.q)

    def __repr__(self):
        return "phi_T = %r  (at %r)" % (self.phi_T, self.place)


def localize(phi, v, prec):
    """Embed phi's coefficients in L_v."""
    if isinstance(phi, LocalDrinfeldModule):
        return phi
    return LocalDrinfeldModule(phi.q, v, [embed(c, v, prec) for c in phi.coeffs], prec)


# ----------------------------------------------------------------------
# phi_a
# ----------------------------------------------------------------------

def _const_twisted(phi, c):
    """The constant c(t) in the coefficient ring of phi as a twisted polynomial."""
    F = phi.F
    if isinstance(phi, LocalDrinfeldModule):
        return TwistedPoly([LaurentSeries.constant(phi.place, c, phi.prec)], phi.q)
    return TwistedPoly([RatFunc.const(F, c)], phi.q)


def phi_image(phi, a):
    """phi_a for a in F_q[T] (PolyA), by Horner's rule in the twisted ring."""
    if isinstance(a, int):
        a = PolyA(phi.F, [phi.F.from_int(a)])
    key = a.c
    hit = phi._images.get(key)
    if hit is not None:
        return hit
    if a.is_zero():
        res = TwistedPoly([], phi.q)
    else:
        T = phi.phi_T
        res = None
        for c in reversed(a.c):
            cst = _const_twisted(phi, c)
            res = cst if res is None else res * T + cst
    phi._images[key] = res
    return res


def phi_eval(phi, a, x):
    return phi_image(phi, a)(x)


def j_invariant(phi):
    q = phi.q
    return WeightedPoint(phi.coeffs, [q ** i - 1 for i in range(1, phi.rank + 1)])


def twist(phi, alpha):
    """psi with psi_T(x) = alpha^-1 phi_T(alpha x): b_i = alpha^(q^i - 1) a_i."""
    if alpha.is_zero():
        raise ZeroTwist("twist by zero")
    q = phi.q
    return DrinfeldModule(q, [alpha ** (q ** i - 1) * c
                              for i, c in enumerate(phi.coeffs, start=1)])


# ----------------------------------------------------------------------
# torsion
# ----------------------------------------------------------------------

def torsion_local(phi, a, v, prec=12):
    if a.is_zero():
        raise ZeroArgument("a must be nonzero")
    return local_roots(phi_image(phi, a).as_dict(), v, prec)


@dataclass
class TorsionModule:
    a: PolyA
    points: list
    basis: list
    module_structure: list
    complete: bool = True
    method: str = "linear"
    notes: list = field(default_factory=list)

    def __len__(self):
        return len(self.points)


@dataclass
class SearchConfig:
    method: str = "linear"        # "linear" or "reconstruct"
    extra_prec: int = 4


def _pole_bounds(pa):
    """Denominator D and numerator degree bound for L-rational roots of pa.

    At each place the valuation of a nonzero root is minus a polygon slope,
    so poles are bounded by the largest slope.
    """
    cs = [c for c in pa.coeffs]
    F = cs[0].F
    q = pa.q
    places = relevant_places([c for c in cs if not c.is_zero()])
    D = PolyA(F, [1])
    deg_bound = None
    for v in places:
        pts = [(q ** i, valuation(c, v)) for i, c in enumerate(cs) if not c.is_zero()]
        smax = newton_polygon(pts).max_slope()
        if v.is_infinite:
            deg_bound = floor(smax)
        elif smax > 0:
            D = D * v.poly ** floor(smax)
    if deg_bound is None:
        deg_bound = 0
    return D, D.deg + deg_bound


def _span_points(F, basis):
    zero = RatFunc(PolyA(F, []))
    out = [zero]
    for b in basis:
        new = []
        for c in F.elements():
            if c == 0:
                continue
            cb = RatFunc.const(F, c) * b
            new.extend(p + cb for p in out)
        out = out + new
    return out


def _structure(phi, basis):
    """Invariant factors of the F_q[T]-module spanned by the torsion basis."""
    F = phi.F
    if not basis:
        return []
    D = basis[0].den
    for b in basis[1:]:
        D = (D * b.den) // D.gcd(b.den)
    width = max((b * RatFunc(D)).num.deg for b in basis) + 1
    imgs = [phi.phi_T(b) for b in basis]
    width = max([width] + [(x * RatFunc(D)).num.deg + 1 for x in imgs])

    def vec(x):
        n = (x * RatFunc(D))
        assert n.den.deg == 0
        c = list(n.num.c) + [0] * (width - len(n.num.c))
        return c

    A = linalg.orbit_matrix(F, [vec(b) for b in basis], [vec(x) for x in imgs])
    return linalg.invariant_factors(F, A)


def torsion_global(phi, a, cfg=None):
    """All roots of phi_a in L.

    A root x = N/D has D and deg N bounded by Newton polygons.  The default
    method solves the F_q-linear system sum n_k phi_a(t^k / D) = 0 for the
    coefficients of N.  The "reconstruct" method expands local roots at a
    good degree-one place and recovers them by Pade approximation.  Both
    verify every candidate by exact substitution.
    """
    cfg = cfg or SearchConfig()
    if a.is_zero():
        raise ZeroArgument("a must be nonzero")
    F = phi.F
    pa = phi_image(phi, a)
    if pa.degree <= 0:
        return TorsionModule(a, [RatFunc(PolyA(F, []))], [], [], True, cfg.method)
    D, nbound = _pole_bounds(pa)
    if nbound < 0:
        basis = []
    elif cfg.method == "reconstruct":
        basis = _reconstruct_basis(phi, pa, D, nbound, cfg)
    else:
        basis = _linear_basis(phi, pa, D, nbound)
    for b in basis:
        if not pa(b).is_zero():
            raise AssertionError("torsion candidate failed verification")
    points = _span_points(F, basis)
    return TorsionModule(a, points, basis, _structure(phi, basis), True, cfg.method)


def _linear_basis(phi, pa, D, nbound):
    F = phi.F
    q = pa.q
    cs = pa.coeffs
    n = len(cs) - 1
    Dc = PolyA(F, [1])
    for c in cs:
        if not c.is_zero():
            Dc = (Dc * c.den) // Dc.gcd(c.den)
    # P_i = c_i * Dc * D^(q^n - q^i), so that column k = sum_i P_i t^(k q^i)
    P = []
    for i, c in enumerate(cs):
        if c.is_zero():
            P.append(None)
            continue
        Dpow = (D ** (q ** (n - i) - 1)).frobenius(i)
        P.append(c.num * (Dc // c.den) * Dpow)
    cols = []
    for k in range(nbound + 1):
        acc = PolyA(F, [])
        for i, Pi in enumerate(P):
            if Pi is None:
                continue
            shift = k * q ** i
            acc = acc + PolyA(F, [0] * shift + list(Pi.c))
        cols.append(list(acc.c))
    m = max(len(c) for c in cols)
    rows = [[cols[k][r] if r < len(cols[k]) else 0 for k in range(len(cols))]
            for r in range(m)]
    rows = [r for r in rows if any(r)]
    ker = linalg.kernel(F, rows, len(cols))
    Dr = RatFunc(D)
    return [RatFunc(PolyA(F, vec)) / Dr for vec in ker]


def _good_place(phi, pa, avoid):
    """A degree-one place where all coefficients of pa are integral, the top
    one is a unit and phi_a reduces separably (a(c) != 0)."""
    from .funcfield import Place
    F = phi.F
    for c in F.elements():
        v = Place.finite(PolyA(F, [F.neg(c), 1]), _checked=True)
        if avoid and any(v.poly == p for p in avoid):
            continue
        vals = [valuation(x, v) for x in pa.coeffs if not x.is_zero()]
        if min(vals) < 0 or valuation(pa.coeffs[-1], v) != 0 or valuation(pa.coeffs[0], v) != 0:
            continue
        return v
    return None


def _pade(series, F, nnum, nden):
    """Rational reconstruction of a power series (list over F_q, known mod
    pi^len) as N/Dd with deg N <= nnum, deg Dd <= nden."""
    M = len(series)
    r0 = PolyA(F, [0] * M + [1])
    r1 = PolyA(F, series)
    s0, s1 = PolyA(F, []), PolyA(F, [1])
    while not r1.is_zero() and r1.deg > nnum:
        qt, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - qt * s1
    if s1.is_zero() or s1.deg > nden or (s1.c[0] if s1.c else 0) == 0:
        return None
    return r1, s1


def _reconstruct_basis(phi, pa, D, nbound, cfg):
    F = phi.F
    avoid = [p for p, _ in D.factor()] if D.deg > 0 else []
    v = _good_place(phi, pa, avoid)
    if v is None:
        # fall back: no suitable degree-one place (tiny q); the linear method is complete
        return _linear_basis(phi, pa, D, nbound)
    nden = D.deg
    prec = nbound + nden + 2 + cfg.extra_prec
    rep = local_roots(pa.as_dict(), v, prec)
    found = []
    for r, _cert in rep.rational_roots:
        if r.is_zero():
            continue
        ser = [r.coefficient(k) for k in range(0, prec)] if r.valuation() >= 0 else None
        if ser is None:
            continue
        got = _pade(ser, F, nbound, nden)
        if got is None:
            continue
        N, Dd = got
        # substitute pi = t - c
        pi = RatFunc(v.poly)
        x = _poly_in_pi(N, pi) / _poly_in_pi(Dd, pi)
        if pa(x).is_zero():
            found.append(x)
    # independent subset over F_q
    basis, vecs = [], []
    if not found:
        return []
    Dl = D
    for x in found:
        w = x * RatFunc(Dl)
        if w.den.deg != 0:
            continue
        vec = list(w.num.c) + [0] * (nbound + 1 - len(w.num.c))
        trial = vecs + [vec]
        if linalg.rank(F, trial, nbound + 1) == len(trial):
            vecs.append(vec)
            basis.append(x)
    return basis


def _poly_in_pi(f, pi):
    F = f.F
    out = RatFunc(PolyA(F, []))
    for c in reversed(f.c):
        out = out * pi + RatFunc.const(F, c)
    return out


# ----------------------------------------------------------------------
# module files
# ----------------------------------------------------------------------

_KV = re.compile(r"^\s*([A-Za-z_]+)\s*=\s*(.*?)\s*$")


def parse_kv(text):
    out = {}
    for ln, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        m = _KV.match(line)
        if not m:
            raise ParseError("line %d: expected key = value" % ln)
        key = m.group(1).lower()
        if key in out:
            raise ParseError("line %d: duplicate key %r" % (ln, key))
        out[key] = m.group(2)
    return out


def split_list(s):
    s = s.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise ParseError("coeffs must be a bracketed list")
    body = s[1:-1]
    parts, depth, cur = [], 0, []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if "".join(cur).strip():
        parts.append("".join(cur))
    return [p.strip() for p in parts]


def _int_field(kv, key):
    try:
        return int(kv[key])
    except KeyError:
        raise ParseError("missing key %r" % key) from None
    except ValueError:
        raise ParseError("%s must be an integer" % key) from None


def parse_module(text):
    kv = parse_kv(text)
    for k in kv:
        if k not in ("q", "rank", "coeffs"):
            raise ParseError("unknown key %r" % k)
    q = _int_field(kv, "q")
    if prime_power(q) is None:
        raise ParseError("q = %d is not a prime power" % q)
    r = _int_field(kv, "rank")
    if "coeffs" not in kv:
        raise ParseError("missing key 'coeffs'")
    F = GF(q)
    items = split_list(kv["coeffs"])
    if len(items) != r or r < 1:
        raise ParseError("rank %d but %d coefficients" % (r, len(items)))
    cs = [parse_ratfunc(s, F) for s in items]
    if cs[-1].is_zero():
        raise ParseError("a_r must be nonzero")
    return DrinfeldModule(q, cs)


def format_module(phi):
    from .funcfield import fmt_ratfunc
    return "q = %d\nrank = %d\ncoeffs = [%s]\n" % (
        phi.q, phi.rank, ", ".join(fmt_ratfunc(c) for c in phi.coeffs))
