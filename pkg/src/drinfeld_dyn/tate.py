"""Tate uniformization at a finite place, at desk scale.

A lattice Lambda = A w_1 + ... + A w_s inside psi(L_v), with psi of good
reduction at v and |w_i| > 1, gives an exponential e(z) = z prod (1 - z/w)
and a Drinfeld module phi with e(psi_a(z)) = phi_a(e(z)).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .drinfeld import (DrinfeldModule, LocalDrinfeldModule, TwistedPoly,
                       localize, phi_image)
from .errors import BudgetExceeded, PrecisionExhausted, ZeroArgument
from .funcfield import PolyA, valuation
from .localfield import LaurentSeries, residue_field

DEFAULT_DEG_BUDGET = 2


def _polys_upto(F, d):
    """All polynomials of degree <= d (including 0) over F."""
    out = []
    for coeffs in itertools.product(range(F.size), repeat=d + 1):
        out.append(PolyA(F, list(coeffs)))
    return out


def _stable_rank(psi, v):
    """Rank of the reduction of psi at v (its top coefficient must be a unit)."""
    for i in range(1, psi.rank + 1):
        if valuation(psi.a(i), v) < 0:
            raise ValueError("psi is not integral at %r" % (v,))
    if valuation(psi.a(psi.rank), v) != 0:
        raise ValueError("psi does not have good reduction at %r" % (v,))
    return psi.rank


@dataclass
class Lattice:
    psi: DrinfeldModule
    place: object
    generators: tuple
    truncation_bound: Fraction = Fraction(0)
    deg_budget: int = DEFAULT_DEG_BUDGET

    def __post_init__(self):
        self.generators = tuple(self.generators)
        for w in self.generators:
            if w.is_zero() or w.valuation() >= 0:
                raise ValueError("lattice generators must satisfy |w| > 1")
        self.r1 = _stable_rank(self.psi, self.place)
        prec = min((w.prec for w in self.generators), default=0)
        self.prec = prec
        self._local = localize(self.psi, self.place, max(prec, 1) + 1)

    @property
    def rank(self):
        return len(self.generators)

    def psi_T_powers(self, w, k):
        """[psi_{T^j}(w) for j = 0..k]."""
        T = self._local.phi_T
        out = [w]
        for _ in range(k):
            out.append(T(out[-1]))
        return out

    def element(self, coeffs):
        """sum psi_{a_i}(w_i)."""
        total = None
        for a, w in zip(coeffs, self.generators):
            if a.is_zero():
                continue
            x = phi_image(self._local, a)(w)
            total = x if total is None else total + x
        return total if total is not None else LaurentSeries.zero(self.place, self.prec)

    def log_size(self, x):
        return Fraction(-x.valuation() * self.place.deg)

    def rigid_value(self, coeffs):
        """max_i |a_i|^r1 log|w_i| over nonzero a_i."""
        best = None
        for a, w in zip(coeffs, self.generators):
            if a.is_zero():
                continue
            x = self.psi.q ** (self.r1 * a.deg) * self.log_size(w)
            best = x if best is None or x > best else best
        return best


def _enumerate(lat, d):
    """(coefficient tuple, element) for all nonzero tuples with deg a_i <= d."""
    F = lat.psi.F
    pols = _polys_upto(F, d)
    powers = [lat.psi_T_powers(w, d) for w in lat.generators]
    out = []
    for combo in itertools.product(pols, repeat=lat.rank):
        if all(a.is_zero() for a in combo):
            continue
        total = None
        for a, pw in zip(combo, powers):
            for k, c in enumerate(a.c):
                if c:
                    x = pw[k].scale(c) if c != 1 else pw[k]
                    total = x if total is None else total + x
        out.append((combo, total))
    return out


def rigid_holds(lat, d=DEFAULT_DEG_BUDGET):
    """Exhaustive check of log|sum psi_{a_i}(w_i)| = max |a_i|^r1 log|w_i|."""
    for combo, x in _enumerate(lat, d):
        if x.is_zero() or lat.log_size(x) != lat.rigid_value(combo):
            return False
    return True


def _in_span(F, rows, vec):
    """Is vec an F_q[T]-combination of rows?  (rank <= 2, tiny degrees)"""
    if not rows:
        return all(a.is_zero() for a in vec)
    if len(rows) == 1:
        (r,) = rows
        ratio = None
        for a, b in zip(vec, r):
            if b.is_zero():
                if not a.is_zero():
                    return False
                continue
            qt, rem = divmod(a, b)
            if not rem.is_zero():
                return False
            if ratio is None:
                ratio = qt
            elif ratio != qt:
                return False
        return True
    raise NotImplementedError("lattices of rank > 2")


def lattice_reduce(lat, d=None):
    """Greedy successive minima within the enumeration budget."""
    d = lat.deg_budget if d is None else d
    if lat.rank == 0:
        return lat
    if lat.rank > 2:
        raise NotImplementedError("lattices of rank > 2")
    F = lat.psi.F
    elems = [(c, x) for c, x in _enumerate(lat, d) if not x.is_zero()]
    elems.sort(key=lambda cx: (cx[1].valuation() * -1, _key(cx[0])))
    chosen = []
    for c, x in elems:
        if _in_span(F, [cc for cc, _ in chosen], c):
            continue
        chosen.append((c, x))
        if len(chosen) == lat.rank:
            break
    if len(chosen) < lat.rank:
        raise BudgetExceeded("no independent minimal vectors within degree %d" % d)
    if lat.rank == 2:
        (a, b), (c, e) = chosen[0][0], chosen[1][0]
        det = a * e - b * c
        if det.deg != 0:
            raise BudgetExceeded("minimal vectors do not span the lattice within degree %d" % d)
    gens = tuple(x for _, x in chosen)
    return Lattice(lat.psi, lat.place, gens, lat.truncation_bound, lat.deg_budget)


def _key(combo):
    return tuple(a.key() for a in combo)


# ----------------------------------------------------------------------
# exponential
# ----------------------------------------------------------------------

@dataclass
class AdditivePowerSeries:
    """e(x) = sum_{i <= n} e_i x^(q^i), e_0 = 1."""

    coeffs: list
    q: int
    lattice_points_used: int = 0

    def as_twisted(self):
        return TwistedPoly(self.coeffs, self.q)

    def __call__(self, x):
        return self.as_twisted()(x)

    @property
    def n(self):
        return len(self.coeffs) - 1


def exp_lattice(lat, n, prec=None):
    """Truncated exponential of the lattice, coefficients known to pi^prec.

    The F_q-span W of the vectors psi_{T^k}(w_i) is grown in order of size,
    using e_{W+<u>}(z) = e_W(z) (1 - (e_W(z)/e_W(u))^(q-1)); the values
    e_W(w) of the pending vectors are carried along at relative precision.
    A vector u with (q-1)(-v(u)) >= prec changes no coefficient mod pi^prec.
    """
    q = lat.psi.q
    v = lat.place
    prec = prec if prec is not None else lat.prec
    one = LaurentSeries.constant(v, 1, prec)
    zero = LaurentSeries.zero(v, prec)
    e = [one] + [zero] * n
    if lat.rank == 0:
        return AdditivePowerSeries(e, q, 0)
    T = lat._local.phi_T
    vectors = []
    for i, w in enumerate(lat.generators):
        k = 0
        while (q - 1) * -w.valuation() < prec:
            if w.prec <= w.valuation():
                raise PrecisionExhausted("lattice generator precision too low")
            vectors.append((w.valuation(), i, k, w))
            w = T(w)
            k += 1
    vectors.sort(key=lambda t: (-t[0], t[1], t[2]))
    vals = [w for *_, w in vectors]
    for idx in range(len(vals)):
        ew = vals[idx]
        if ew.is_zero():
            raise PrecisionExhausted("lattice vector collapsed at working precision")
        cinv = (ew ** (q - 1)).inverse()
        te = [None] + [x.frobenius(1) for x in e[:-1]]
        e = [e[0]] + [e[j] - cinv * te[j] for j in range(1, n + 1)]
        for j in range(idx + 1, len(vals)):
            pv = vals[j]
            vals[j] = pv - pv * (pv / ew) ** (q - 1)
    return AdditivePowerSeries([x.truncate(prec) for x in e], q, len(vectors))


# ----------------------------------------------------------------------
# phi from (psi, Lambda)
# ----------------------------------------------------------------------

@dataclass
class Uniformization:
    phi: LocalDrinfeldModule
    exp: AdditivePowerSeries
    residual_valuations: list  # v(coefficient of tau^m in e psi_T - phi_T e), m > r
    prec: int


def uniformize(psi, lat, n=None, prec=None):
    """Solve phi_T from e psi_T = phi_T e, one tau-degree at a time."""
    if lat.rank == 0:
        v = lat.place
        p = prec if prec is not None else max(lat.prec, 1)
        return Uniformization(localize(psi, v, p), None, [], p)
    q = psi.q
    r = psi.rank + lat.rank
    n = r + 2 if n is None else n
    if n < r:
        raise ValueError("truncation n must be at least the rank of phi")
    prec = lat.prec if prec is None else prec
    e = exp_lattice(lat, n, prec).coeffs
    loc = localize(psi, lat.place, prec)
    pT = [loc.a(i) for i in range(psi.rank + 1)]

    def lhs(m):
        acc = None
        for i in range(min(m, n) + 1):
            j = m - i
            if j >= len(pT):
                continue
            term = e[i] * pT[j].frobenius(i)
            acc = term if acc is None else acc + term
        return acc

    a = []
    for m in range(r + 1):
        acc = lhs(m)
        for k in range(m):
            acc = acc - a[k] * e[m - k].frobenius(k)
        a.append(acc)
    res = []
    for m in range(r + 1, n + 1):
        acc = lhs(m)
        for k in range(r + 1):
            if m - k <= n:
                acc = acc - a[k] * e[m - k].frobenius(k)
        res.append(acc.valuation())
    coeffs = a[1:]
    p = min(x.prec for x in coeffs)
    if coeffs[-1].is_zero():
        raise PrecisionExhausted("top coefficient of phi vanishes at working precision")
    phi = LocalDrinfeldModule(q, lat.place, coeffs, p)
    return Uniformization(phi, AdditivePowerSeries(e, q), res, p)


# ----------------------------------------------------------------------
# division points
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class DivisionClass:
    tag: tuple          # (b_1, ..., b_s), deg b_i < deg a
    rational: bool
    representative: object = None  # polar part z with psi_a(z) - sum psi_{b_i}(w_i) in O_v


def division_points(psi, lat, a, prec=None):
    """Classes of (a^-1 Lambda)/Lambda and whether each has an L_v-point.

    A class b is L_v-rational when psi_a(z) - sum psi_{b_i}(w_i) lies in O_v
    for some z in L_v.  Since psi_a(O_v) lies in O_v, only polar parts of z
    matter, and the question is an F_q-linear system on polar parts.
    """
    if a.is_zero():
        raise ZeroArgument("a must be nonzero")
    F = psi.F
    v = lat.place
    K = residue_field(v)
    d = v.deg
    tags = list(itertools.product(_polys_upto(F, a.deg - 1) if a.deg > 0 else
                                  [PolyA(F, [])], repeat=lat.rank))
    if a.deg == 0:
        tags = [tuple(PolyA(F, []) for _ in range(lat.rank))]
    targets = [(tag, lat.element(tag)) for tag in tags]
    for _, w in targets:
        if w.prec < 1:
            raise PrecisionExhausted("lattice element polar part unknown")
    nu = max([-w.valuation() for _, w in targets if not w.is_zero()] + [0])
    R = lat.r1 * a.deg
    Q = psi.q ** R
    kz = nu // Q  # polar order of z
    low = min(-kz * Q, -nu)
    pa = phi_image(localize(psi, v, kz * Q + 2), a)

    def polar(s):
        vec = [0] * ((-low) * d)
        for i, c in enumerate(s.coeffs):
            k = s.valuation() + i
            if k >= 0:
                break
            if k < low:
                return None
            base = (k - low) * d
            if d == 1:
                vec[base] = c
            else:
                for j, y in enumerate(K._dec(c)):
                    vec[base + j] = y
        return vec

    cols = []
    units = []
    for k in range(-kz, 0):
        for j in range(d):
            code = 1 if d == 1 else K._enc([1 if t == j else 0 for t in range(d)])
            z = LaurentSeries.monomial(v, code, k, kz * Q + 2)
            cols.append(polar(pa(z)))
            units.append(z)
    nrow = (-low) * d
    rows = [[col[i] for col in cols] for i in range(nrow)]
    out = []
    for tag, w in targets:
        rhs = polar(w)
        if rhs is None:
            out.append(DivisionClass(tag, False))
            continue
        if not cols:
            ok = not any(rhs)
            out.append(DivisionClass(tag, ok, LaurentSeries.zero(v, 1) if ok else None))
            continue
        sol = linalg.solve(F, rows, len(cols), rhs)
        if sol is None:
            out.append(DivisionClass(tag, False))
            continue
        z = LaurentSeries.zero(v, 1)
        for c, u in zip(sol, units):
            if c:
                z = z + u.scale(c).truncate(1)
        out.append(DivisionClass(tag, True, z))
    return out
