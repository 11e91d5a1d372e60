"""Completions L_v as truncated Laurent series, Newton polygons, local roots.

A completion L_v is modelled as k_v((pi)) where k_v is the residue field:
pi = p(t) at a finite place p and pi = 1/t at infinity.  For a place of degree
d > 1 the image of t is the Hensel root of p(X) = pi lifting the class of u in
k_v = F_q[u]/(p(u)).

Precision is absolute: a series with prec N is known modulo pi^N.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

from .errors import (DegeneratePolynomial, HenselHypothesisFailed,
                     NeedsExtension, PrecisionExhausted)
from .funcfield import ExtensionField, RatFunc

CERT_MARGIN = 2


@lru_cache(maxsize=None)
def _residue_field_cached(F, coeffs):
    return ExtensionField(F, coeffs, gen="u")


def residue_field(v):
    """k_v: F_q at infinity and at degree-one places, else F_q[u]/(p(u))."""
    if v.is_infinite or v.deg == 1:
        return v.F
    return _residue_field_cached(v.F, v.poly.c)


class LaurentSeries:
    """sum_{k >= val} c_k pi^k + O(pi^prec) over the residue field of a place."""

    __slots__ = ("place", "K", "val", "coeffs", "prec")

    def __init__(self, place, val, coeffs, prec, K=None):
        self.place = place
        self.K = K if K is not None else residue_field(place)
        coeffs = list(coeffs[:max(0, prec - val)])
        i = 0
        while i < len(coeffs) and coeffs[i] == 0:
            i += 1
        if i == len(coeffs):
            self.val, self.coeffs = prec, ()
        else:
            self.val, self.coeffs = val + i, tuple(coeffs[i:])
        self.prec = prec

    # construction helpers
    @classmethod
    def zero(cls, place, prec):
        return cls(place, prec, (), prec)

    @classmethod
    def constant(cls, place, c, prec):
        return cls(place, 0, (c,), prec)

    @classmethod
    def monomial(cls, place, c, k, prec):
        return cls(place, k, (c,), prec)

    def _new(self, val, coeffs, prec):
        return LaurentSeries(self.place, val, coeffs, prec, self.K)

    # basic queries
    def is_zero(self):
        return not self.coeffs

    def valuation(self):
        """v(self); for a series that is zero to known precision returns prec."""
        return self.val

    def lead(self):
        return self.coeffs[0] if self.coeffs else 0

    def coefficient(self, k):
        if k >= self.prec:
            raise PrecisionExhausted("coefficient %d beyond precision %d" % (k, self.prec))
        if k < self.val or k - self.val >= len(self.coeffs):
            return 0
        return self.coeffs[k - self.val]

    def truncate(self, prec):
        if prec >= self.prec:
            return self
        return self._new(self.val, self.coeffs, prec)

    def with_prec(self, prec):
        """Declare an exact series to be known to a larger precision (pad with zeros)."""
        return self._new(self.val, self.coeffs, prec)

    def shift(self, k):
        """Multiply by pi^k."""
        return self._new(self.val + k, self.coeffs, self.prec + k)

    def scale(self, c):
        K = self.K
        return self._new(self.val, [K.mul(c, x) for x in self.coeffs], self.prec)

    # arithmetic
    def _coerce(self, o):
        if isinstance(o, LaurentSeries):
            return o
        if isinstance(o, int):
            return LaurentSeries.constant(self.place, self.K.from_int(o), self.prec)
        if isinstance(o, RatFunc):
            return embed(o, self.place, self.prec)
        return NotImplemented

    def __add__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        prec = min(self.prec, o.prec)
        lo = min(self.val, o.val, prec)
        n = prec - lo
        out = [0] * n
        K = self.K
        for s in (self, o):
            off = s.val - lo
            for i, x in enumerate(s.coeffs):
                j = off + i
                if j >= n:
                    break
                if x:
                    out[j] = K.add(out[j], x)
        return self._new(lo, out, prec)

    __radd__ = __add__

    def __neg__(self):
        K = self.K
        return self._new(self.val, [K.neg(x) for x in self.coeffs], self.prec)

    def __sub__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        if self.is_zero() or o.is_zero():
            if self.is_zero() and o.is_zero():
                p = self.prec + o.prec
            elif self.is_zero():
                p = self.prec + o.val
            else:
                p = o.prec + self.val
            return self._new(p, (), p)
        val = self.val + o.val
        rel = min(self.prec - self.val, o.prec - o.val)
        a, b = self.coeffs[:rel], o.coeffs[:rel]
        K = self.K
        out = [0] * rel
        if K.is_prime:
            p = K.p
            nzb = [(j, y) for j, y in enumerate(b) if y]
            for i, x in enumerate(a):
                if x:
                    lim = rel - i
                    for j, y in nzb:
                        if j >= lim:
                            break
                        out[i + j] += x * y
            out = [c % p for c in out]
        else:
            add, mul = K.add, K.mul
            nzb = [(j, y) for j, y in enumerate(b) if y]
            for i, x in enumerate(a):
                if x:
                    lim = rel - i
                    for j, y in nzb:
                        if j >= lim:
                            break
                        out[i + j] = add(out[i + j], mul(x, y))
        return self._new(val, out, val + rel)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise PrecisionExhausted("inverting a series that is zero to precision %d"
                                     % self.prec)
        K = self.K
        rel = self.prec - self.val
        a = self.coeffs
        inv0 = K.inv(a[0])
        out = [0] * rel
        out[0] = inv0
        for n in range(1, rel):
            s = 0
            for i in range(1, min(n, len(a) - 1) + 1):
                if a[i] and out[n - i]:
                    s = K.add(s, K.mul(a[i], out[n - i]))
            out[n] = K.neg(K.mul(s, inv0))
        return self._new(-self.val, out, -self.val + rel)

    def __truediv__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, o):
        return self._coerce(o) * self.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return self._new(0, (1,), max(1, self.prec - self.val))
        out, a = None, self
        while True:
            if n & 1:
                out = a if out is None else out * a
            n >>= 1
            if not n:
                return out
            a = a * a

    def frobenius(self, k=1):
        """self ** (q**k) with q = #F_q, exact in characteristic p."""
        Q = self.place.F.size ** k
        K = self.K
        cs = self.coeffs
        if not cs:
            return self._new(self.prec * Q, (), self.prec * Q)
        fixed = K is self.place.F  # Frobenius is trivial on F_q
        out = [0] * ((len(cs) - 1) * Q + 1)
        for i, x in enumerate(cs):
            out[i * Q] = x if (fixed or not x) else K.pow(x, Q)
        rel = (self.prec - self.val) * Q
        return self._new(self.val * Q, out, self.val * Q + rel)

    def __eq__(self, o):
        if not isinstance(o, LaurentSeries):
            return NotImplemented
        p = min(self.prec, o.prec)
        return (self - o).val >= p

    __hash__ = None

    def __repr__(self):
        K = self.K
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            k = self.val + i
            cs = K.fmt(c)
            if not K.is_prime and ("+" in cs or "*" in cs):
                cs = "(%s)" % cs
            mono = "" if k == 0 else ("pi" if k == 1 else "pi^%d" % k)
            if not mono:
                terms.append(cs)
            elif cs == "1":
                terms.append(mono)
            else:
                terms.append("%s*%s" % (cs, mono))
        terms.append("O(pi^%d)" % self.prec if self.prec != 1 else "O(pi)")
        return " + ".join(terms)


# ----------------------------------------------------------------------
# embedding L -> L_v
# ----------------------------------------------------------------------

def _ord_split(f, p):
    k = 0
    while True:
        qt, r = divmod(f, p)
        if not r.is_zero():
            return k, f
        k += 1
        f = qt


def _poly_at_series(poly, s, rel_prec):
    """Horner evaluation of an F_q polynomial at a unit series s (coeffs in K)."""
    place = s.place
    acc = LaurentSeries(place, rel_prec, (), rel_prec, s.K)
    for c in reversed(poly.c):
        acc = acc * s + LaurentSeries(place, 0, (c,), rel_prec, s.K)
    return acc


@lru_cache(maxsize=256)
def _t_series(place, rel_prec):
    """Image of t in k_v[[pi]] at a finite place of degree > 1."""
    K = residue_field(place)
    p = place.poly
    dp = p.derivative()
    x = LaurentSeries(place, 0, (place.F.size,), rel_prec, K)  # the class of u
    pi = LaurentSeries(place, 1, (1,), rel_prec, K)
    for _ in range(rel_prec.bit_length() + 2):
        fx = _poly_at_series(p, x, rel_prec) - pi
        if fx.is_zero():
            break
        x = x - fx / _poly_at_series(dp, x, rel_prec)
    return x


def _shift_poly(poly, c, K):
    """Coefficients of poly(c + pi) as a list over K (Taylor shift)."""
    out = []
    cur = list(poly.c)
    F = poly.F
    while cur:
        # synthetic division by (X - c)
        n = len(cur)
        qt = [0] * (n - 1)
        acc = 0
        for i in range(n - 1, -1, -1):
            acc = F.add(F.mul(acc, c), cur[i])
            if i > 0:
                qt[i - 1] = acc
        out.append(acc)
        cur = qt
        while cur and cur[-1] == 0:
            cur.pop()
    return out


def embed(x, v, prec):
    """Expansion of x in L_v with absolute precision prec."""
    K = residue_field(v)
    if x.is_zero():
        return LaurentSeries(v, prec, (), prec, K)
    if v.is_infinite:
        val = x.den.deg - x.num.deg
        rel = prec - val
        if rel <= 0:
            return LaurentSeries(v, prec, (), prec, K)
        n = LaurentSeries(v, 0, tuple(reversed(x.num.c)), rel, K)
        d = LaurentSeries(v, 0, tuple(reversed(x.den.c)), rel, K)
        return (n / d).shift(val)
    kn, n0 = _ord_split(x.num, v.poly)
    kd, d0 = _ord_split(x.den, v.poly)
    val = kn - kd
    rel = prec - val
    if rel <= 0:
        return LaurentSeries(v, prec, (), prec, K)
    if v.deg == 1:
        c = v.F.neg(v.poly.c[0])
        n = LaurentSeries(v, 0, _shift_poly(n0, c, K), rel, K)
        d = LaurentSeries(v, 0, _shift_poly(d0, c, K), rel, K)
    else:
        ts = _t_series(v, rel)
        n = _poly_at_series(n0, ts, rel)
        d = _poly_at_series(d0, ts, rel)
    return (n / d).shift(val)


def series_to_ratfunc_deg1(s, F):
    """A Laurent polynomial at a degree-one place, read back as an element of L."""
    v = s.place
    pi = RatFunc.t(F).inverse() if v.is_infinite else RatFunc(v.poly)
    out = RatFunc.from_int(F, 0)
    for i, c in enumerate(s.coeffs):
        if c:
            out = out + RatFunc.const(F, c) * pi ** (s.val + i)
    return out


# ----------------------------------------------------------------------
# Newton polygons
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class NewtonPolygon:
    points: tuple
    vertices: tuple
    segments: tuple  # (slope, length)

    def root_valuations(self):
        """Map root valuation -> count (roots with valuation -slope per segment)."""
        out = {}
        for s, l in self.segments:
            out[-s] = out.get(-s, 0) + l
        return out

    def max_slope(self):
        return max(s for s, _ in self.segments)


def newton_polygon(points):
    """Lower convex hull of (x, y) points; y may be None for a zero coefficient."""
    pts = sorted((int(x), Fraction(y)) for x, y in points
                 if y is not None and y != float("inf"))
    if len(pts) < 2:
        raise DegeneratePolynomial("need at least two finite points")
    # keep lowest y for duplicate x
    dedup = {}
    for x, y in pts:
        if x not in dedup or y < dedup[x]:
            dedup[x] = y
    pts = sorted(dedup.items())
    hull = []
    for pnt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # remove hull[-1] if it is on or above the chord hull[-2] -> pnt
            if (y2 - y1) * (pnt[0] - x1) >= (pnt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pnt)
    segs = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        segs.append((Fraction(y2 - y1) / (x2 - x1), x2 - x1))
    return NewtonPolygon(tuple(pts), tuple(hull), tuple(segs))


# ----------------------------------------------------------------------
# polynomials over L_v: dict exponent -> LaurentSeries
# ----------------------------------------------------------------------

def _as_series_poly(f, v, prec):
    out = {}
    items = f.items() if isinstance(f, dict) else enumerate(f)
    for e, c in items:
        if c is None:
            continue
        if isinstance(c, RatFunc):
            if c.is_zero():
                continue
            c = embed(c, v, prec)
        elif isinstance(c, int):
            if c == 0:
                continue
            c = LaurentSeries.constant(v, residue_field(v).from_int(c), prec)
        if c.is_zero():
            continue
        out[e] = c
    return out


def poly_eval(f, x):
    """f(x) for f a dict exponent -> series; powers q^k use Frobenius."""
    total = None
    Q = x.place.F.size
    cache = {1: x}
    for e in sorted(f):
        c = f[e]
        if e == 0:
            term = c
        else:
            xe = cache.get(e)
            if xe is None:
                k, m = 0, e
                while m % Q == 0:
                    m //= Q
                    k += 1
                if m == 1:
                    xe = x.frobenius(k)
                else:
                    xe = x ** e
                cache[e] = xe
            term = c * xe
        total = term if total is None else total + term
    return total


def poly_deriv(f):
    out = {}
    for e, c in f.items():
        if e == 0:
            continue
        m = e % c.K.char
        if m:
            out[e - 1] = c.scale(c.K.from_int(m))
    return out


def _is_affine_additive(f, Q):
    for e in f:
        if e == 0:
            continue
        while e % Q == 0:
            e //= Q
        if e != 1:
            return False
    return True


def _translate(f, x0, Q):
    """g(y) = f(x0 + y)."""
    if _is_affine_additive(f, Q):
        g = {e: c for e, c in f.items() if e != 0}
        g[0] = poly_eval(f, x0)
        return g
    K = x0.K
    g = {}
    powers = {0: None}
    for e, c in f.items():
        for k in range(e + 1):
            b = comb(e, k) % K.char
            if not b:
                continue
            if e - k == 0:
                term = c
            else:
                if (e - k) not in powers or powers[e - k] is None:
                    powers[e - k] = x0 ** (e - k)
                term = c * powers[e - k]
            if b != 1:
                term = term.scale(K.from_int(b))
            g[k] = term if k not in g else g[k] + term
    return {k: c for k, c in g.items() if not c.is_zero()}


def _residual_roots(coeffs, K):
    """Nonzero roots of sum coeffs[i] u^i in K with multiplicities."""
    out = []
    for u in K.elements():
        if u == 0:
            continue
        # evaluate and count multiplicity by repeated synthetic division
        cur = list(coeffs)
        m = 0
        while len(cur) > 1:
            n = len(cur)
            qt = [0] * (n - 1)
            acc = 0
            for i in range(n - 1, -1, -1):
                acc = K.add(K.mul(acc, u), cur[i])
                if i > 0:
                    qt[i - 1] = acc
            if acc != 0:
                break
            m += 1
            cur = qt
        if m:
            out.append((u, m))
    return out


@dataclass
class RootReport:
    valuation_multiset: dict
    rational_roots: list = field(default_factory=list)
    zero_multiplicity: int = 0
    unresolved: list = field(default_factory=list)
    complete: bool = True

    def nonzero_roots(self):
        return [r for r, _ in self.rational_roots if not r.is_zero()]

    def rows(self):
        """CSV rows (slope, count, rational, certified)."""
        out = []
        for s in sorted(self.valuation_multiset, key=lambda m: -m):
            slope = -s
            rs = [(r, c) for r, c in self.rational_roots
                  if not r.is_zero() and r.valuation() == s]
            out.append((slope, self.valuation_multiset[s], len(rs),
                        sum(1 for _, c in rs if c)))
        return out


def hensel_lift(f, a, v, target_prec, K=None):
    """Newton iteration from a, after checking |h(u)| < |h'(u)|^2 for the
    integral normalization h(u) = pi^(-b) f(pi^m u), m = v(a)."""
    f = _as_series_poly(f, v, target_prec + 8) if not _is_series_dict(f) else f
    if isinstance(a, RatFunc):
        a = embed(a, v, target_prec + 8)
    if not f:
        raise DegeneratePolynomial("zero polynomial")
    fa = poly_eval(f, a)
    if fa.is_zero() and fa.prec >= target_prec:
        return a.truncate(target_prec)
    df = poly_deriv(f)
    if not df:
        raise HenselHypothesisFailed("f' vanishes identically")
    dfa = poly_eval(df, a)
    m = a.valuation() if not a.is_zero() else 0
    b = min(c.valuation() + m * e for e, c in f.items())
    vh = fa.valuation() - b
    vdh = (dfa.valuation() + m - b) if not dfa.is_zero() else None
    if vdh is None or not vh > 2 * vdh:
        raise HenselHypothesisFailed("Hensel hypothesis fails at the approximation")
    return _newton(f, df, a, target_prec)


def _is_series_dict(f):
    return isinstance(f, dict) and all(isinstance(c, LaurentSeries) for c in f.values())


def _newton(f, df, x, target_prec, max_iter=64):
    """Newton iteration until the correction has valuation >= target_prec."""
    for _ in range(max_iter):
        fx = poly_eval(f, x)
        if fx.is_zero():
            if fx.prec >= target_prec + _dval(df, x):
                return x.truncate(target_prec)
        dfx = poly_eval(df, x)
        if dfx.is_zero():
            raise PrecisionExhausted("derivative vanished to working precision")
        step = fx / dfx
        if step.is_zero() and step.prec < target_prec:
            raise PrecisionExhausted("lift stalled at precision %d" % step.prec)
        x_new = x - step
        if step.valuation() >= target_prec:
            return x_new.truncate(target_prec)
        if x_new.prec < target_prec and x_new.prec <= x.prec and step.valuation() <= x.valuation():
            raise PrecisionExhausted("lift stalled at precision %d" % x_new.prec)
        x = x_new
    raise PrecisionExhausted("Newton iteration did not converge")


def _dval(df, x):
    d = poly_eval(df, x)
    return d.valuation()


def certify(f, r, prec, margin=CERT_MARGIN):
    """r is certified when v(f(r)) - v(f'(r)) >= prec - margin, i.e. the true
    root lies within pi^(prec - margin) of r."""
    df = poly_deriv(f)
    if not df:
        return False
    fr = poly_eval(f, r)
    dfr = poly_eval(df, r)
    if dfr.is_zero():
        return False
    return fr.valuation() - dfr.valuation() >= prec - margin


def local_roots(f, v, prec, require_split=False, max_depth=None):
    """Roots in L_v of f (dict or list exponent -> RatFunc/LaurentSeries/int).

    The Newton polygon gives the full valuation profile over C_v.  Integral
    slopes are explored through their residual polynomials: simple residual
    roots are Hensel-lifted, repeated ones are refined by translating and
    recursing on the shifted polynomial.  A cluster whose residual has no
    root in k_v contains no L_v-rational root, so the search is complete
    unless the recursion depth runs out.
    """
    retry = not _has_series(f)
    for attempt in (0, 1):
        work = prec * (2 if attempt else 1)
        try:
            return _local_roots(f, v, prec, work, require_split, max_depth)
        except PrecisionExhausted:
            if attempt or not retry:
                raise
    raise AssertionError("unreachable")


def _has_series(f):
    items = f.values() if isinstance(f, dict) else f
    return any(isinstance(c, LaurentSeries) for c in items)


def _local_roots(f0, v, prec, work, require_split, max_depth):
    K = residue_field(v)
    Q = v.F.size
    f = _as_series_poly(f0, v, 2 * work + 16)
    if not f:
        raise DegeneratePolynomial("zero polynomial")
    emin, emax = min(f), max(f)
    if emax == emin:
        rep = RootReport({}, [], emin)
        if emin:
            rep.rational_roots.append((LaurentSeries.zero(v, prec), True))
        return rep
    poly = newton_polygon([(e, c.valuation()) for e, c in f.items()])
    report = RootReport(poly.root_valuations(), [], emin)
    if emin:
        report.rational_roots.append((LaurentSeries.zero(v, prec), True))
    vals = [c.valuation() for c in f.values()]
    if max_depth is None:
        max_depth = prec + 2 * (max(vals) - min(vals)) + 8
    W = prec + max(vals) - min(vals) + 8
    roots = []
    _search(f, v, K, Q, prec, W, None, 0, max_depth, roots, report, None)
    for r in roots:
        report.rational_roots.append((r, certify(f, r, prec)))
    n_total = sum(report.valuation_multiset.values())
    if require_split and (len(roots) < n_total or not report.complete):
        raise NeedsExtension("%d of %d nonzero roots are L_v-rational" % (len(roots), n_total))
    return report


def _search(f, v, K, Q, prec, W, lower, depth, max_depth, roots, report, base):
    """Roots y of f with v(y) > lower (lower None: every nonzero root); each is
    recorded as base + y."""
    nz = {e: c for e, c in f.items() if not c.is_zero()}
    c0 = f.get(0)
    if base is not None and 0 not in nz:
        # y = 0 solves f up to the precision of the constant term
        e1 = min(nz) if nz else None
        if e1 is not None and e1 > 1:
            # f'(0) = 0: a repeated root that Hensel lifting cannot separate
            report.complete = False
            report.unresolved.append("repeated root at depth %d" % depth)
        elif c0 is not None and c0.prec - nz[1].valuation() < prec + CERT_MARGIN:
            raise PrecisionExhausted("constant term vanished to precision %d" % c0.prec)
        roots.append(base.truncate(prec))
    if len(nz) < 2:
        return
    poly = newton_polygon([(e, c.valuation()) for e, c in nz.items()])
    df = poly_deriv(nz)
    x = poly.vertices[0][0]
    for slope, length in poly.segments:
        x0, x = x, x + length
        m = -slope
        if lower is not None and m <= lower:
            continue
        if m.denominator != 1:
            continue  # roots of fractional valuation are never L_v-rational
        m = int(m)
        b = min(c.valuation() + m * e for e, c in nz.items())
        res = [0] * (length + 1)
        for e, c in nz.items():
            if x0 <= e <= x and c.valuation() + m * e == b:
                res[e - x0] = c.lead()
        for u, mult in _residual_roots(res, K):
            start = LaurentSeries(v, m, (u,), m + W, K)
            if mult == 1:
                r = _newton(nz, df, start, max(prec, m + 1))
                roots.append(r if base is None else (base + r).truncate(prec))
                continue
            if depth >= max_depth:
                report.complete = False
                report.unresolved.append("cluster unresolved at valuation %d" % m)
                raise PrecisionExhausted("root cluster not separated within depth budget")
            g = _translate(nz, start, Q)
            nb = start if base is None else base + start
            _search(g, v, K, Q, prec, W, m, depth + 1, max_depth, roots, report, nb)
