"""Exact arithmetic in F_q, A = F_q[T], L = F_q(t), places of L, and heights.

Finite field elements are encoded as small integers: an element of
F_p[u]/(m(u)) with coordinates c_0, ..., c_{e-1} is stored as sum c_i p^i.
The same encoding is used one level up for residue fields, so an element of
a base field keeps its integer code inside any extension built on top of it.

Logarithms are exact Fractions in units of log q.
"""

from __future__ import annotations

import ast
import math
import random
from fractions import Fraction
from functools import lru_cache
from itertools import product as _iproduct

from .errors import ParseError, ZeroArgument

INF = math.inf


# ----------------------------------------------------------------------
# finite fields
# ----------------------------------------------------------------------

def _factor_int(n):
    out, d = {}, 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_power(q):
    """Return (p, e) with q = p**e, or None if q is not a prime power."""
    if not isinstance(q, int) or q < 2:
        return None
    f = _factor_int(q)
    if len(f) != 1:
        return None
    (p, e), = f.items()
    return p, e


class PrimeField:
    """F_p with elements 0..p-1."""

    is_prime = True

    def __init__(self, p):
        self.p = p
        self.char = p
        self.size = p
        self.degree = 1
        self.base = None

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of 0 in F_%d" % self.p)
        return pow(a, self.p - 2, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, n):
        if n < 0:
            a, n = self.inv(a), -n
        return pow(a, n, self.p)

    def from_int(self, n):
        return n % self.p

    def elements(self):
        return range(self.p)

    def fmt(self, a):
        return str(a)

    def __repr__(self):
        return "GF(%d)" % self.p


class ExtensionField:
    """base[u]/(modulus), modulus monic irreducible over base (low degree first)."""

    is_prime = False
    _TABLE_LIMIT = 256

    def __init__(self, base, modulus, gen="g"):
        self.base = base
        self.modulus = tuple(modulus)
        self.degree = len(modulus) - 1
        self.char = base.char
        self.p = base.char
        self.size = base.size ** self.degree
        self.gen = gen
        self._mul_t = self._add_t = self._inv_t = None
        self._memo = {}
        if self.size <= self._TABLE_LIMIT:
            self._build_tables()

    # encoding
    def _dec(self, a):
        Q, out = self.base.size, []
        for _ in range(self.degree):
            a, r = divmod(a, Q)
            out.append(r)
        return out

    def _enc(self, c):
        Q, a = self.base.size, 0
        for x in reversed(c):
            a = a * Q + x
        return a

    def _raw_mul(self, a, b):
        B = self.base
        x, y = self._dec(a), self._dec(b)
        prod = _pmul(B, x, y)
        _, r = _pdivmod(B, prod, list(self.modulus))
        r = r + [0] * (self.degree - len(r))
        return self._enc(r)

    def _raw_add(self, a, b):
        B = self.base
        return self._enc([B.add(x, y) for x, y in zip(self._dec(a), self._dec(b))])

    def _build_tables(self):
        n = self.size
        self._add_t = [[self._raw_add(a, b) for b in range(n)] for a in range(n)]
        self._mul_t = [[0] * n for _ in range(n)]
        for a in range(1, n):
            row = self._mul_t[a]
            for b in range(a, n):
                row[b] = self._mul_t[b][a] = self._raw_mul(a, b)
        self._inv_t = [0] * n
        for a in range(1, n):
            for b in range(1, n):
                if self._mul_t[a][b] == 1:
                    self._inv_t[a] = b
                    break

    def add(self, a, b):
        if self._add_t is not None:
            return self._add_t[a][b]
        return self._raw_add(a, b)

    def neg(self, a):
        B = self.base
        return self._enc([B.neg(x) for x in self._dec(a)])

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self._mul_t is not None:
            return self._mul_t[a][b]
        if a == 0 or b == 0:
            return 0
        key = (a, b) if a <= b else (b, a)
        r = self._memo.get(key)
        if r is None:
            r = self._memo[key] = self._raw_mul(a, b)
        return r

    def pow(self, a, n):
        if n < 0:
            a, n = self.inv(a), -n
        r = 1
        while n:
            if n & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            n >>= 1
        return r

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        if self._inv_t is not None:
            return self._inv_t[a]
        return self.pow(a, self.size - 2)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def from_int(self, n):
        return self.base.from_int(n)

    def elements(self):
        return range(self.size)

    def fmt(self, a):
        c = self._dec(a)
        terms = []
        for i in range(len(c) - 1, -1, -1):
            if c[i] == 0:
                continue
            cs = self.base.fmt(c[i])
            if self.base.degree > 1 and i > 0:
                cs = "(%s)" % cs
            if i == 0:
                terms.append(cs)
            else:
                mono = self.gen if i == 1 else "%s^%d" % (self.gen, i)
                terms.append(mono if cs == "1" else "%s*%s" % (cs, mono))
        return "+".join(terms) if terms else "0"

    def __repr__(self):
        return "GF(%d)" % self.size


@lru_cache(maxsize=None)
def GF(q):
    """The finite field with q elements (cached, one instance per q)."""
    pe = prime_power(q)
    if pe is None:
        raise ValueError("q = %r is not a prime power" % (q,))
    p, e = pe
    Fp = PrimeField(p)
    if e == 1:
        return Fp
    for tail in _iproduct(range(p), repeat=e):
        m = list(tail) + [1]
        if m[0] != 0 and _is_irreducible(Fp, m):
            return ExtensionField(Fp, m)
    raise AssertionError("no irreducible polynomial found")


class FqElem:
    """A wrapped field element, convenient for interactive use."""

    __slots__ = ("F", "v")

    def __init__(self, F, v):
        self.F = F
        self.v = v

    def _c(self, other):
        if isinstance(other, FqElem):
            return other.v
        return self.F.from_int(other)

    def __add__(self, o):
        return FqElem(self.F, self.F.add(self.v, self._c(o)))

    __radd__ = __add__

    def __sub__(self, o):
        return FqElem(self.F, self.F.sub(self.v, self._c(o)))

    def __rsub__(self, o):
        return FqElem(self.F, self.F.sub(self._c(o), self.v))

    def __mul__(self, o):
        return FqElem(self.F, self.F.mul(self.v, self._c(o)))

    __rmul__ = __mul__

    def __neg__(self):
        return FqElem(self.F, self.F.neg(self.v))

    def __truediv__(self, o):
        return FqElem(self.F, self.F.div(self.v, self._c(o)))

    def __pow__(self, n):
        return FqElem(self.F, self.F.pow(self.v, n))

    def __eq__(self, o):
        if isinstance(o, FqElem):
            return self.F is o.F and self.v == o.v
        if isinstance(o, int):
            return self.v == self.F.from_int(o)
        return NotImplemented

    def __hash__(self):
        return hash((self.F.size, self.v))

    def __repr__(self):
        return self.F.fmt(self.v)


# ----------------------------------------------------------------------
# dense polynomials over a field object: lists, low degree first
# ----------------------------------------------------------------------

def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _padd(F, a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    if F.is_prime:
        p = F.p
        for i, y in enumerate(b):
            out[i] = (out[i] + y) % p
    else:
        for i, y in enumerate(b):
            out[i] = F.add(out[i], y)
    return _trim(out)


def _pneg(F, a):
    return [F.neg(x) for x in a]


def _psub(F, a, b):
    return _padd(F, a, _pneg(F, b))


def _pscale(F, a, c):
    if c == 0:
        return []
    return _trim([F.mul(x, c) for x in a])


def _pmul(F, a, b):
    if not a or not b:
        return []
    if F.is_prime:
        p = F.p
        out = [0] * (len(a) + len(b) - 1)
        nzb = [(j, y) for j, y in enumerate(b) if y]
        for i, x in enumerate(a):
            if x:
                for j, y in nzb:
                    out[i + j] += x * y
        return _trim([v % p for v in out])
    out = [0] * (len(a) + len(b) - 1)
    add, mul = F.add, F.mul
    nzb = [(j, y) for j, y in enumerate(b) if y]
    for i, x in enumerate(a):
        if x:
            for j, y in nzb:
                out[i + j] = add(out[i + j], mul(x, y))
    return _trim(out)


def _pdivmod(F, a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    db = len(b) - 1
    if len(a) - 1 < db:
        return [], _trim(a)
    inv_lc = F.inv(b[-1])
    qt = [0] * (len(a) - db)
    if F.is_prime:
        p = F.p
        for k in range(len(a) - 1 - db, -1, -1):
            c = (a[k + db] * inv_lc) % p
            if c:
                qt[k] = c
                for j, y in enumerate(b):
                    if y:
                        a[k + j] = (a[k + j] - c * y) % p
    else:
        for k in range(len(a) - 1 - db, -1, -1):
            c = F.mul(a[k + db], inv_lc)
            if c:
                qt[k] = c
                for j, y in enumerate(b):
                    if y:
                        a[k + j] = F.sub(a[k + j], F.mul(c, y))
    return _trim(qt), _trim(a[:db])


def _pmod(F, a, b):
    return _pdivmod(F, a, b)[1]


def _pmonic(F, a):
    if not a:
        return a
    return _pscale(F, a, F.inv(a[-1]))


def _pgcd(F, a, b):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(F, a, b)
    return _pmonic(F, a)


def _pxgcd(F, a, b):
    """Return (g, s, t) with s*a + t*b = g monic."""
    r0, r1 = _trim(list(a)), _trim(list(b))
    s0, s1, t0, t1 = [1], [], [], [1]
    while r1:
        qt, r = _pdivmod(F, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _psub(F, s0, _pmul(F, qt, s1))
        t0, t1 = t1, _psub(F, t0, _pmul(F, qt, t1))
    if not r0:
        return [], [], []
    c = F.inv(r0[-1])
    return _pscale(F, r0, c), _pscale(F, s0, c), _pscale(F, t0, c)


def _ppowmod(F, a, n, m):
    r = [1]
    a = _pmod(F, a, m)
    while n:
        if n & 1:
            r = _pmod(F, _pmul(F, r, a), m)
        a = _pmod(F, _pmul(F, a, a), m)
        n >>= 1
    return r


def _pderiv(F, a):
    return _trim([F.mul(F.from_int(i), a[i]) for i in range(1, len(a))])


def _is_irreducible(F, f):
    """Rabin's test for a monic polynomial f over F."""
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    Q = F.size
    x = [0, 1]
    # x^(Q^k) mod f, k = 1..n
    powers = [None] * (n + 1)
    cur = x
    for k in range(1, n + 1):
        cur = _ppowmod(F, cur, Q, f)
        powers[k] = cur
    if _trim(_psub(F, powers[n], x)):
        return False
    for r in _factor_int(n):
        g = _pgcd(F, f, _psub(F, powers[n // r], x))
        if len(g) > 1:
            return False
    return True


# ----------------------------------------------------------------------
# A = F_q[T]
# ----------------------------------------------------------------------

class PolyA:
    """An element of F_q[T], stored as an immutable coefficient tuple."""

    __slots__ = ("F", "c", "_h")

    def __init__(self, F, coeffs):
        self.F = F
        self.c = tuple(_trim(list(coeffs)))
        self._h = None

    @classmethod
    def from_ints(cls, F, coeffs):
        return cls(F, [F.from_int(x) if isinstance(x, int) and x >= F.size else x for x in coeffs])

    @classmethod
    def t(cls, F):
        return cls(F, [0, 1])

    @classmethod
    def const(cls, F, c):
        return cls(F, [c])

    @property
    def deg(self):
        return len(self.c) - 1 if self.c else -INF

    @property
    def lc(self):
        return self.c[-1] if self.c else 0

    def is_zero(self):
        return not self.c

    def is_monic(self):
        return bool(self.c) and self.c[-1] == 1

    def _wrap(self, lst):
        return PolyA(self.F, lst)

    def _coerce(self, o):
        if isinstance(o, PolyA):
            return o
        if isinstance(o, int):
            return PolyA(self.F, [self.F.from_int(o)])
        return NotImplemented

    def __add__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return self._wrap(_padd(self.F, list(self.c), list(o.c)))

    __radd__ = __add__

    def __neg__(self):
        return self._wrap(_pneg(self.F, self.c))

    def __sub__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return self._wrap(_psub(self.F, list(self.c), list(o.c)))

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return self._wrap(_pmul(self.F, self.c, o.c))

    __rmul__ = __mul__

    def scale(self, c):
        return self._wrap(_pscale(self.F, self.c, c))

    def __pow__(self, n):
        r, a = PolyA(self.F, [1]), self
        while n:
            if n & 1:
                r = r * a
            a = a * a
            n >>= 1
        return r

    def __divmod__(self, o):
        qt, r = _pdivmod(self.F, self.c, o.c)
        return self._wrap(qt), self._wrap(r)

    def __floordiv__(self, o):
        return divmod(self, o)[0]

    def __mod__(self, o):
        return divmod(self, o)[1]

    def __eq__(self, o):
        if isinstance(o, PolyA):
            return self.F is o.F and self.c == o.c
        if isinstance(o, int):
            return self == self._coerce(o)
        return NotImplemented

    def __hash__(self):
        if self._h is None:
            self._h = hash((self.F.size, self.c))
        return self._h

    def __bool__(self):
        return bool(self.c)

    def monic(self):
        return self._wrap(_pmonic(self.F, list(self.c)))

    def gcd(self, o):
        return self._wrap(_pgcd(self.F, self.c, o.c))

    def xgcd(self, o):
        g, s, t = _pxgcd(self.F, self.c, o.c)
        return self._wrap(g), self._wrap(s), self._wrap(t)

    def derivative(self):
        return self._wrap(_pderiv(self.F, self.c))

    def frobenius(self, k=1):
        """self**(q**k); coefficients lie in F_q so only exponents move."""
        if not self.c or k == 0:
            return self
        Q = self.F.size ** k
        out = [0] * ((len(self.c) - 1) * Q + 1)
        for i, x in enumerate(self.c):
            out[i * Q] = x
        return self._wrap(out)

    def __call__(self, x):
        F = self.F
        r = 0
        for a in reversed(self.c):
            r = F.add(F.mul(r, x), a)
        return r

    def key(self):
        """Sort key: degree, then coefficients from the top down."""
        return (len(self.c), tuple(reversed(self.c)))

    def is_irreducible(self):
        if self.deg < 1:
            return False
        return _is_irreducible(self.F, _pmonic(self.F, list(self.c)))

    def factor(self):
        """Monic irreducible factorization as a sorted list of (factor, exponent)."""
        return factor_poly(self)

    def __repr__(self):
        return fmt_poly(self)


def fmt_poly(f, var="t"):
    F = f.F
    if not f.c:
        return "0"
    terms = []
    for i in range(len(f.c) - 1, -1, -1):
        a = f.c[i]
        if a == 0:
            continue
        cs = F.fmt(a)
        compound = not F.is_prime and ("+" in cs or "*" in cs or "^" in cs)
        if i == 0:
            terms.append("(%s)" % cs if compound else cs)
            continue
        mono = var if i == 1 else "%s^%d" % (var, i)
        if cs == "1":
            terms.append(mono)
        else:
            terms.append("%s*%s" % ("(%s)" % cs if compound else cs, mono))
    return " + ".join(terms)


# factorization over F_q: square-free, distinct-degree, equal-degree

def _pth_root(F, f):
    """f = g(t^p)^... ; return h with h^p = f (f a p-th power)."""
    p = F.char
    e_over_p = F.size // p  # Frobenius inverse on F_q is x -> x^(q/p)
    out = [f[i] for i in range(0, len(f), p)]
    if F.is_prime:
        return out
    return [F.pow(x, e_over_p) for x in out]


def _squarefree(F, f):
    """Yield (g, m) with f = prod g^m, g squarefree, f monic."""
    res = []
    i = 1
    d = _pderiv(F, f)
    if not d:
        for g, m in _squarefree(F, _pth_root(F, f)):
            res.append((g, m * F.char))
        return res
    c = _pgcd(F, f, d)
    w = _pdivmod(F, f, c)[0]
    while len(w) > 1:
        y = _pgcd(F, w, c)
        z = _pdivmod(F, w, y)[0]
        if len(z) > 1:
            res.append((z, i))
        i += 1
        w = y
        c = _pdivmod(F, c, y)[0]
    if len(c) > 1:
        for g, m in _squarefree(F, _pth_root(F, c)):
            res.append((g, m * F.char))
    return res


def _ddf(F, f):
    out = []
    Q = F.size
    x = [0, 1]
    h = x
    d = 0
    while len(f) - 1 >= 2 * (d + 1):
        d += 1
        h = _ppowmod(F, h, Q, f)
        g = _pgcd(F, f, _psub(F, h, x))
        if len(g) > 1:
            out.append((g, d))
            f = _pdivmod(F, f, g)[0]
            h = _pmod(F, h, f)
    if len(f) > 1:
        out.append((f, len(f) - 1))
    return out


def _edf(F, f, d, rng):
    n = len(f) - 1
    if n == d:
        return [f]
    Q = F.size
    while True:
        a = _trim([rng.randrange(Q) for _ in range(n)])
        if len(a) < 2:
            continue
        if F.char == 2:
            # trace map a + a^2 + ... + a^(2^(k d - 1)), Q = 2^k
            k = Q.bit_length() - 1
            tr, cur = list(a), list(a)
            for _ in range(k * d - 1):
                cur = _pmod(F, _pmul(F, cur, cur), f)
                tr = _padd(F, tr, cur)
            b = tr
        else:
            b = _psub(F, _ppowmod(F, a, (Q ** d - 1) // 2, f), [1])
        g = _pgcd(F, f, b)
        if 0 < len(g) - 1 < n:
            return (_edf(F, g, d, rng) + _edf(F, _pdivmod(F, f, g)[0], d, rng))


@lru_cache(maxsize=4096)
def _factor_cached(F, coeffs):
    f = _pmonic(F, list(coeffs))
    rng = random.Random(0x5eed)
    out = {}
    for g, m in _squarefree(F, f):
        for h, d in _ddf(F, g):
            for irr in _edf(F, h, d, rng):
                key = tuple(irr)
                out[key] = out.get(key, 0) + m
    return tuple(sorted(out.items(), key=lambda kv: (len(kv[0]), tuple(reversed(kv[0])))))


def factor_poly(f):
    if f.deg < 1:
        return []
    return [(PolyA(f.F, k), m) for k, m in _factor_cached(f.F, f.c)]


# ----------------------------------------------------------------------
# L = F_q(t)
# ----------------------------------------------------------------------

class RatFunc:
    """num/den in lowest terms with den monic."""

    __slots__ = ("num", "den", "_h")

    def __init__(self, num, den=None, _canonical=False):
        if den is None:
            den = PolyA(num.F, [1])
        if not _canonical:
            if den.is_zero():
                raise ZeroDivisionError("zero denominator")
            if num.is_zero():
                den = PolyA(num.F, [1])
            else:
                g = num.gcd(den)
                if g.deg > 0:
                    num, den = num // g, den // g
                lc = den.lc
                if lc != 1:
                    inv = num.F.inv(lc)
                    num, den = num.scale(inv), den.scale(inv)
        self.num = num
        self.den = den
        self._h = None

    @property
    def F(self):
        return self.num.F

    @property
    def q(self):
        return self.num.F.size

    @classmethod
    def t(cls, F):
        return cls(PolyA(F, [0, 1]))

    @classmethod
    def const(cls, F, c):
        return cls(PolyA(F, [c]))

    @classmethod
    def from_int(cls, F, n):
        return cls(PolyA(F, [F.from_int(n)]))

    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_constant(self):
        return self.num.deg <= 0 and self.den.deg == 0

    def _coerce(self, o):
        if isinstance(o, RatFunc):
            return o
        if isinstance(o, PolyA):
            return RatFunc(o)
        if isinstance(o, int):
            return RatFunc.from_int(self.F, o)
        return NotImplemented

    def __add__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, _canonical=True)

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
            return RatFunc(PolyA(self.F, []))
        # cross-cancel before multiplying
        g1 = self.num.gcd(o.den)
        g2 = o.num.gcd(self.den)
        n1, d2 = (self.num // g1, o.den // g1) if g1.deg > 0 else (self.num, o.den)
        n2, d1 = (o.num // g2, self.den // g2) if g2.deg > 0 else (o.num, self.den)
        return RatFunc(n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RatFunc(self.den, self.num)

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
        return RatFunc(self.num ** n, self.den ** n, _canonical=True)

    def frobenius(self, k=1):
        """x**(q**k), cheap because coefficients are fixed by Frobenius."""
        return RatFunc(self.num.frobenius(k), self.den.frobenius(k), _canonical=True)

    def __eq__(self, o):
        if isinstance(o, (int, PolyA)):
            o = self._coerce(o)
        if isinstance(o, RatFunc):
            return self.num == o.num and self.den == o.den
        return NotImplemented

    def __hash__(self):
        if self._h is None:
            self._h = hash((self.num, self.den))
        return self._h

    def support(self):
        """Finite places where self has a zero or a pole."""
        out = set()
        for f in (self.num, self.den):
            for g, _ in factor_poly(f):
                out.add(Place.finite(g, _checked=True))
        return out

    def __repr__(self):
        return fmt_ratfunc(self)


def fmt_ratfunc(x, var="t"):
    ns = fmt_poly(x.num, var)
    if x.den.deg == 0:
        return ns
    ds = fmt_poly(x.den, var)
    if " " in ns:
        ns = "(%s)" % ns
    if " " in ds or "*" in ds:
        ds = "(%s)" % ds
    return "%s/%s" % (ns, ds)


def zero(F):
    return RatFunc(PolyA(F, []))


def one(F):
    return RatFunc(PolyA(F, [1]))


# ----------------------------------------------------------------------
# places
# ----------------------------------------------------------------------

class Place:
    """Either the infinite place or a monic irreducible polynomial."""

    __slots__ = ("poly", "F")

    def __init__(self, F, poly=None):
        self.F = F
        self.poly = poly

    @classmethod
    def infinity(cls, F):
        return cls(F, None)

    @classmethod
    def finite(cls, poly, _checked=False):
        if not _checked:
            if not poly.is_monic():
                raise ValueError("place polynomial %r is not monic" % (poly,))
            if not poly.is_irreducible():
                raise ValueError("place polynomial %r is not irreducible" % (poly,))
        return cls(poly.F, poly)

    @property
    def is_infinite(self):
        return self.poly is None

    @property
    def deg(self):
        return 1 if self.poly is None else self.poly.deg

    def key(self):
        if self.poly is None:
            return (0, ())
        return self.poly.key()

    def __lt__(self, o):
        return self.key() < o.key()

    def __eq__(self, o):
        if not isinstance(o, Place):
            return NotImplemented
        return self.F is o.F and self.poly == o.poly

    def __hash__(self):
        return hash(("place", self.F.size, self.poly))

    def __repr__(self):
        return "inf" if self.poly is None else fmt_poly(self.poly)


def _ord_poly(f, p):
    n = 0
    while True:
        qt, r = divmod(f, p)
        if not r.is_zero():
            return n
        n += 1
        f = qt


def valuation(x, v):
    """Normalized valuation; +inf for zero. Accepts RatFunc or PolyA."""
    if isinstance(x, PolyA):
        x = RatFunc(x)
    if x.is_zero():
        return INF
    if v.is_infinite:
        return x.den.deg - x.num.deg
    return _ord_poly(x.num, v.poly) - _ord_poly(x.den, v.poly)


def log_abs(x, v):
    """log|x|_v in units of log q."""
    if isinstance(x, PolyA):
        x = RatFunc(x)
    if x.is_zero():
        raise ZeroArgument("log|0| is undefined")
    return Fraction(-valuation(x, v) * v.deg)


def log_plus(x, v):
    if isinstance(x, PolyA):
        x = RatFunc(x)
    if x.is_zero():
        return Fraction(0)
    return max(Fraction(0), log_abs(x, v))


def relevant_places(xs):
    """inf together with the union of the supports of the nonzero xs, sorted."""
    xs = [x for x in xs if not x.is_zero()]
    if not xs:
        return []
    F = xs[0].F
    s = set()
    for x in xs:
        s |= x.support()
    return [Place.infinity(F)] + sorted(s)


def product_formula_check(x):
    if x.is_zero():
        raise ZeroArgument("product formula needs x != 0")
    return sum((log_abs(x, v) for v in relevant_places([x])), Fraction(0))


def height(x):
    if isinstance(x, PolyA):
        x = RatFunc(x)
    if x.is_zero():
        return Fraction(0)
    return sum((log_plus(x, v) for v in relevant_places([x])), Fraction(0))


class WeightedPoint:
    """A point of weighted projective space over L."""

    __slots__ = ("coords", "weights")
    __hash__ = None

    def __init__(self, coords, weights):
        coords, weights = tuple(coords), tuple(int(w) for w in weights)
        if not coords or len(coords) != len(weights):
            raise ValueError("coords and weights must be nonempty and equally long")
        if all(x.is_zero() for x in coords):
            raise ValueError("all coordinates are zero")
        if any(w <= 0 for w in weights):
            raise ValueError("weights must be positive")
        self.coords = coords
        self.weights = weights

    def scale(self, alpha):
        return WeightedPoint([alpha ** w * x for x, w in zip(self.coords, self.weights)],
                             self.weights)

    def __eq__(self, o):
        if not isinstance(o, WeightedPoint):
            return NotImplemented
        if self.weights != o.weights:
            return False
        zs = [x.is_zero() for x in self.coords]
        if zs != [y.is_zero() for y in o.coords]:
            return False
        idx = [i for i, z in enumerate(zs) if not z]
        ratios = [(o.coords[i] / self.coords[i], self.weights[i]) for i in idx]
        r0, w0 = ratios[0]
        return all(r ** w0 == r0 ** w for r, w in ratios[1:])

    def __repr__(self):
        return "[%s] w=%s" % (" : ".join(map(repr, self.coords)), self.weights)


def weighted_height(P):
    places = relevant_places(P.coords)
    total = Fraction(0)
    for v in places:
        total += max(log_abs(x, v) / w for x, w in zip(P.coords, P.weights)
                     if not x.is_zero())
    return total


def monic_polys(F, d):
    """All monic polynomials of exact degree d, in place order."""
    for tail in _iproduct(range(F.size), repeat=d):
        yield PolyA(F, list(reversed(tail)) + [1])


def enumerate_places(F, max_deg):
    if max_deg < 1:
        raise ValueError("max_deg must be >= 1")
    out = [Place.infinity(F)]
    for d in range(1, max_deg + 1):
        out.extend(Place.finite(f, _checked=True) for f in monic_polys(F, d)
                   if f.is_irreducible())
    return out


def necklace_count(q, d):
    """Number of monic irreducibles of degree d over F_q."""
    total = 0
    for k in range(1, d + 1):
        if d % k == 0:
            total += _mobius(d // k) * q ** k
    return total // d


def _mobius(n):
    f = _factor_int(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


# ----------------------------------------------------------------------
# parsing
# ----------------------------------------------------------------------

_ALLOWED_BIN = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)


def parse_expr(text):
    """Parse an arithmetic expression into a Python AST (validated)."""
    src = text.strip().replace("^", "**")
    if not src:
        raise ParseError("empty expression")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ParseError("cannot parse %r: %s" % (text, exc.msg)) from None
    for node in ast.walk(tree):
        if isinstance(node, (ast.Expression, ast.Load)):
            continue
        if isinstance(node, ast.BinOp) and isinstance(node.op, _ALLOWED_BIN):
            continue
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            continue
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            continue
        if isinstance(node, ast.Name):
            continue
        if isinstance(node, _ALLOWED_BIN + (ast.USub, ast.UAdd)):
            continue
        raise ParseError("unsupported syntax in %r" % (text,))
    return tree.body


def eval_expr(node, F, env):
    """Evaluate a parsed expression; env maps names to RatFunc values."""
    if isinstance(node, ast.Constant):
        return RatFunc.from_int(F, node.value)
    if isinstance(node, ast.Name):
        if node.id in env:
            return env[node.id]
        raise ParseError("unknown symbol %r" % node.id)
    if isinstance(node, ast.UnaryOp):
        v = eval_expr(node.operand, F, env)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node.op, ast.Pow):
        base = eval_expr(node.left, F, env)
        ex = node.right
        sign = 1
        if isinstance(ex, ast.UnaryOp) and isinstance(ex.op, ast.USub):
            sign, ex = -1, ex.operand
        if not (isinstance(ex, ast.Constant) and isinstance(ex.value, int)):
            raise ParseError("exponents must be integer literals")
        if sign < 0 and base.is_zero():
            raise ParseError("division by zero")
        return base ** (sign * ex.value)
    a = eval_expr(node.left, F, env)
    b = eval_expr(node.right, F, env)
    if isinstance(node.op, ast.Add):
        return a + b
    if isinstance(node.op, ast.Sub):
        return a - b
    if isinstance(node.op, ast.Mult):
        return a * b
    if b.is_zero():
        raise ParseError("division by zero")
    return a / b


def base_env(F):
    env = {"t": RatFunc.t(F), "T": RatFunc.t(F)}
    if not F.is_prime:
        env["g"] = RatFunc.const(F, F.base.size)  # code of the generator u
    return env


def parse_ratfunc(text, F, extra=None):
    env = base_env(F)
    if extra:
        env.update(extra)
    return eval_expr(parse_expr(text), F, env)


def parse_poly(text, F):
    x = parse_ratfunc(text, F)
    if x.den.deg != 0:
        raise ParseError("%r is not a polynomial" % text)
    return x.num


def parse_place(text, F):
    s = text.strip()
    if s.lower() in ("inf", "infinity", "oo"):
        return Place.infinity(F)
    f = parse_poly(s, F)
    try:
        return Place.finite(f)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
