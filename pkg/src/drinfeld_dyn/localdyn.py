"""Per-place dynamics of a Drinfeld module: local invariants, Julia sets,
local heights, genericity and the component module F(L_v)/phi^0(L_v).

All log values are exact Fractions in units of log q.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil

from . import linalg
from .drinfeld import LocalDrinfeldModule, phi_image
from .errors import (BudgetExceeded, ConstantArgument, NotASubgroup,
                     NotInJuliaSet, PrecisionExhausted, ZeroArgument,
                     InvariantViolation)
from .funcfield import PolyA, RatFunc, valuation
from .localfield import LaurentSeries, embed, newton_polygon, residue_field

# orbit steps allowed when deciding Julia membership at an infinite place
INF_ORBIT_STEPS = 12
INF_ORBIT_MAX_DEG = 1 << 14


# ----------------------------------------------------------------------
# valuations of whatever the coefficients happen to be
# ----------------------------------------------------------------------

def _val(c, v):
    """v(c) or None when c is zero (to known precision)."""
    if isinstance(c, LaurentSeries):
        return None if c.is_zero() else c.valuation()
    if isinstance(c, int):
        return None if c == 0 else 0
    if c.is_zero():
        return None
    return valuation(c, v)


def _check_place(phi, v):
    if isinstance(phi, LocalDrinfeldModule) and phi.place != v:
        raise ValueError("local module lives at %r, not %r" % (phi.place, v))


def _coeff_vals(phi, v):
    _check_place(phi, v)
    return [_val(phi.a(i), v) for i in range(phi.rank + 1)]


def _log_abs(x, v):
    val = _val(x, v)
    if val is None:
        raise ZeroArgument("log|0| is -infinity")
    return Fraction(-val * v.deg)


def _log_plus_tinv(phi, v):
    vt = _val(phi.t, v)
    return Fraction(max(0, vt) * v.deg)


# ----------------------------------------------------------------------
# reports
# ----------------------------------------------------------------------

def c_of_phi(phi, v):
    q, r = phi.q, phi.rank
    vr = _val(phi.a(r), v)
    _check_place(phi, v)
    return Fraction(vr * v.deg, q ** r - 1)


@dataclass(frozen=True)
class LocalReport:
    place: object
    c_v: Fraction
    j_v: Fraction
    stable_rank: int
    s: int
    phi0_log_radius: object  # Fraction, or None at infinite places ({0})
    B_T_log: Fraction
    vj: Fraction
    q: int = field(default=0, repr=False)
    rank: int = field(default=0, repr=False)

    @property
    def r1(self):
        return self.stable_rank


def local_report(phi, v):
    cache = phi.__dict__.setdefault("_reports", {})
    rep = cache.get(v)
    if rep is None:
        rep = cache[v] = _local_report(phi, v)
    return rep


def _local_report(phi, v):
    q, r = phi.q, phi.rank
    vals = _coeff_vals(phi, v)
    norm = {i: Fraction(vals[i], q ** i - 1)
            for i in range(1, r + 1) if vals[i] is not None}
    m = min(norm.values())
    r1 = max(i for i, x in norm.items() if x == m)
    c = c_of_phi(phi, v)
    j = v.deg * (norm[r] - m)
    pts = [(q ** i, vals[i]) for i in range(r + 1) if vals[i] is not None]
    sigma = newton_polygon(pts).max_slope()
    B = sigma * v.deg + _log_plus_tinv(phi, v) / (q ** r - 1)
    rad = None if v.is_infinite else -j + c
    return LocalReport(v, c, j, r1, r - r1, rad, B, j / v.deg, q, r)


def j_of_subring_generator(phi, a, v):
    if a.deg < 1:
        raise ConstantArgument("a must be non-constant")
    q = phi.q
    pa = phi_image(phi, a)
    best = None
    for j in range(1, len(pa)):
        vj = _val(pa[j], v)
        if vj is None:
            continue
        x = Fraction(-vj * v.deg, q ** j - 1)
        best = x if best is None or x > best else best
    return best + c_of_phi(phi, v)


def phi0_contains(phi, v, x):
    if _val(x, v) is None:
        return True
    if v.is_infinite:
        return False
    rep = local_report(phi, v)
    return _log_abs(x, v) <= rep.phi0_log_radius


# ----------------------------------------------------------------------
# the class space F(L_v)/phi^0(L_v) at a finite place
# ----------------------------------------------------------------------

class _ClassSpace:
    """Truncated Laurent polynomials sum_{lo <= k < n0} c_k pi^k.

    phi^0(L_v) is exactly {v(x) >= n0}, and the filled Julia set lies in
    {v(x) >= lo}, so F(L_v)/phi^0(L_v) embeds in this finite F_q-space.
    phi_T induces an F_q-linear map on classes; the component module is the
    largest subspace that the map keeps inside the space.
    """

    def __init__(self, phi, v, rep, prec=None):
        if v.is_infinite:
            raise ValueError("the class space needs a finite place")
        self.phi, self.v, self.rep = phi, v, rep
        self.q = q = phi.q
        self.F = phi.F
        self.K = residue_field(v)
        self.d = v.deg
        self.n0 = ceil(-rep.phi0_log_radius / v.deg)
        self.lo = ceil(-rep.B_T_log / v.deg)
        r = phi.rank
        need = self.n0 - min(self.lo, 0) * q ** r + 1
        if prec is not None:
            need = max(need, prec)
        if isinstance(phi, LocalDrinfeldModule):
            if phi.prec < need:
                raise PrecisionExhausted(
                    "module known to pi^%d, class space needs pi^%d" % (phi.prec, need))
            coeffs = [phi.a(i) for i in range(r + 1)]
        else:
            coeffs = [embed(phi.a(i), v, need) for i in range(r + 1)]
        self.acoef = [(c.valuation(), c.coeffs) for c in coeffs]
        lows = [c.valuation() + q ** i * self.lo for i, c in enumerate(coeffs)
                if not c.is_zero()]
        self.lo_ext = min([self.lo] + lows)
        self._basis = None

    # classes as dicts k -> residue coefficient
    def image(self, c):
        K, q, n0 = self.K, self.q, self.n0
        fixed = K is self.F
        out = {}
        for k, b in c.items():
            for i, (va, cs) in enumerate(self.acoef):
                if not cs:
                    continue
                Q = q ** i
                bq = b if fixed else K.pow(b, Q)
                base = va + k * Q
                for jj, a in enumerate(cs):
                    e = base + jj
                    if e >= n0:
                        break
                    if a:
                        out[e] = K.add(out.get(e, 0), K.mul(a, bq))
        return {k: x for k, x in out.items() if x}

    def class_of(self, x):
        """Class of x mod phi^0 as a dict, exact for x in L or a precise series."""
        if isinstance(x, RatFunc):
            if x.is_zero():
                return {}
            s = embed(x, self.v, self.n0)
        else:
            if x.prec < self.n0:
                raise PrecisionExhausted("point known only to pi^%d" % x.prec)
            s = x
        return {s.valuation() + i: c for i, c in enumerate(s.coeffs)
                if c and s.valuation() + i < self.n0}

    # coordinates over F_q
    def _coords(self, c, lo):
        d, K = self.d, self.K
        n = (self.n0 - lo) * d
        vec = [0] * n
        for k, x in c.items():
            base = (k - lo) * d
            if d == 1:
                vec[base] = x
            else:
                for i, y in enumerate(K._dec(x)):
                    vec[base + i] = y
        return vec

    def vec(self, c):
        return self._coords(c, self.lo)

    def vec_ext(self, c):
        return self._coords(c, self.lo_ext)

    def unvec(self, vec):
        d, K = self.d, self.K
        out = {}
        for k in range(self.lo, self.n0):
            part = vec[(k - self.lo) * d:(k - self.lo + 1) * d]
            x = part[0] if d == 1 else K._enc(list(part))
            if x:
                out[k] = x
        return out

    @property
    def dim(self):
        return max(0, self.n0 - self.lo) * self.d

    def _unit(self, j):
        d = self.d
        k, i = divmod(j, d)
        code = 1 if d == 1 else self.K._enc([1 if t == i else 0 for t in range(d)])
        return {self.lo + k: code}

    def fixed_subspace(self):
        """Basis (P-coordinates) of the largest phi_T-stable subspace."""
        if self._basis is not None:
            return self._basis
        F = self.F
        N = self.dim
        if N == 0:
            self._basis = []
            return []
        shift = self.lo - self.lo_ext
        Next = (self.n0 - self.lo_ext) * self.d
        img = [self.vec_ext(self.image(self._unit(j))) for j in range(N)]
        basis = [[1 if i == j else 0 for i in range(N)] for j in range(N)]
        while basis:
            nb = len(basis)
            # unknowns (y, z): Phi(B y) - E(B z) = 0
            rows = []
            for row in range(Next):
                lhs = [_dot(F, [img[j][row] for j in range(N)], b) for b in basis]
                prow = row - shift * self.d
                rhs = [F.neg(b[prow]) if 0 <= prow < N else 0 for b in basis]
                rows.append(lhs + rhs)
            ker = linalg.kernel(F, rows, 2 * nb)
            ys = [k[:nb] for k in ker]
            new = [[_dot(F, [basis[i][col] for i in range(nb)], y) for col in range(N)]
                   for y in ys]
            red, _ = linalg.rref(F, new, N) if new else ([], [])
            red = [r for r in red if any(r)]
            if len(red) == nb:
                break
            basis = red
        self._basis = basis
        return basis


def _dot(F, a, b):
    acc = 0
    for x, y in zip(a, b):
        if x and y:
            acc = F.add(acc, F.mul(x, y))
    return acc


def _class_space(phi, v, prec=None):
    cache = getattr(phi, "_class_spaces", None)
    if cache is None:
        cache = {}
        try:
            phi._class_spaces = cache
        except AttributeError:
            pass
    key = (v, prec)
    if key not in cache:
        cache[key] = _ClassSpace(phi, v, local_report(phi, v), prec)
    return cache[key]


# ----------------------------------------------------------------------
# filled Julia set
# ----------------------------------------------------------------------

def julia_contains(phi, v, x):
    if _val(x, v) is None:
        return True
    rep = local_report(phi, v)
    if _log_abs(x, v) > rep.B_T_log:
        return False
    if v.is_infinite:
        return _julia_orbit(phi, v, x, rep)
    cs = _class_space(phi, v)
    basis = cs.fixed_subspace()
    bound = component_size_bound(rep)
    if phi.q ** len(basis) > bound:
        raise BudgetExceeded(
            "component module of size q^%d exceeds the bound %d" % (len(basis), bound),
            partial="not escaped, no annihilator within the bound")
    c = cs.class_of(x)
    if any(k < cs.lo for k in c):
        return False
    vec = cs.vec(c)
    if not any(vec):
        return True
    return linalg.coordinates(phi.F, basis, vec) is not None


def _julia_orbit(phi, v, x, rep):
    """Infinite place: follow the exact orbit of x in L until it escapes or cycles."""
    if not isinstance(x, RatFunc):
        raise PrecisionExhausted("Julia membership at infinity needs an exact point")
    T = phi.phi_T
    seen = {x}
    y = x
    for _ in range(INF_ORBIT_STEPS):
        y = T(y)
        if y.is_zero() or y in seen:
            return True
        if _log_abs(y, v) > rep.B_T_log:
            return False
        if max(y.num.deg, y.den.deg) > INF_ORBIT_MAX_DEG:
            break
        seen.add(y)
    raise BudgetExceeded("orbit neither escaped nor cycled",
                         partial="not escaped after %d steps" % len(seen))


# ----------------------------------------------------------------------
# local heights
# ----------------------------------------------------------------------

def local_height(phi, v, x, check=True):
    if _val(x, v) is None:
        raise ZeroArgument("local height of 0")
    if check and not julia_contains(phi, v, x):
        raise NotInJuliaSet("point is outside the filled Julia set at %r" % (v,))
    return -_log_abs(x, v) + c_of_phi(phi, v)


@dataclass(frozen=True)
class HeightDecomposition:
    lambda_: Fraction
    B_part: Fraction
    E_part: Fraction
    coset_trivial: bool

    @property
    def lam(self):
        return self.lambda_


def height_decompose(phi, v, x):
    lam = local_height(phi, v, x)
    if phi0_contains(phi, v, x):
        B = local_report(phi, v).j_v
        return HeightDecomposition(lam, B, lam - B, True)
    return HeightDecomposition(lam, lam, Fraction(0), False)


# ----------------------------------------------------------------------
# genericity and the subgroup refinement
# ----------------------------------------------------------------------

def _phi_a(phi, T_poly):
    if T_poly is None:
        return phi.phi_T
    if T_poly.deg < 1:
        raise ConstantArgument("T_poly must be non-constant")
    return phi_image(phi, T_poly)


def _apply(phi, v, f, x):
    if isinstance(phi, LocalDrinfeldModule) and isinstance(x, RatFunc):
        x = embed(x, v, phi.prec)
    return f(x)


def is_T_generic(phi, v, x, T_poly=None):
    vx = _val(x, v)
    if vx is None:
        return True
    f = _phi_a(phi, T_poly)
    q = phi.q
    terms = [_val(c, v) for c in f.coeffs]
    m = min(vi + q ** i * vx for i, vi in enumerate(terms) if vi is not None)
    y = _apply(phi, v, f, x)
    vy = _val(y, v)
    if vy is None:
        if isinstance(y, LaurentSeries):
            if y.prec <= m:
                raise PrecisionExhausted("phi_T(x) vanishes to precision %d" % y.prec)
        return False
    return vy == m


def _zkey(phi, v, x, f, T_poly):
    """Which Z-set x lies in: 'g' for generic points, else its disk (v, lead)."""
    if is_T_generic(phi, v, x, T_poly):
        return "g"
    vx = _val(x, v)
    s = embed(x, v, vx + 1) if isinstance(x, RatFunc) else x
    return (vx, s.lead())


def additive_closure(elems, zero):
    group = {zero}
    for s in elems:
        if s in group:
            continue
        layer = set(group)
        cur = s
        while not cur.is_zero():
            layer |= {g + cur for g in group}
            cur = cur + s
        group = layer
    return group


def _check_subgroup(X):
    if not X:
        raise NotASubgroup("empty set")
    x = next(iter(X))
    zero = x - x
    if zero not in X:
        raise NotASubgroup("0 is missing")
    for a in X:
        for b in X:
            if a + b not in X:
                raise NotASubgroup("not closed under addition")
    return zero


@dataclass
class RefineTrace:
    subgroup: set
    generators: set
    steps: int
    keys: list


def refine_trace(phi, X, v, T_poly=None):
    """The refinement with its bookkeeping; see refine_generic_subgroup."""
    X = set(X)
    zero = _check_subgroup(X)
    f = _phi_a(phi, T_poly)
    R = phi.rank * (1 if T_poly is None else T_poly.deg)
    cur = X
    keys = []
    for step in range(2 * R + 1):
        classes = {}
        for y in cur:
            k = (_zkey(phi, v, y, f, T_poly),
                 _zkey(phi, v, _apply(phi, v, f, y), f, T_poly))
            classes.setdefault(k, set()).add(y)
        order = sorted(classes, key=lambda k: (-len(classes[k]), k != ("g", "g"), repr(k)))
        best = order[0]
        keys.append(best)
        chosen = classes[best]
        if best == ("g", "g"):
            return RefineTrace(additive_closure(chosen, zero), chosen, step + 1, keys)
        x0 = min(chosen, key=repr)
        cur = {y - x0 for y in chosen}
    raise InvariantViolation("refinement did not settle within %d steps" % (2 * R + 1))


def refine_generic_subgroup(phi, X, v, T_poly=None):
    return refine_trace(phi, X, v, T_poly).subgroup


def generic_lambda_bound(phi, v, T_poly=None):
    """(1 - 1/q) j_{phi_T,v} - log+|T^-1|_v / (q (q^(r deg T - 1))^2)."""
    q = phi.q
    a = T_poly if T_poly is not None else PolyA(phi.F, [0, 1])
    R = phi.rank * a.deg
    lp = _log_abs_plus_inv(a, phi, v)
    j = j_of_subring_generator(phi, a, v)
    return (1 - Fraction(1, q)) * j - lp / (q * (q ** (R - 1)) ** 2)


def genericity_radius(phi, v, T_poly=None):
    """c(phi) + log+|T^-1|_v / (q^(r deg T) - 1)^2."""
    q = phi.q
    a = T_poly if T_poly is not None else PolyA(phi.F, [0, 1])
    R = phi.rank * a.deg
    return c_of_phi(phi, v) + _log_abs_plus_inv(a, phi, v) / (q ** R - 1) ** 2


def _log_abs_plus_inv(a, phi, v):
    x = RatFunc(a)
    return Fraction(max(0, valuation(x, v)) * v.deg)


# ----------------------------------------------------------------------
# component module
# ----------------------------------------------------------------------

def component_size_bound(report):
    s = report.s
    if s == 0:
        return 1
    vj = ceil(report.vj)
    return 2 * report.q ** ((vj * s + 2 * s + 1) * (vj + 2) * s)


@dataclass
class ComponentModule:
    invariant_factors: list
    size: int
    complete: bool = True
    dim: int = 0
    action: list = field(default_factory=list, repr=False)
    basis: list = field(default_factory=list, repr=False)
    space: object = field(default=None, repr=False)

    def torsion_count(self, a):
        """#M[a]: the kernel of a(T) acting on M."""
        if not self.dim:
            return 1
        F = self.space.F
        n = self.dim
        A = self.action
        acc = [[0] * n for _ in range(n)]
        for c in reversed(a.c):
            acc = _matmul(F, acc, A)
            for i in range(n):
                acc[i][i] = F.add(acc[i][i], c)
        return F.size ** len(linalg.kernel(F, acc, n))

    def points(self):
        """Class representatives as dicts k -> residue coefficient."""
        return [self.space.unvec(list(p)) for p in linalg.span(self.space.F, self.basis)]


def _matmul(F, A, B):
    n = len(A)
    return [[_dot(F, A[i], [B[k][j] for k in range(n)]) for j in range(n)]
            for i in range(n)]


def component_module(phi, v, prec=None):
    if v.is_infinite:
        raise ValueError("component module is defined at finite places")
    rep = local_report(phi, v)
    if ceil(-rep.phi0_log_radius / v.deg) <= ceil(-rep.B_T_log / v.deg):
        return ComponentModule([], 1, True)  # no room between phi^0 and the B_T disk
    cs = _class_space(phi, v, prec)
    basis = cs.fixed_subspace()
    F = phi.F
    if not basis:
        return ComponentModule([], 1, True, 0, [], [], cs)
    images = [cs.vec(cs.image(cs.unvec(b))) for b in basis]
    A = linalg.orbit_matrix(F, basis, images)
    inv = linalg.invariant_factors(F, A)
    size = F.size ** len(basis)
    M = ComponentModule(inv, size, True, len(basis), A, basis, cs)
    if rep.s == 0 or size > component_size_bound(rep):
        raise InvariantViolation(
            "component module of size %d violates the size bound" % size)
    return M
