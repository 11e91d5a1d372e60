"""Elliptic curves over Q: Szpiro ratio, mu(E, N, (n!)) and the lower bound
for mu in terms of the Szpiro ratio, from ingested per-prime reduction data.

Quantities like sum w ord log p are kept as exact combinations of log p.
Ratios of combinations are exact Fractions when the combinations are
proportional and certified rational intervals otherwise.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from mpmath import iv
from mpmath.libmp import to_rational

from .errors import (InvariantViolation, NotSemistable, NTooSmall, ParseError,
                     PrecisionExhausted, TrivialConductor)

HEADER = ["label", "p", "ord_delta", "ord_cond", "ord_j", "weight"]
INTERVAL_WIDTH = Fraction(1, 10 ** 6)
MAX_BITS = 4096
ONE = {0: Fraction(1)}  # key 0 stands for the constant 1, key p for log p


@dataclass(frozen=True)
class EllipticLocalData:
    p: int
    ord_delta: int
    ord_conductor: int
    ord_j: int
    weight: Fraction = Fraction(1)

    @property
    def semistable(self):
        return self.ord_conductor <= 1

    @property
    def multiplicative(self):
        return self.ord_conductor == 1


@dataclass(frozen=True)
class CurveRecord:
    label: str
    local_data: tuple

    @property
    def semistable(self):
        return all(d.semistable for d in self.local_data)


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __str__(self):
        return "[%s, %s]" % (self.lo, self.hi)

    @property
    def width(self):
        return self.hi - self.lo


# ----------------------------------------------------------------------
# ingestion
# ----------------------------------------------------------------------

def _int(row, key, lineno):
    try:
        return int(row[key])
    except (TypeError, ValueError):
        raise ParseError("row %d: %s must be an integer, got %r" % (lineno, key, row[key])) from None


def _check_row(d, lineno):
    if d.p < 2 or any(d.p % k == 0 for k in range(2, int(d.p ** 0.5) + 1)):
        raise InvariantViolation("row %d: p = %d is not prime" % (lineno, d.p))
    if d.ord_delta < 0 or d.ord_conductor < 0:
        raise InvariantViolation("row %d: negative order" % lineno)
    if d.weight <= 0:
        raise InvariantViolation("row %d: weight must be positive" % lineno)
    if d.ord_conductor == 1 and (d.ord_j >= 0 or -d.ord_j != d.ord_delta):
        raise InvariantViolation(
            "row %d: multiplicative reduction needs ord_j = -ord_delta < 0" % lineno)
    if d.ord_conductor == 0 and (d.ord_delta != 0 or d.ord_j < 0):
        raise InvariantViolation("row %d: good reduction needs ord_delta = 0, ord_j >= 0" % lineno)


def ingest_text(text):
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        return []
    if [f.strip() for f in reader.fieldnames] != HEADER:
        raise ParseError("expected header %s" % ",".join(HEADER))
    records = {}
    for lineno, row in enumerate(reader, start=2):
        row = {k.strip(): (v.strip() if isinstance(v, str) else v) for k, v in row.items()}
        if None in row or any(row[k] in (None, "") for k in HEADER):
            raise ParseError("row %d: wrong number of fields" % lineno)
        try:
            w = Fraction(row["weight"])
        except (ValueError, ZeroDivisionError):
            raise ParseError("row %d: bad weight %r" % (lineno, row["weight"])) from None
        d = EllipticLocalData(_int(row, "p", lineno), _int(row, "ord_delta", lineno),
                              _int(row, "ord_cond", lineno), _int(row, "ord_j", lineno), w)
        _check_row(d, lineno)
        records.setdefault(row["label"], []).append(d)
    return [CurveRecord(lbl, tuple(ds)) for lbl, ds in records.items()]


def ingest_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return ingest_text(fh.read())


# ----------------------------------------------------------------------
# combinations sum c_p log p
# ----------------------------------------------------------------------

def _loglin(pairs):
    out = {}
    for p, c in pairs:
        if c:
            out[p] = out.get(p, Fraction(0)) + Fraction(c)
    return {p: c for p, c in out.items() if c}


def _proportional(a, b):
    """c with a = c b, or None."""
    if set(a) != set(b):
        return None
    ratios = {a[p] / b[p] for p in a}
    return ratios.pop() if len(ratios) == 1 else None


def _iv_eval(comb, bits):
    iv.prec = bits
    total = iv.mpf(0)
    for p, c in comb.items():
        total += iv.mpf(c.numerator) / c.denominator * _iv_log(p)
    return total


def _iv_log(p):
    return iv.mpf(1) if p == 0 else iv.log(p)


def _iv_bounds(x):
    a, b = x._mpi_
    (an, ad), (bn, bd) = to_rational(a), to_rational(b)
    return Fraction(int(an), int(ad)), Fraction(int(bn), int(bd))


def ratio(a, b):
    """a / b for log combinations: exact when proportional, else an interval."""
    if not b:
        raise ZeroDivisionError("empty denominator")
    if not a:
        return Fraction(0)
    c = _proportional(a, b)
    if c is not None:
        return c
    bits = 64
    while bits <= MAX_BITS:
        old = iv.prec
        try:
            lo, hi = _iv_bounds(_iv_eval(a, bits) / _iv_eval(b, bits))
        finally:
            iv.prec = old
        if hi - lo < INTERVAL_WIDTH:
            return Interval(lo, hi)
        bits *= 2
    raise PrecisionExhausted("could not bracket the ratio")


def _sign(quad):
    """Sign of sum c * A * B over (c, A, B) with A, B log combinations."""
    form = {}
    for c, A, B in quad:
        for p, x in A.items():
            for q, y in B.items():
                key = (min(p, q), max(p, q))
                form[key] = form.get(key, Fraction(0)) + c * x * y
    form = {k: v for k, v in form.items() if v}
    if not form:
        return 0
    if len(form) == 1:
        (v,) = form.values()
        return 1 if v > 0 else -1
    bits = 64
    while bits <= MAX_BITS:
        old = iv.prec
        iv.prec = bits
        try:
            tot = iv.mpf(0)
            for (p, q), v in form.items():
                tot += iv.mpf(v.numerator) / v.denominator * _iv_log(p) * _iv_log(q)
            lo, hi = _iv_bounds(tot)
        finally:
            iv.prec = old
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        bits *= 2
    raise PrecisionExhausted("sign undecided at %d bits" % MAX_BITS)


# ----------------------------------------------------------------------
# Szpiro ratio and mu
# ----------------------------------------------------------------------

def _delta_cond(rec):
    d = _loglin((x.p, x.weight * x.ord_delta) for x in rec.local_data)
    f = _loglin((x.p, x.weight * x.ord_conductor) for x in rec.local_data)
    return d, f


def szpiro_ratio(rec):
    d, f = _delta_cond(rec)
    if not f:
        raise TrivialConductor("conductor is 1 for %s" % rec.label)
    return ratio(d, f)


def _j_terms(rec):
    """Places with j_v > 0 as (data, log combination of j_v)."""
    return [(x, _loglin([(x.p, x.weight * -x.ord_j)])) for x in rec.local_data if x.ord_j < 0]


def _in_S(x, n):
    """Component group not killed by n!."""
    nf = factorial(n)
    if x.multiplicative:
        return nf % (-x.ord_j) != 0
    return nf % 12 != 0  # additive: group of order <= 4


def _mu_parts(rec, N, n):
    terms = _j_terms(rec)
    S_E = {i for i, (x, _) in enumerate(terms) if _in_S(x, n)}
    best = None
    for k in range(min(N, len(terms)) + 1):
        for S in itertools.combinations(range(len(terms)), k):
            den = _loglin(itertools.chain.from_iterable(
                t.items() for i, (_, t) in enumerate(terms) if i not in S))
            num = _loglin(itertools.chain.from_iterable(
                t.items() for i, (_, t) in enumerate(terms) if i not in S and i not in S_E))
            if not den:
                num, den = ONE, ONE
            if best is None or _sign([(Fraction(1), num, best[1]),
                                      (Fraction(-1), best[0], den)]) > 0:
                best = (num, den)
    return best


def _ratio_or_one(num, den):
    if num == ONE and den == num:
        return Fraction(1)
    return ratio(num, den)


def mu_elliptic(rec, N, n):
    if n < 1:
        raise ValueError("n must be at least 1")
    num, den = _mu_parts(rec, N, n)
    return _ratio_or_one(num, den)


def theorem_check(rec, n):
    """mu(E, 0, (n!)) >= (1 - sigma/n) / (sigma (1 - 1/n)), decided exactly."""
    if not rec.semistable:
        raise NotSemistable("%s has additive reduction" % rec.label)
    d, f = _delta_cond(rec)
    if not f:
        raise TrivialConductor("conductor is 1 for %s" % rec.label)
    # n > sigma  <=>  n f - d > 0
    if _sign([(Fraction(n), f, ONE), (Fraction(-1), d, ONE)]) <= 0:
        raise NTooSmall("n = %d does not exceed the Szpiro ratio" % n)
    num, den = _mu_parts(rec, 0, n)
    if num == ONE and den == num:
        num_c, den_c = {}, {}
        exact_one = True
    else:
        num_c, den_c = num, den
        exact_one = False
    # rhs = (n f - d) / ((n - 1) d), with sigma = d / f
    rnum = _loglin(list((p, n * c) for p, c in f.items()) + [(p, -c) for p, c in d.items()])
    rden = _loglin((p, (n - 1) * c) for p, c in d.items())
    if exact_one:
        # 1 >= rnum / rden  <=>  rden - rnum >= 0
        ok = _sign([(Fraction(1), rden, ONE),
                    (Fraction(-1), rnum, ONE)]) >= 0
        lhs = Fraction(1)
    else:
        ok = _sign([(Fraction(1), num_c, rden), (Fraction(-1), rnum, den_c)]) >= 0
        lhs = ratio(num_c, den_c)
    rhs = ratio(rnum, rden)
    return ok, lhs, rhs
