from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from drinfeld_dyn.drinfeld import DrinfeldModule, j_invariant, torsion_global
from drinfeld_dyn.errors import ParseError, ZeroArgument
from drinfeld_dyn.funcfield import (GF, Place, PolyA, RatFunc, monic_polys, parse_place,
                                    parse_ratfunc, relevant_places, valuation)
from drinfeld_dyn.globalmu import (adelic_check, bad_places, betas_up_to, family_scan,
                                   julia_rr_bound, mu, parse_family, per_place_j,
                                   S_of_ideal, torsion_bound, torsion_found)
from drinfeld_dyn.localdyn import component_module

from strategies import modules

# F_2: bad at (t) and (t+1); component module A/(t) at t+1
PHI2 = DrinfeldModule(2, ["1/t", "t^2+1"])
PHI3 = DrinfeldModule(3, ["1", "t"])


def poly(q, cs):
    return PolyA(GF(q), cs)


def test_carlitz_has_good_reduction():
    psi = DrinfeldModule.carlitz(3)
    T = poly(3, [0, 1])
    assert bad_places(psi) == set()
    assert mu(psi, 0, T).mu == 1
    ok, S = adelic_check(psi, T)
    assert ok and S == {Place.infinity(psi.F)}


def test_bad_places_example():
    assert bad_places(PHI3) == {parse_place("t", PHI3.F)}
    assert per_place_j(PHI3)[parse_place("t", PHI3.F)] == Fraction(1, 8)


def _j_oracle_rank2(phi, v):
    j = phi.a(1) ** (phi.q + 1) / phi.a(2)
    return max(Fraction(0), Fraction(-valuation(j, v) * v.deg, phi.q ** 2 - 1))


@given(st.sampled_from([2, 3]).flatmap(lambda q: modules(q=q, max_rank=2)))
def test_rank2_j_from_invariant(phi):
    assume(phi.rank == 2 and not phi.a(1).is_zero())
    pj = per_place_j(phi)
    for v in relevant_places(list(phi.coeffs)):
        assert pj[v] == _j_oracle_rank2(phi, v)


def test_S_of_ideal_uses_component_module():
    F = PHI2.F
    v = parse_place("t+1", F)
    M = component_module(PHI2, v)
    assert M.size == 2
    assert S_of_ideal(PHI2, poly(2, [0, 1])) == set()
    assert S_of_ideal(PHI2, poly(2, [0, 0, 1])) == set()
    assert S_of_ideal(PHI2, poly(2, [1, 1])) == {v}
    with pytest.raises(ZeroArgument):
        S_of_ideal(PHI2, poly(2, []))


def test_mu_values():
    # j at t is 1, at t+1 is 2/3; coprime ideal drops t+1
    a = poly(2, [1, 1])
    assert mu(PHI2, 0, a).mu == Fraction(3, 5)
    r = mu(PHI2, 1, a)
    assert r.mu == 1 and r.witness_S == frozenset({parse_place("t+1", PHI2.F)})
    assert mu(PHI2, 2, a).mu == 1
    assert mu(PHI2, 0, poly(2, [0, 1])).mu == 1
    with pytest.raises(ValueError):
        mu(PHI2, -1, a)


@given(modules(max_rank=2, max_deg=2), st.integers(0, 2))
@settings(max_examples=25)
def test_mu_monotone_and_bounded(phi, N):
    assume(phi.q <= 3)
    a = PolyA(phi.F, [1, 1])
    m0, m1 = mu(phi, N, a).mu, mu(phi, N + 1, a).mu
    assert 0 <= m0 <= m1 <= 1
    if N >= len([v for v in bad_places(phi) if not v.is_infinite]):
        assert m0 == 1


def test_adelic_check_with_coprime_ideal():
    ok, S = adelic_check(PHI2, poly(2, [1, 1]))
    assert ok and S == {Place.infinity(PHI2.F), parse_place("t+1", PHI2.F)}


def test_torsion_bound_values():
    T = poly(2, [0, 1])
    assert torsion_bound(1, 0, T) == 2 ** 5
    assert torsion_bound(2, 0, T) == 2 ** 18
    assert torsion_bound(1, 0, poly(3, [0, 1])) == 3 ** 5
    for r in (1, 2, 3):
        assert torsion_bound(r, 0, T) < torsion_bound(r, 1, T) < torsion_bound(r + 1, 1, T)


def _designed(q, x0, a2=None):
    F = GF(q)
    t = RatFunc.t(F)
    x = parse_ratfunc(x0, F)
    if a2 is None:
        return DrinfeldModule(q, [-(t * x) / x ** q])
    b = parse_ratfunc(a2, F)
    return DrinfeldModule(q, [-(t * x + b * x ** (q * q)) / x ** q, b])


@pytest.mark.parametrize("q,x0,a2", [(2, "1/t", None), (3, "1/t", "t"), (2, "t", None),
                                     (3, "1/(t+1)", None), (2, "1/t", "1")])
def test_torsion_found_matches_search(q, x0, a2):
    phi = _designed(q, x0, a2)
    n, how = torsion_found(phi)
    assert how in ("rr-orbit", "prefilter", "searched")
    F = phi.F
    expected = 1
    for d in (1, 2):
        for p in monic_polys(F, d):
            if p.is_irreducible():
                expected *= len(torsion_global(phi, p ** (2 // d)).points)
    assert n == expected
    assert n >= q  # x0 is T-torsion


def test_carlitz_torsion_over_F2():
    # C_T = t x + x^2 and C_{T+1} = (t+1) x + x^2 each have one rational nonzero root
    psi = DrinfeldModule.carlitz(2)
    Z, Dn, bound = julia_rr_bound(psi)
    assert bound >= 1
    assert torsion_found(psi) == (4, "rr-orbit")


def test_betas_order():
    F = GF(2)
    got = [(repr(b), h) for b, h in betas_up_to(F, 1)]
    assert got[0] == ("None", 0)
    assert [h for _, h in got] == sorted(h for _, h in got)
    # P^1(F_2(t)) has 1 + 2 points of height 0 and 6 of height 1
    assert len(got) == 1 + 2 + 6


def test_family_scan_small():
    spec = parse_family("q = 3\ncoeffs = [1, beta^3 - beta]\nparam = beta\n")
    scan = family_scan(spec, 1)
    rejected = dict(scan.rejected)
    assert set(rejected) == {"inf", "0", "1", "2"}
    assert len(scan.rows) == 24
    for row in scan.rows:
        assert "BOUND_VIOLATED" not in row.flags
        assert row.torsion_found <= row.bound
    assert scan.min_mu == min(r.mu for r in scan.rows)
    phi = spec.specialize(RatFunc.t(GF(3)))
    beta3 = phi.a(2)
    assert {v for v in bad_places(phi) if not v.is_infinite} == {
        v for v in relevant_places([beta3]) if valuation(beta3, v) > 0}


@pytest.mark.parametrize("text", [
    "q = 6\ncoeffs = [1]\nparam = b\n",
    "q = 3\ncoeffs = []\nparam = b\n",
    "q = 3\ncoeffs = [1]\n",
    "q = 3\ncoeffs = [1]\nparam = t\n",
    "q = 3\ncoeffs = [1]\nparam = b\ncolour = red\n",
    "q = 3\nrank = 2\ncoeffs = [1]\nparam = b\n",
])
def test_parse_family_errors(text):
    with pytest.raises(ParseError):
        parse_family(text)


def test_j_invariant_of_family_fibre():
    spec = parse_family("q = 2\ncoeffs = [b, 1]\nparam = b\n")
    phi = spec.specialize(RatFunc.t(GF(2)) + RatFunc.from_int(GF(2), 1))
    assert phi.a(1) == RatFunc.t(GF(2)) + RatFunc.from_int(GF(2), 1)
    # j = (t+1)^3 has a triple pole at inf only
    inf = Place.infinity(GF(2))
    assert bad_places(phi) == {inf}
    assert per_place_j(phi)[inf] == 1
    assert j_invariant(phi) is not None
