from itertools import product

import pytest
from hypothesis import given, strategies as st

from drinfeld_dyn.drinfeld import (DrinfeldModule, SearchConfig, TwistedPoly,
                                   format_module, j_invariant, parse_module,
                                   phi_image, torsion_global, torsion_local, twist)
from drinfeld_dyn.errors import ParseError, ZeroArgument, ZeroTwist
from drinfeld_dyn.funcfield import GF, PolyA, RatFunc, parse_place, parse_ratfunc

from strategies import modules, ratfuncs


def rf(s, q):
    return parse_ratfunc(s, GF(q))


def T(q, *cs):
    return PolyA(GF(q), list(cs))


@pytest.mark.parametrize("q", [2, 3, 5])
def test_carlitz_T_squared(q):
    phi = DrinfeldModule.carlitz(q)
    t = RatFunc.t(phi.F)
    got = phi_image(phi, T(q, 0, 0, 1))
    assert got == TwistedPoly([t * t, t ** q + t, RatFunc.from_int(phi.F, 1)], q)
    assert got == phi.phi_T * phi.phi_T


def test_constants_and_T():
    phi = DrinfeldModule(3, ["1", "t"])
    assert phi_image(phi, T(3, 2)) == TwistedPoly([RatFunc.from_int(phi.F, 2)], 3)
    assert phi_image(phi, T(3, 0, 1)) == phi.phi_T


def _polys(q, d):
    F = GF(q)
    return [PolyA(F, list(c)) for k in range(d + 1) for c in product(range(q), repeat=k + 1)]


@pytest.mark.parametrize("q", [2, 3])
def test_phi_is_a_ring_homomorphism_exhaustive(q):
    phi = DrinfeldModule(q, ["t+1", "1/t"]) if q == 2 else DrinfeldModule(q, ["t"])
    ps = _polys(q, 2)
    for a in ps:
        for b in ps:
            assert phi_image(phi, a * b) == phi_image(phi, a) * phi_image(phi, b)
            assert phi_image(phi, a + b) == phi_image(phi, a) + phi_image(phi, b)


@given(modules(max_rank=2, max_deg=2), st.integers(0, 2))
def test_x_degree_of_phi_a(phi, d):
    a = PolyA(phi.F, [1] * d + [1])
    assert phi_image(phi, a).x_degree() == phi.q ** (phi.rank * d)


def test_j_invariant_read_off():
    phi = DrinfeldModule(3, ["1", "t"])
    J = j_invariant(phi)
    assert J.weights == (2, 8)
    assert [c for c in J.coords] == [rf("1", 3), rf("t", 3)]


def test_carlitz_twists_share_j():
    phi = DrinfeldModule.carlitz(5)
    assert j_invariant(twist(phi, rf("t^2+1", 5))) == j_invariant(phi)


def test_twist_examples():
    phi = DrinfeldModule(3, ["t"])
    assert twist(phi, rf("1", 3)) == phi
    assert twist(phi, rf("t", 3)).coeffs == (rf("t^3", 3),)
    alpha = rf("(t+1)/t^2", 3)
    assert twist(twist(phi, alpha), alpha.inverse()) == phi
    with pytest.raises(ZeroTwist):
        twist(phi, rf("0", 3))


@given(st.sampled_from([2, 3, 4]).flatmap(
    lambda q: st.tuples(modules(q, max_rank=3, max_deg=2), ratfuncs(q, 2, nonzero=True))))
def test_twist_invariance_of_j(args):
    phi, alpha = args
    if alpha.is_zero():
        return
    psi = twist(phi, alpha)
    assert j_invariant(psi) == j_invariant(phi)
    # psi_T(x) = alpha^-1 phi_T(alpha x)
    x = RatFunc.t(phi.F) + 1
    assert psi.phi_T(x) == phi.phi_T(alpha * x) / alpha


def test_unequal_j_not_related_by_sampled_twists():
    F = GF(3)
    phi = DrinfeldModule(3, ["1", "t"])
    psi = DrinfeldModule(3, ["t", "1"])
    assert j_invariant(phi) != j_invariant(psi)
    for s in ["1", "2", "t", "t+1", "1/t", "t^2+2", "(t+1)/(t+2)"]:
        assert twist(phi, parse_ratfunc(s, F)) != psi


def test_torsion_carlitz_f2():
    phi = DrinfeldModule.carlitz(2)
    tm = torsion_global(phi, T(2, 0, 1))
    assert sorted(map(repr, tm.points)) == ["0", "t"]


def test_torsion_carlitz_f3_trivial():
    phi = DrinfeldModule.carlitz(3)
    tm = torsion_global(phi, T(3, 0, 1))
    assert [repr(p) for p in tm.points] == ["0"]


def test_torsion_zero_always_present_and_constants():
    phi = DrinfeldModule(3, ["1", "t"])
    assert rf("0", 3) in torsion_global(phi, T(3, 0, 1)).points
    assert [repr(p) for p in torsion_global(phi, T(3, 2)).points] == ["0"]
    with pytest.raises(ZeroArgument):
        torsion_global(phi, T(3))


@pytest.mark.parametrize("coeffs,q", [(["(t+1)/t"], 2), (["t", "t^2 + 1"], 3), (["1", "t"], 2)])
def test_torsion_methods_agree_and_close(coeffs, q):
    phi = DrinfeldModule(q, coeffs)
    for a in (T(q, 0, 1), T(q, 0, 0, 1), T(q, 1, 1)):
        lin = torsion_global(phi, a, SearchConfig("linear"))
        rec = torsion_global(phi, a, SearchConfig("reconstruct"))
        assert set(lin.points) == set(rec.points)
        pts = set(lin.points)
        for x in pts:
            assert phi_image(phi, a)(x).is_zero()
            for y in pts:
                assert x + y in pts
            for b in _polys(q, a.deg):
                assert phi_image(phi, b)(x) in pts


def test_torsion_local_examples():
    phi = DrinfeldModule.carlitz(3)
    rep = torsion_local(phi, T(3, 0, 1), parse_place("t-1", phi.F))
    assert len(rep.rational_roots) in (1, 3)
    rep = torsion_local(DrinfeldModule(3, ["1", "t"]), T(3, 0, 1), parse_place("t", GF(3)))
    assert rep.nonzero_roots() == []
    rep = torsion_local(phi, T(3, 2), parse_place("t", GF(3)))
    assert len(rep.rational_roots) == 1


def test_module_file_roundtrip():
    text = "q = 4\nrank = 2\ncoeffs = [g*t + 1, (t^2+g)/(t+1)]\n"
    phi = parse_module(text)
    assert parse_module(format_module(phi)) == phi


@pytest.mark.parametrize("text", [
    "q = 6\nrank = 1\ncoeffs = [1]\n",
    "q = 3\nrank = 2\ncoeffs = [1, 0]\n",
    "q = 3\nrank = 2\ncoeffs = [1]\n",
    "q = 3\nrank = 1\ncoeffs = [t +]\n",
    "q = 3\nrank = 1\ncoeffs = [1]\nfoo = 2\n",
    "q = 3\ncoeffs = [1]\n",
])
def test_module_file_rejects(text):
    with pytest.raises(ParseError):
        parse_module(text)
