from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from drinfeld_dyn.drinfeld import DrinfeldModule, phi_image, torsion_global, twist
from drinfeld_dyn.errors import BudgetExceeded, NotInJuliaSet
from drinfeld_dyn.funcfield import GF, PolyA, RatFunc, log_abs, parse_place, parse_ratfunc
from drinfeld_dyn.localdyn import (LocalReport, c_of_phi, component_module,
                                   component_size_bound, genericity_radius,
                                   height_decompose, is_T_generic, j_of_subring_generator,
                                   julia_contains, local_height, local_report,
                                   phi0_contains, refine_generic_subgroup)

from strategies import modules, ratfuncs


def rf(s, q):
    return parse_ratfunc(s, GF(q))


def place(s, q):
    return parse_place(s, GF(q))


PHI = DrinfeldModule(3, ["1", "t"])   # t x + x^3 + t x^9 over F_3


def test_c_examples():
    assert c_of_phi(PHI, place("t", 3)) == Fraction(1, 8)
    assert c_of_phi(PHI, place("t+1", 3)) == 0
    for pl in ("t", "t^2+1", "inf"):
        assert c_of_phi(DrinfeldModule.carlitz(3), place(pl, 3)) == 0


def test_local_report_at_t():
    rep = local_report(PHI, place("t", 3))
    assert (rep.c_v, rep.j_v, rep.stable_rank, rep.s, rep.phi0_log_radius) == (
        Fraction(1, 8), Fraction(1, 8), 1, 1, 0)


def test_local_report_at_infinity():
    rep = local_report(PHI, place("inf", 3))
    assert rep.j_v == 0 and rep.stable_rank == 2 and rep.phi0_log_radius is None


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_carlitz_infinity_values(q):
    phi = DrinfeldModule.carlitz(q)
    inf = place("inf", q)
    assert local_report(phi, inf).j_v == 0
    assert j_of_subring_generator(phi, PolyA(phi.F, [0, 0, 1]), inf) == Fraction(q, q - 1)


def test_carlitz_powers_increase_at_infinity():
    phi = DrinfeldModule.carlitz(3)
    inf = place("inf", 3)
    vals = [j_of_subring_generator(phi, PolyA(phi.F, [0] * n + [1]), inf) for n in range(1, 5)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


@given(modules(max_rank=3, max_deg=3))
def test_report_invariants(phi):
    F = phi.F
    for v in [place("t", phi.q), place("t+1", phi.q)]:
        rep = local_report(phi, v)
        assert rep.j_v >= 0
        assert (rep.j_v == 0) == (rep.stable_rank == phi.rank)
        for a in (PolyA(F, [0, 0, 1]), PolyA(F, [1, 1])):
            assert j_of_subring_generator(phi, a, v) == rep.j_v


@given(st.sampled_from([2, 3, 5]).flatmap(lambda q: st.tuples(
    modules(q, max_rank=3, max_deg=2), ratfuncs(q, 2, nonzero=True), ratfuncs(q, 2, nonzero=True))))
def test_twist_covariance(args):
    phi, alpha, x = args
    assume(not alpha.is_zero() and not x.is_zero())
    psi = twist(phi, alpha)
    for v in (place("t", phi.q), place("inf", phi.q)):
        a, b = local_report(phi, v), local_report(psi, v)
        la = log_abs(alpha, v)
        assert b.c_v == a.c_v - la
        assert b.j_v == a.j_v
        if not v.is_infinite:
            assert b.phi0_log_radius == a.phi0_log_radius - la
        assert local_height(phi, v, x, check=False) == local_height(psi, v, x / alpha, check=False)


def test_phi0_examples():
    v = place("t", 3)
    assert phi0_contains(PHI, v, rf("0", 3))
    assert not phi0_contains(PHI, v, rf("1/t", 3))
    good = place("t+1", 3)
    assert phi0_contains(PHI, good, rf("(t+1)^2/t", 3))
    assert phi0_contains(PHI, good, rf("1", 3))


def test_julia_examples():
    v = place("t", 3)
    assert julia_contains(PHI, v, rf("0", 3))
    B = local_report(PHI, v).B_T_log
    far = rf("1/t", 3) ** (int(B) + 1)
    assert not julia_contains(PHI, v, far)
    with pytest.raises(NotInJuliaSet):
        local_height(PHI, v, far)


def _torsion_module(q, x0, a2):
    F = GF(q)
    t, x0, a2 = RatFunc.t(F), rf(x0, q), rf(a2, q)
    return DrinfeldModule(q, [-(t * x0 + a2 * x0 ** (q * q)) / x0 ** q, a2])


@pytest.mark.parametrize("q,x0,a2", [(2, "t+1", "1/t"), (3, "1/t", "t"), (3, "t", "1/(t+1)")])
def test_torsion_points_lie_in_julia(q, x0, a2):
    phi = _torsion_module(q, x0, a2)
    pts = torsion_global(phi, PolyA(phi.F, [0, 1])).points
    assert len(pts) > 1
    places = [parse_place(p, phi.F) for p in ("t", "t+1")]
    for v in places:
        for x in pts:
            assert julia_contains(phi, v, x)


@given(st.sampled_from([2, 3]).flatmap(lambda q: st.tuples(
    modules(q, max_rank=2, max_deg=2), ratfuncs(q, 2), ratfuncs(q, 2))))
def test_julia_closure_and_height_bounds(args):
    phi, x, y = args
    v = place("t", phi.q)
    try:
        inx, iny = julia_contains(phi, v, x), julia_contains(phi, v, y)
    except BudgetExceeded:
        assume(False)
    rep = local_report(phi, v)
    q, r = phi.q, phi.rank
    for z, inside in ((x, inx), (y, iny)):
        if phi0_contains(phi, v, z):
            assert inside
        if inside:
            assert julia_contains(phi, v, phi.phi_T(z))
            assert julia_contains(phi, v, phi_image(phi, PolyA(phi.F, [1, 1]))(z))
            if not z.is_zero():
                lam = local_height(phi, v, z)
                assert lam >= -((1 - Fraction(1, q ** (r - 1))) / (q - 1)) * rep.j_v
                if phi0_contains(phi, v, z):
                    assert lam >= rep.j_v
                if is_T_generic(phi, v, z):
                    assert log_abs(z, v) <= genericity_radius(phi, v)
    if inx and iny:
        assert julia_contains(phi, v, x + y)


def test_local_height_good_reduction():
    phi = DrinfeldModule(3, ["1", "1"])
    v = place("t^2+1", 3)
    assert local_height(phi, v, rf("t^2+1", 3)) == 2


def test_height_decompose_examples():
    v = place("t", 3)
    d = height_decompose(PHI, v, rf("1", 3))   # on the boundary of phi^0
    assert (d.B_part, d.E_part, d.coset_trivial) == (Fraction(1, 8), 0, True)
    d = height_decompose(PHI, v, rf("t", 3))
    assert d.E_part == 1 and d.lam == d.B_part + d.E_part


def test_height_decompose_off_phi0():
    # torsion points of this module at (t) lie in a nontrivial coset
    phi = _torsion_module(3, "1/t", "t")
    v = place("t", 3)
    x = rf("1/t", 3)
    assert phi.phi_T(x).is_zero() and not phi0_contains(phi, v, x)
    d = height_decompose(phi, v, x)
    assert (d.E_part, d.coset_trivial) == (0, False)
    assert d.lam == d.B_part == Fraction(-7, 8)
    bound = -((1 - Fraction(1, 3)) / 2) * local_report(phi, v).j_v
    assert d.lam >= bound


def test_genericity_examples():
    v = place("t+1", 3)
    assert is_T_generic(PHI, v, rf("0", 3))
    assert is_T_generic(PHI, v, rf("t+1", 3))
    # Carlitz over F_2: x = t is a T-torsion point where t x and x^2 cancel
    phi = DrinfeldModule.carlitz(2)
    assert not is_T_generic(phi, place("inf", 2), rf("t", 2))


def test_refine_trivial_cases():
    v = place("t+1", 3)
    zero = rf("0", 3)
    assert refine_generic_subgroup(PHI, {zero}, v) == {zero}
    # an F_3-line inside phi^0 at a good place: all points generic
    x = rf("t+1", 3)
    X = {zero, x, x + x}
    assert refine_generic_subgroup(PHI, X, v) == X


def _report(q, s, vj, rank=2):
    return LocalReport(None, Fraction(0), Fraction(vj), rank - s, s, Fraction(0),
                       Fraction(0), Fraction(vj), q, rank)


def test_component_size_bound_examples():
    assert component_size_bound(_report(3, 0, 0)) == 1
    for q in (2, 3, 5):
        assert component_size_bound(_report(q, 1, 1)) == 2 * q ** 12
        assert component_size_bound(_report(q, 1, 0)) == 2 * q ** 6


def test_component_module_trivial_cases():
    M = component_module(PHI, place("t", 3))
    assert M.size == 1 and M.invariant_factors == []
    # every class below the unit disk escapes: v(phi_T(x)) = 1 + 9 v(x) < 0
    for k in range(1, 4):
        x = rf("1/t^%d" % k, 3)
        assert not julia_contains(PHI, place("t", 3), x)
    good = component_module(DrinfeldModule(3, ["t", "1"]), place("t+1", 3))
    assert good.size == 1
