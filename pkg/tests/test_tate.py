from itertools import product

import pytest

from drinfeld_dyn.drinfeld import DrinfeldModule
from drinfeld_dyn.funcfield import GF, PolyA, parse_place
from drinfeld_dyn.localdyn import component_module, local_report
from drinfeld_dyn.localfield import LaurentSeries
from drinfeld_dyn.tate import (Lattice, division_points, exp_lattice, lattice_reduce,
                               rigid_holds, uniformize)

P = 40


def setup(q, pl, cs, prec=P):
    psi = DrinfeldModule.carlitz(q)
    v = parse_place(pl, psi.F)
    w = LaurentSeries(v, -len(cs), list(cs), prec)
    return psi, v, Lattice(psi, v, [w])


def test_empty_lattice():
    psi = DrinfeldModule.carlitz(3)
    v = parse_place("t", psi.F)
    lat = Lattice(psi, v, [])
    e = exp_lattice(lat, 3, 10)
    assert e.coeffs[0] == LaurentSeries.constant(v, 1, 10)
    assert all(c.is_zero() for c in e.coeffs[1:])
    U = uniformize(psi, lat, prec=10)
    assert U.phi.rank == 1 and U.phi.a(1) == LaurentSeries.constant(v, 1, 10)


def _direct_e1(lat, k, prec):
    """Coefficient of z^q in z prod_{w in W, w != 0} (1 - z/w), W spanned by psi_{T^j}(omega), j < k."""
    q = lat.psi.q
    v = lat.place
    vecs = lat.psi_T_powers(lat.generators[0], k - 1)
    poly = [LaurentSeries.constant(v, 1, prec)] + [LaurentSeries.zero(v, prec)] * (q - 1)
    for cs in product(range(q), repeat=k):
        if not any(cs):
            continue
        w = None
        for c, x in zip(cs, vecs):
            if c:
                term = x.scale(c)
                w = term if w is None else w + term
        inv = w.inverse()
        poly = [poly[0]] + [poly[i] - inv * poly[i - 1] for i in range(1, q)]
    return poly[q - 1]


@pytest.mark.parametrize("q,pl,cs", [(3, "t-1", (1,)), (2, "t", (1, 1)), (3, "t", (1, 0, 2))])
def test_e1_against_direct_product(q, pl, cs):
    psi, v, lat = setup(q, pl, cs)
    e = exp_lattice(lat, 1, 15)
    assert e.coeffs[1].truncate(15) == _direct_e1(lat, 3, 40).truncate(15)


@pytest.mark.parametrize("q,pl,cs", [(3, "t-1", (1,)), (2, "t", (1, 0, 1))])
def test_exp_kills_lattice(q, pl, cs):
    psi, v, lat = setup(q, pl, cs, 60)
    e = exp_lattice(lat, 6, 30)
    for w in lat.psi_T_powers(lat.generators[0], 1):
        x = e(w)
        assert x.is_zero() or x.valuation() >= 25


def test_uniformize_carlitz_tate_curve():
    psi, v, lat = setup(3, "t-1", (1,))
    U = uniformize(psi, lat, n=2, prec=P)
    assert U.phi.rank == 2
    rep = local_report(U.phi, v)
    assert rep.j_v > 0
    assert rep.stable_rank == 1 and rep.s == 1


@pytest.mark.parametrize("q,pl,cs", [(3, "t-1", (1, 0, 1)), (2, "t", (1, 0)), (2, "t^2+t+1", (1, 2))])
def test_functional_equation_residuals(q, pl, cs):
    psi, v, lat = setup(q, pl, cs)
    U = uniformize(psi, lat, n=5, prec=P)
    assert all(r >= U.prec - 2 for r in U.residual_valuations)


def test_division_class_counts():
    psi, v, lat = setup(3, "t-1", (1, 0, 1))
    F = psi.F
    assert len(division_points(psi, lat, PolyA(F, [1]))) == 1
    assert len(division_points(psi, lat, PolyA(F, [0, 1]))) == 3
    assert len(division_points(psi, lat, PolyA(F, [1, 0, 1]))) == 9


@pytest.mark.parametrize("q,pl,cs", [
    (3, "t-1", (1, 0, 1)), (3, "t", (1, 0, 0)), (2, "t", (1, 0)),
    (2, "t", (1, 0, 0, 1)), (2, "t^2+t+1", (2, 1)), (3, "t", (1, 2)),
])
def test_component_module_matches_division_points(q, pl, cs):
    psi, v, lat = setup(q, pl, cs)
    U = uniformize(psi, lat, n=4, prec=P)
    M = component_module(U.phi, v)
    F = psi.F
    for d in range(3):
        for c in product(range(q), repeat=d + 1):
            if not c[-1]:
                continue
            a = PolyA(F, list(c))
            rational = sum(1 for k in division_points(psi, lat, a) if k.rational)
            assert rational == M.torsion_count(a), a


def test_nontrivial_example_is_A_mod_T():
    psi, v, lat = setup(3, "t", (1, 0, 0))
    M = component_module(uniformize(psi, lat, n=4, prec=P).phi, v)
    assert M.size == 3 and [repr(f) for f in M.invariant_factors] == ["t"]


def _sizes(lat):
    return sorted(-w.valuation() for w in lat.generators)


def _min_sizes_by_enumeration(lat):
    from drinfeld_dyn.tate import _enumerate
    sizes = sorted({-x.valuation() for _, x in _enumerate(lat, 2) if not x.is_zero()})
    return sizes


def test_reduce_rank_one_translate():
    psi, v, lat = setup(2, "t", (1, 0, 1))
    w = lat.generators[0]
    small = LaurentSeries(v, -1, [1], P)
    red = lattice_reduce(Lattice(psi, v, [psi_T(lat, w) + small, small]))
    # psi_T(w) = t w + w^2 has size 2 * 3
    assert _sizes(red) == [1, 6]
    assert _sizes(red)[0] == _min_sizes_by_enumeration(red)[0]
    assert rigid_holds(red)


def psi_T(lat, w):
    return lat.psi_T_powers(w, 1)[1]


def test_reduce_preserves_successive_minima():
    psi = DrinfeldModule.carlitz(3)
    v = parse_place("t", psi.F)
    w1 = LaurentSeries(v, -1, [1, 1], P)
    w2 = LaurentSeries(v, -2, [1, 0, 1], P)
    red = lattice_reduce(Lattice(psi, v, [w2, w1]))
    assert _sizes(red) == [1, 2]
    assert rigid_holds(red, 2)


def test_lattice_rejects_integral_generator():
    psi = DrinfeldModule.carlitz(2)
    v = parse_place("t", psi.F)
    with pytest.raises(ValueError):
        Lattice(psi, v, [LaurentSeries(v, 0, [1], P)])
