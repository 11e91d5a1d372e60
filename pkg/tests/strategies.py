"""Hypothesis strategies for field elements, rational functions and modules."""

from hypothesis import strategies as st

from drinfeld_dyn.drinfeld import DrinfeldModule
from drinfeld_dyn.funcfield import GF, PolyA, RatFunc

small_q = st.sampled_from([2, 3, 4, 5])


@st.composite
def polys(draw, q, max_deg=4, nonzero=False):
    F = GF(q)
    d = draw(st.integers(0, max_deg))
    cs = draw(st.lists(st.integers(0, q - 1), min_size=d + 1, max_size=d + 1))
    if nonzero and not any(cs):
        cs[-1] = 1
    return PolyA(F, cs)


@st.composite
def ratfuncs(draw, q, max_deg=3, nonzero=False):
    num = draw(polys(q, max_deg, nonzero=nonzero))
    den = draw(polys(q, max_deg, nonzero=True))
    return RatFunc(num, den)


@st.composite
def modules(draw, q=None, max_rank=3, max_deg=3):
    q = draw(small_q) if q is None else q
    r = draw(st.integers(1, max_rank))
    cs = [draw(ratfuncs(q, max_deg)) for _ in range(r - 1)]
    cs.append(draw(ratfuncs(q, max_deg, nonzero=True)))
    return DrinfeldModule(q, cs)
