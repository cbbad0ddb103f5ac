import math
import time
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from birdyn.energy import bd_lower_bound_p2, bd_partial_sums, dist_to_ind, dist_v
from birdyn.exact import INF, finite
from birdyn.lattice import normalize_group

coords = st.lists(st.integers(-10**4, 10**4), min_size=3, max_size=3).filter(any)
places = st.sampled_from([finite(2), finite(3), finite(5)])


@given(coords, coords, coords, places)
def test_ultrametric(a, b, c, v):
    x, y, z = (a,), (b,), (c,)
    assert dist_v(x, z, v).exact <= max(dist_v(x, y, v).exact, dist_v(y, z, v).exact)


@given(coords, coords, st.sampled_from([INF, finite(2), finite(3), finite(5)]))
def test_symmetry_and_identity(a, b, v):
    x, y = (a,), (b,)
    assert dist_v(x, y, v) == dist_v(y, x, v)
    same = normalize_group(a) == normalize_group(b)
    assert dist_v(x, y, v).is_zero == same
    assert dist_v(x, x, v).is_zero
    assert 0 <= dist_v(x, y, v).value <= 1 + 1e-12


def test_p1xp1_distance_is_max_of_factors():
    x = ((1, 0), (1, 2))
    assert dist_v(x, ((1, 4), (1, 2)), finite(2)).exact == Fraction(1, 4)
    assert dist_v(x, ((1, 4), (1, 6)), finite(2)).exact == Fraction(1, 4)
    assert dist_v(x, ((1, 4), (1, 3)), finite(2)).exact == 1
    assert dist_v(((8, 1),), ((0, 1),), finite(2)).exact == Fraction(1, 8)
    assert dist_v(x, x, finite(3)).exact == 0


def test_dist_to_ind_empty():
    assert math.isinf(dist_to_ind(((1, 2, 3),), INF, []).value)


@pytest.mark.parametrize("v", [INF, finite(2), finite(3), finite(5)])
def test_bd_sums_df(df, v):
    for y in df.mm.ledger.ind_inv:
        rep = bd_partial_sums(df.mm, y, v, 40, lam=df.lam)
        assert rep.status == "complete"
        assert rep.cauchy_gap <= 1e-3
        if not v.archimedean:
            assert rep.all_terms_exact
            assert all(t["dist"] != "0" for t in rep.terms)


def test_bd_report_csv(df):
    y = df.mm.ledger.ind_inv[0]
    rep = bd_partial_sums(df.mm, y, finite(2), 12, lam=df.lam)
    lines = rep.to_csv().splitlines()
    assert lines[0] == "k,place,dist,term,partial_sum,err"
    assert len(lines) == 14
    assert rep.to_dict()["status"] == "complete"


def test_bd_sums_fast(df):
    t = time.perf_counter()
    for v in (INF, finite(2), finite(3), finite(5)):
        for y in df.mm.ledger.ind_inv:
            bd_partial_sums(df.mm, y, v, 40, lam=df.lam)
    assert time.perf_counter() - t < 30


def test_bd_lower_bound_henon(henon):
    res = bd_lower_bound_p2(henon.mm.forward, ((1, 2, 3),))
    assert res["factor"] == "2" and res["S"] == ["inf"]
    assert res["height_mult"] == "3"
    assert res["bound"] == pytest.approx(-math.log(3) - 2 * math.log(5) / 2)
