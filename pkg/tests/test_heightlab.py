import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from birdyn import _kernel
from birdyn.birmap import PolyMap
from birdyn.exact import INF, finite, log_fraction
from birdyn.heightlab import (
    OnDivisor,
    build_cv_ledger,
    canonical_height,
    divisor_height,
    functional_equation_check,
    local_drop_check,
    local_height,
    naive_height,
    telescoping_check,
)
from birdyn.lattice import P1xP1, P2, point_from_affine
from birdyn.poly import Poly


def pt(z, w):
    return point_from_affine(P1xP1, [Fraction(z), Fraction(w)])


def P(s):
    return Poly.parse(s, P2.varnames)


SIGMA = [P("x"), P("y"), P("z")]

# fixed point and a point on the 3-cycle of the eps = 1/4 map
PREPERIODIC = [(Fraction(3, 8), Fraction(-3, 8)), (Fraction(-1), Fraction(1))]


def test_naive_height_values():
    assert naive_height(((2, -6, 4),)).exact_mult == 3
    assert naive_height(((1, 3), (2, 5))).exact_mult == 15
    assert naive_height(((0, 0, 1),)).log_value == 0.0


@given(st.lists(st.integers(-10**6, 10**6), min_size=3, max_size=3).filter(any))
def test_naive_height_nonnegative(v):
    assert naive_height((tuple(v),)).log_value >= 0


@pytest.mark.parametrize("name", ["qi", "henon"])
def test_telescoping_exact(name, request):
    f = (request.getfixturevalue("involution") if name == "qi" else request.getfixturevalue("henon")).mm.forward
    for y in [((1, 2, 3),), ((3, -5, 7),), ((2, 9, 4),)]:
        res = telescoping_check(f, y, 10)
        assert res["ok"]
        for row in res["rows"]:
            assert row["exact"]
            assert abs(row["log_diff"]) < 1e-9


def test_henon_cv_ledger(henon):
    led = build_cv_ledger(henon.mm.forward)
    # integer coefficients: only the archimedean l1 bound contributes
    assert led.degree == 2
    assert led.S == [INF]
    assert led.mult[INF] == 5
    assert led.log_C(finite(2)) == 0.0


def test_local_height_and_places():
    x = ((6, 4, 9),)
    assert local_height(P("z"), SIGMA, INF, x).exact_mult == 1
    assert local_height(P("x"), SIGMA, finite(2), x).exact_mult == 2
    with pytest.raises(OnDivisor):
        local_height(P("x"), SIGMA, INF, ((0, 1, 1),))


@given(st.lists(st.integers(-200, 200), min_size=3, max_size=3).filter(any))
def test_divisor_height_matches_direct_sum(v):
    # for a line the sum over places of log(||a||_v / |L(a)|_v) equals log ||a||_inf for primitive a
    from birdyn.lattice import normalize_group

    a = normalize_group(v)
    line = P("x + 2*y - z")
    val = a[0] + 2 * a[1] - a[2]
    if val == 0:
        with pytest.raises(OnDivisor):
            divisor_height(line, P2, (a,))
        return
    h = divisor_height(line, P2, (a,))
    assert math.isclose(h.log_value, math.log(max(abs(c) for c in a)), abs_tol=1e-12)


@pytest.mark.parametrize("sigma", ["x", "z"])
@pytest.mark.parametrize("v", [INF, finite(2)])
def test_local_drop_on_henon(henon, sigma, v):
    res = local_drop_check(henon.mm.forward, P(sigma), SIGMA, v, samples=200, seed=3)
    assert res["ok"], res["fresh_violations"][:3]
    assert res["fresh_size"] == 200
    assert res["S"] == ["inf", "2"]
    expect = math.log(2) if v == finite(2) else 0.0
    assert math.isclose(res["C_v"], expect, abs_tol=1e-15)


def test_local_drop_C_v_zero_off_S(henon):
    res = local_drop_check(henon.mm.forward, P("x"), SIGMA, finite(3), samples=50, seed=4)
    assert res["C_v"] == 0.0 and res["C_v_zero_off_S"]


def test_preperiodic_heights_vanish(df):
    for z, w in PREPERIODIC:
        h = canonical_height(df.mm, df.spectral, pt(z, w), 60)
        assert h.status == "complete"
        assert h.estimate <= 1e-8


def test_generic_heights(df):
    rng = random.Random(7)
    L = Poly.parse("z1*w0 - w1*z0 - z0*w0", P1xP1.varnames)
    checked = 0
    while checked < 15:
        x = pt(Fraction(rng.randint(-20, 20), rng.randint(1, 20)), Fraction(rng.randint(-20, 20), rng.randint(1, 20)))
        if L.evaluate([c for g in x for c in g]) == 0:
            continue
        h = canonical_height(df.mm, df.spectral, x, 20)
        if h.status != "complete":
            continue
        checked += 1
        assert h.estimate >= -1e-6
        assert h.estimate >= -h.cauchy_gap


def test_height_on_periodic_line_within_gap(df):
    # on the invariant line the limit is 0 and the estimate approaches it from below
    h = canonical_height(df.mm, df.spectral, pt(Fraction(-1, 3), Fraction(-4, 3)), 20)
    assert h.status == "complete"
    assert -h.cauchy_gap <= h.estimate < 0


def test_functional_equation(df):
    for z, w in [(Fraction(1, 2), Fraction(1, 3)), (2, Fraction(-1, 5)), (Fraction(-7, 3), 4)]:
        res = functional_equation_check(df.mm, df.spectral, pt(z, w), 20)
        assert res["ok"], res


def test_kernels_give_identical_heights(df):
    x = pt(Fraction(1, 2), Fraction(1, 3))
    a = canonical_height(df.mm, df.spectral, x, 14).sequence
    prev = _kernel.use("pure")
    try:
        b = canonical_height(df.mm, df.spectral, x, 14).sequence
    finally:
        _kernel.use(prev)
    assert a == b


def test_canonical_height_csv(df):
    h = canonical_height(df.mm, df.spectral, pt(2, 3), 5)
    lines = h.to_csv().splitlines()
    assert lines[0] == "n,lam^-n h(f^n x),increment"
    assert len(lines) == 7


def test_log_fraction_exact():
    assert log_fraction(Fraction(8)) == pytest.approx(3 * math.log(2))
    assert PolyMap.identity(P2).degree == 1
