from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from birdyn.arcs import ModelPoint
from birdyn.lattice import P1xP1, point_from_affine
from birdyn.orbitlab import as1_orbit_scan, curve_orbit, iterate, orbit_trichotomy


def pt(z, w):
    return point_from_affine(P1xP1, [Fraction(z), Fraction(w)])


def test_fixed_point_is_periodic(df):
    rec = iterate(df.mm, pt(Fraction(3, 8), Fraction(-3, 8)), 20)
    assert rec.status == "periodic" and rec.period == 1 and rec.preperiod == 0
    assert rec.point(17) == rec.start
    assert orbit_trichotomy(df.mm, rec, df.cls) == "Preperiodic"


def test_generic_orbit_reaches_horizon(df):
    rec = iterate(df.mm, pt(Fraction(1, 2), Fraction(1, 3)), 12)
    assert rec.status == "horizon" and rec.steps == 12
    assert rec.complete


def test_orbit_on_contracted_curve_lands_on_ind_inverse(df):
    # w = -1 is contracted to the point of Ind(f^-1)
    rec = iterate(df.mm, pt(2, -1), 1)
    assert rec.points[1] == df.mm.ledger.ind_inv[0]


def test_ind_point_stops_orbit(df):
    q = df.mm.ledger.ind[0]
    rec = iterate(df.mm, q, 5)
    assert rec.status == "indeterminacy"
    assert rec.steps == 0


def test_as1_scan(df, bd):
    for m in (df, bd):
        res = as1_orbit_scan(m.mm, 6)
        assert res["ok"], res


def test_curve_orbits(df):
    co = curve_orbit(df.mm, "w=-1", 10)
    assert co.status == "contracted" and co.contracted_at == 1
    per = curve_orbit(df.mm, "L", 10)
    assert per.status == "periodic" and per.period == 1
    assert per.self_intersections == [-3]
    chain = curve_orbit(df.mm, "w=eps", 10)
    assert chain.labels[:3] == ["w=eps", "E0", "E1"]


def test_orbit_serialization(df):
    rec = iterate(df.mm, pt(2, Fraction(-1, 4)), 4)
    d = rec.to_dict()
    assert d["horizon"] == 4 and len(d["points"]) == 5
    csv_text = rec.to_csv()
    assert csv_text.splitlines()[0] == "step,point,event,naive_height"
    assert len(csv_text.splitlines()) == 6


@settings(max_examples=25)
@given(a=st.integers(-9, 9), b=st.integers(1, 9), c=st.integers(-9, 9), d=st.integers(1, 9))
def test_model_orbit_matches_bare_orbit(a, b, c, d, df):
    # off the blown-up centers the model orbit projects to the bare orbit
    x = ((b, a), (d, c))
    model_rec = iterate(df.mm, x, 6)
    bare_rec = iterate(df.mm.forward, x, 6)
    centers = {p.coords for p in df.mm.model.points}
    n = min(model_rec.steps, bare_rec.steps)
    for k in range(n + 1):
        p = model_rec.points[k]
        assert isinstance(p, ModelPoint)
        if p.proper and p.base not in centers:
            assert p.base == bare_rec.points[k].base
        else:
            break
