"""Acceptance criteria; each test reports one PASS/FAIL line, collected in the terminal summary."""
import math
import random
import time
from fractions import Fraction

import pytest

from birdyn.algnum import charpoly_cofactor, sign_of
from birdyn.basecurves import verify_basecurve_theorem
from birdyn.energy import bd_partial_sums, dist_v
from birdyn.exact import INF, finite, product_formula_check
from birdyn.heightlab import canonical_height, functional_equation_check, local_drop_check, telescoping_check
from birdyn.lattice import P1xP1, P2, intersection, point_from_affine
from birdyn.orbitlab import as1_orbit_scan, iterate
from birdyn.picdyn import (
    as1_check,
    as2_check,
    charpoly,
    convergence_check,
    degree_growth_oracle,
    eigen_residual,
    oracle_agrees,
)
from birdyn.poly import Poly


_node = None


@pytest.fixture(autouse=True)
def _record(request):
    global _node
    _node = request.node
    yield
    _node = None


def report(n, ok, detail=""):
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    print("\n" + line)
    _node.user_properties.append(("criterion", line))
    assert ok, detail


def test_1_exactness_suite(henon, involution):
    t = time.perf_counter()
    rng = random.Random(1)
    bad = 0
    for _ in range(10**4):
        q = Fraction(rng.randint(-10**12, 10**12) or 1, rng.randint(1, 10**12))
        bad += not product_formula_check(q)
    tele = []
    for m in (henon, involution):
        for y in [((1, 2, 3),), ((5, -7, 11),)]:
            for k in range(1, 11):
                r = telescoping_check(m.mm.forward, y, k)
                tele.append(r["ok"] and all(row["exact"] for row in r["rows"]))
    dt = time.perf_counter() - t
    report(1, bad == 0 and all(tele) and dt < 10,
           f"product formula failures {bad}/10000; telescoping exact {sum(tele)}/{len(tele)}; {dt:.2f} s")


def _random_matrix(rng):
    n = rng.randint(1, 6)
    return [[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)]


def test_2_charpoly_oracle():
    rng = random.Random(2)
    mats = [_random_matrix(rng) for _ in range(100)]
    bad = sum(charpoly(M) != charpoly_cofactor(M) for M in mats)
    report("2a", bad == 0, f"char poly vs cofactor expansion: {100 - bad}/100 agree")


@pytest.mark.xfail(strict=True, reason="degree data through n = 8 does not determine a recurrence")
def test_2_degree_oracle_within_eight_iterates(df):
    o = degree_growth_oracle(df.mm.forward, 8)
    ok = oracle_agrees(df.lam, o)
    report("2b", ok, f"degree oracle with n <= 8: {o.get('note') or o.get('characteristic_polynomial')}; "
           f"ratios {[round(r, 4) for r in o['ratios']]}")


def test_2_degree_oracle_extended(df):
    o = degree_growth_oracle(df.mm.forward, 8, extend_to=11, confirm=1)
    lo, hi = o["interval"]
    report("2c", oracle_agrees(df.lam, o),
           f"degree oracle with n <= {o['n_used']}: {o['characteristic_polynomial']}, root in "
           f"[{float(lo):.9f}, {float(hi):.9f}], lam = {float(df.lam):.9f}")


def test_3_classification(df, bd):
    c = df.cls
    df_ok = (as1_check(df.mm, 6).ok and as2_check(df.mm, df.spectral).ok and c.c_exc_plus == ["w=-1"]
             and c.c_exc_minus == ["z=1"] and c.c_per == ["L"] and c.c_both == [])
    b = bd.cls
    generic = as1_orbit_scan(bd.mm, 6)["ok"]
    bd_ok = generic and len(b.c_per) == 2 and not b.c_exc_plus and not b.c_exc_minus
    report(3, df_ok and bd_ok, f"DF: per={c.c_per} exc+={c.c_exc_plus} exc-={c.c_exc_minus} both={c.c_both}; "
           f"BD(2,1): generic={generic} per={b.c_per} exc+={b.c_exc_plus} exc-={b.c_exc_minus}")


def test_4_basecurve_theorem(df, bd):
    bad = []
    for m in (df, bd):
        rep = verify_basecurve_theorem(m.cls, m.mm, m.spectral, 6)
        bad += [f"{m.mm.name}:{c.name}" for c in rep.checks if not c.ok]
    report(4, not bad, f"violations: {bad or 'none'}")


def test_5_stability_oracles(involution, df, bd):
    qi = as1_check(involution.mm, 6)
    first = qi.checks[0].detail.get("first_failure")
    stab = [as1_check(m.mm, 6).ok for m in (df, bd)]
    report(5, not qi.ok and first == 2 and all(stab),
           f"quadratic involution: {qi.verdict}; stabilized models pass: {stab}")


def test_6_spectral(df, bd):
    rows = []
    ok = True
    for m in (df, bd):
        sp, model = m.spectral, m.mm.model
        exact = all(r.is_zero() for r in eigen_residual(m.mm.pullback_matrix(), sp.theta_plus, sp.field.lam))
        s1 = sign_of(intersection(model, sp.theta_plus, sp.theta_minus))
        s2 = sign_of(intersection(model, sp.theta_plus, sp.theta_plus))
        conv = convergence_check(m.mm.pullback_matrix(), sp, model, model.ample_base_class(), 12)
        dec = all(conv["strictly_decreasing_steps"][4:12])
        ok &= exact and s1 > 0 and s2 > 0 and dec
        rows.append(f"{m.mm.name}: exact={exact} signs=({s1},{s2}) decreasing 4..12={dec}")
    report(6, ok, "; ".join(rows))


def _sample_generic(df, rng, count, N):
    # random points off the invariant base curves, where the canonical height limit is 0
    polys = [c.poly for c in df.mm.curves if c.label in df.cls.c_per and c.poly is not None]
    out = []
    while len(out) < count:
        x = point_from_affine(P1xP1, [Fraction(rng.randint(-30, 30), rng.randint(1, 30)),
                                      Fraction(rng.randint(-30, 30), rng.randint(1, 30))])
        if any(p.evaluate([c for g in x for c in g]) == 0 for p in polys):
            continue
        if iterate(df.mm, x, N + 1).steps < N + 1:
            continue
        out.append(x)
    return out


def test_7_canonical_heights(df):
    N = 20
    pts = _sample_generic(df, random.Random(7), 50, N)
    low = min(canonical_height(df.mm, df.spectral, x, N).estimate for x in pts)
    fe = [functional_equation_check(df.mm, df.spectral, x, N) for x in pts]
    fe_ok = sum(r["ok"] for r in fe)
    pre = [canonical_height(df.mm, df.spectral, point_from_affine(P1xP1, list(p)), 60).estimate
           for p in [(Fraction(3, 8), Fraction(-3, 8)), (Fraction(-1), Fraction(1))]]
    ok = low >= -1e-6 and fe_ok == len(pts) and all(h <= 1e-8 for h in pre)
    report(7, ok, f"min estimate {low:.3e}; functional equation {fe_ok}/{len(pts)}; "
           f"preperiodic estimates {[f'{h:.1e}' for h in pre]}")


def test_8_bd_sums(df):
    t = time.perf_counter()
    rows, ok = [], True
    for y in df.mm.ledger.ind_inv:
        for v in (INF, finite(2), finite(3), finite(5)):
            r = bd_partial_sums(df.mm, y, v, 40, lam=df.lam)
            good = r.status == "complete" and r.cauchy_gap <= 1e-3 and (v.archimedean or r.all_terms_exact)
            ok &= good
            rows.append(f"{v}: S40={r.partial_sums[-1]:.6f} gap={r.cauchy_gap:.1e}")
    dt = time.perf_counter() - t
    report(8, ok and dt < 30, f"{'; '.join(rows)}; {dt:.2f} s")


def test_9_local_drop(henon, bd):
    P = lambda s: Poly.parse(s, P2.varnames)  # noqa: E731
    Sigma = [P("x"), P("y"), P("z")]
    rows, ok = [], True
    for m in (henon, bd):
        f = m.mm.forward
        for sigma in ("x", "z"):
            for v in (INF, finite(2)):
                r = local_drop_check(f, P(sigma), Sigma, v, samples=200, seed=9)
                ok &= r["ok"] and r["fresh_size"] == 200 and math.isclose(
                    r["C_v"], math.log(Fraction(r["C_v_mult"])), abs_tol=0)
                rows.append(f"{m.mm.name} s={sigma} v={v}: C_v={r['C_v']:.4f} D_v={r['D_v']:.4f}")
            # off S the constant vanishes
            off = [w for w in (finite(3), finite(5), finite(7)) if str(w) not in r["S"]]
            for w in off:
                ok &= local_drop_check(f, P(sigma), Sigma, w, samples=20, seed=9)["C_v"] == 0.0
    report(9, ok, "; ".join(rows))


def test_10_metric_properties():
    rng = random.Random(10)

    def pt():
        while True:
            v = [rng.randint(-10**3, 10**3) for _ in range(3)]
            if any(v):
                return (tuple(v),)

    ultra = sym = ident = 0
    for _ in range(10**3):
        v = finite(rng.choice([2, 3, 5]))
        x, y, z = pt(), pt(), pt()
        ultra += dist_v(x, z, v).exact <= max(dist_v(x, y, v).exact, dist_v(y, z, v).exact)
        for w in (v, INF):
            sym += dist_v(x, y, w) == dist_v(y, x, w)
            k = rng.randint(2, 9)
            same = ((tuple(k * c for c in x[0]),))
            ident += dist_v(x, same, w).is_zero and (not dist_v(x, y, w).is_zero or x == y)
    ok = ultra == 1000 and sym == 2000 and ident == 2000
    report(10, ok, f"ultrametric {ultra}/1000; symmetry {sym}/2000; identity {ident}/2000")
