from fractions import Fraction

import pytest

from birdyn.algnum import pstr, sign_of
from birdyn.catalog import CatalogError, catalog, catalog_bd_sigma_tau, catalog_df_epsilon
from birdyn.lattice import intersection
from birdyn.picdyn import (
    adjoint_of,
    as1_check,
    as2_check,
    charpoly,
    convergence_check,
    degree_growth_oracle,
    dynamical_degree,
    eigen_residual,
    fit_recurrence,
    oracle_agrees,
    verify_action,
)


def test_minimal_polynomials(df, bd, df35):
    assert pstr(df.lam.minpoly) == "x^5 - x^3 - x^2 - x - 1"
    assert pstr(bd.lam.minpoly) == "x^3 - x^2 - 2*x - 1"
    assert pstr(df35.lam.minpoly) == "x^7 - x^6 - x^4 - x^2 - 1"
    assert abs(float(df.lam) - 1.5341577449142669) < 1e-9


def test_charpoly_factors(df):
    # x (x - 1) (x^5 - x^3 - x^2 - x - 1)
    assert pstr(charpoly(df.mm.pullback_matrix())) == "x^7 - x^6 - x^5 + x"


def test_adjointness(df, bd):
    for m in (df, bd):
        M = m.mm.pullback_matrix()
        assert adjoint_of(M, m.mm.model) == [[Fraction(x) for x in r] for r in m.mm.pushforward_matrix()]


@pytest.mark.parametrize("name", ["df", "bd", "df35"])
def test_verify_action(name, request):
    m = request.getfixturevalue(name)
    rep = verify_action(m.mm, m.spectral.theta_plus)
    assert rep.ok, [c.to_dict() for c in rep.checks if not c.ok]


def test_as1_and_as2_on_catalog(df, bd):
    for m in (df, bd):
        assert as1_check(m.mm, 6).ok
        assert as2_check(m.mm, m.spectral).ok


def test_as1_fails_for_quadratic_involution(involution):
    rep = as1_check(involution.mm, 4)
    assert not rep.ok
    deg = rep.checks[0]
    assert deg.detail["first_failure"] == 2
    assert rep.verdict == "AS1 fails at n=2"


def test_henon_is_stable_on_the_plane(henon):
    assert dynamical_degree(henon.mm.pullback_matrix()).rational == 2
    assert as1_check(henon.mm, 5).ok


def test_eigenvectors_exact(df, bd):
    for m in (df, bd):
        K = m.spectral.field
        M = m.mm.pullback_matrix()
        assert all(r.is_zero() for r in eigen_residual(M, m.spectral.theta_plus, K.lam))
        MT = m.mm.pushforward_matrix()
        assert all(r.is_zero() for r in eigen_residual(MT, m.spectral.theta_minus, K.lam))
        tp, tm = m.spectral.theta_plus, m.spectral.theta_minus
        model = m.mm.model
        assert sign_of(intersection(model, tp, tm)) > 0
        assert sign_of(intersection(model, tp, tp)) > 0


def test_convergence_decreasing(df, bd):
    for m in (df, bd):
        model = m.mm.model
        res = convergence_check(m.mm.pullback_matrix(), m.spectral, model, model.ample_base_class(), 12)
        assert all(res["strictly_decreasing_steps"][4:12])


def test_recurrence_fit_examples():
    fib = [1, 1, 2, 3, 5, 8, 13, 21]
    k, start, c, neq = fit_recurrence([fib])
    assert (k, c) == (2, [1, 1])
    assert fit_recurrence([[1, 2, 4, 8]])[2] == [2]
    # too short to determine anything beyond order 1 with a redundant equation
    assert fit_recurrence([[1, 0, 1]]) is None


def test_degree_oracle_henon(henon):
    o = degree_growth_oracle(henon.mm.forward, 6)
    assert o["totals"] == [2**n for n in range(7)]
    assert o["order"] == 1
    lam = dynamical_degree(henon.mm.pullback_matrix())
    assert oracle_agrees(lam, o)


def test_degree_oracle_df_needs_more_than_eight_iterates(df):
    short = degree_growth_oracle(df.mm.forward, 8)
    assert short["order"] is None
    long = degree_growth_oracle(df.mm.forward, 8, extend_to=11, confirm=1)
    assert long["n_used"] == 11
    assert long["characteristic_polynomial"] == "x^6 - x^5 - x^4 + 1"
    assert oracle_agrees(df.lam, long)


def test_catalog_rejections():
    with pytest.raises(CatalogError):
        catalog_df_epsilon(Fraction(1, 3))
    with pytest.raises(CatalogError):
        catalog_df_epsilon(Fraction(1, 2))
    assert catalog_df_epsilon(Fraction(2, 3), check=False).params == {"eps": "2/3"}
    with pytest.raises(CatalogError):
        catalog_bd_sigma_tau(2, 0)
    with pytest.raises(CatalogError):
        catalog("nope")


def test_catalog_aliases():
    assert catalog("df", eps=Fraction(1, 5)).name == "df_epsilon(eps=1/5)"
    assert catalog("henon", c=Fraction(1, 3)).params == {"c": Fraction(1, 3)}
