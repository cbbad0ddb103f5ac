from fractions import Fraction

import pytest

from birdyn.algnum import sign_of
from birdyn.basecurves import (
    big_nef_threshold,
    choose_power,
    kawamata_decomposition,
    kawamata_scaled_valid,
    new_decomposition,
    verify_basecurve_theorem,
)
from birdyn.lattice import intersection


def test_df_classification(df):
    cls = df.cls
    assert cls.c_per == ["L"]
    assert cls.c_exc_plus == ["w=-1"]
    assert cls.c_exc_minus == ["z=1"]
    assert cls.c_both == []
    assert cls.per_cross_check["ok"]
    assert cls.per_cross_check["from_theta_plus"] == cls.per_cross_check["from_theta_minus"] == ["L"]


def test_df_ratio_family_classification(df35):
    cls = df35.cls
    assert sorted(cls.c_per) == ["w=inf", "z=inf"]
    assert cls.c_exc_plus == ["w=eps"]
    assert cls.c_exc_minus == ["z=-eps"]
    assert cls.c_both == []


def test_bd_classification(bd):
    cls = bd.cls
    assert sorted(cls.c_per) == ["E2'", "z=0"]
    assert cls.c_exc_plus == [] and cls.c_exc_minus == []


@pytest.mark.parametrize("name", ["df", "df35", "bd"])
def test_theorem_checks_hold(name, request):
    m = request.getfixturevalue(name)
    rep = verify_basecurve_theorem(m.cls, m.mm, m.spectral, 6)
    assert rep.ok, [c.to_dict() for c in rep.checks if not c.ok]


def test_base_curves_pair_to_zero(df, bd):
    for m in (df, bd):
        model = m.mm.model
        for lab in m.cls.c_per:
            c = m.mm.curve(lab)
            assert sign_of(intersection(model, m.spectral.theta_plus, c.cls)) == 0
            assert sign_of(intersection(model, m.spectral.theta_minus, c.cls)) == 0


def test_big_nef_threshold_df(df):
    n = big_nef_threshold(df.mm, "w=-1", push=False, horizon=6)
    assert n is not None and n >= 1


def test_kawamata_and_new_decomposition(df, bd):
    for m in (df, bd):
        kaw = kawamata_decomposition(m.mm, m.spectral, m.cls)
        assert kaw.ok, kaw.checks
        assert kawamata_scaled_valid(m.mm, m.spectral, kaw, Fraction(1, 2))
        n = choose_power(m.mm, m.cls, 6)
        new = new_decomposition(kaw, m.mm, m.spectral, m.cls, n=n)
        assert new.ok, new.checks
        assert new.checks["identity_exact"]
        assert new.checks["base_point_freeness"] == "assumed (not certified)"
