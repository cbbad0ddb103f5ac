from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from birdyn.exact import (
    INF,
    Place,
    ZeroNormError,
    abs_v,
    as_fraction,
    finite,
    log_fraction,
    max_norm_vec,
    product_formula_check,
    sorted_places,
    support,
    valuation,
    vector_support,
)

nonzero_rationals = st.fractions(max_denominator=10**9).filter(lambda q: q != 0)


def test_valuation_examples():
    assert valuation(Fraction(12, 5), 2) == 2
    assert valuation(Fraction(12, 5), 5) == -1
    assert valuation(7, 3) == 0
    assert abs_v(Fraction(12, 5), finite(2)).value == Fraction(1, 4)
    assert abs_v(Fraction(-12, 5), INF).value == Fraction(12, 5)


def test_zero_has_no_norm():
    with pytest.raises(ZeroNormError):
        abs_v(0, INF)
    with pytest.raises(ZeroNormError):
        valuation(0, 3)


def test_places_are_validated():
    with pytest.raises(ValueError):
        finite(4)
    with pytest.raises(ValueError):
        Place(2**64 + 13)
    assert Place.parse("inf") is INF or Place.parse("inf") == INF
    assert str(finite(7)) == "7"
    assert sorted_places([finite(5), INF, finite(2)]) == [INF, finite(2), finite(5)]


def test_floats_rejected():
    with pytest.raises(TypeError):
        as_fraction(0.5)
    assert as_fraction("3/7") == Fraction(3, 7)


def test_support_example():
    assert support(Fraction(-12, 5)) == {INF, finite(2), finite(3), finite(5)}
    assert support(Fraction(1)) == set()
    assert support(Fraction(-1)) == set()


def test_log_fraction_huge():
    q = Fraction(3**2000, 2**3000)
    assert abs(log_fraction(q) - (2000 * 1.0986122886681098 - 3000 * 0.6931471805599453)) < 1e-6


@given(nonzero_rationals)
def test_product_formula(q):
    assert product_formula_check(q)


@given(nonzero_rationals, nonzero_rationals, st.sampled_from([2, 3, 5, 7, 11]))
def test_norm_multiplicative_and_ultrametric(a, b, p):
    v = finite(p)
    assert abs_v(a * b, v).value == abs_v(a, v).value * abs_v(b, v).value
    if a + b != 0:
        assert abs_v(a + b, v).value <= max(abs_v(a, v).value, abs_v(b, v).value)


@given(st.lists(st.integers(-10**6, 10**6), min_size=2, max_size=4).filter(any))
def test_vector_support_primitive(vec):
    from math import gcd

    g = 0
    for c in vec:
        g = gcd(g, c)
    prim = [c // g for c in vec]
    # primitive integer vectors have norm 1 at every prime
    assert all(v.archimedean for v in vector_support(prim))
    assert max_norm_vec(prim, INF).value == max(abs(c) for c in prim)


def test_support_of_number_with_large_prime_square():
    # 33461^2 divides it; the factor comes back from the factoring backend as a non-int type
    a = -110844213579
    assert finite(33461) in support(a)
    assert product_formula_check(a)
