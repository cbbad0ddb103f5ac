from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from birdyn.algnum import (
    AlgNumber,
    UncertifiedSign,
    charpoly_bareiss,
    charpoly_cofactor,
    isolate_real_roots,
    largest_real_root,
    peval,
    pstr,
    sign_of,
)

square = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=n, max_size=n))


@given(square)
def test_charpoly_matches_cofactor_oracle(M):
    assert charpoly_bareiss(M) == charpoly_cofactor(M)


def test_charpoly_examples():
    assert charpoly_bareiss([[2]]) == (-2, 1)
    # companion matrix of x^2 - x - 1
    assert charpoly_bareiss([[0, 1], [1, 1]]) == (-1, -1, 1)
    assert charpoly_bareiss([[0, 0], [0, 0]]) == (0, 0, 1)


def test_golden_ratio_interval():
    lam = largest_real_root((-1, -1, 1))
    lo, hi = lam.interval(Fraction(1, 10**12))
    assert hi - lo <= Fraction(1, 10**12)
    phi = Fraction(16180339887498948482, 10**19)
    assert lo - Fraction(1, 10**18) <= phi <= hi + Fraction(1, 10**18)
    assert lam.degree == 2
    assert pstr(lam.minpoly) == "x^2 - x - 1"


def test_largest_root_picks_the_right_factor():
    # (x - 3)(x^2 - 2): largest root 3 is rational
    p = (6, -2, -3, 1)
    lam = largest_real_root(p)
    assert lam.rational == 3


@given(st.lists(st.integers(-30, 30), min_size=1, max_size=4, unique=True))
def test_isolation_counts_distinct_roots(roots):
    p = (1,)
    for r in roots:
        p = tuple(a - r * b for a, b in zip((0,) + p, p + (0,)))
    iv = isolate_real_roots(p)
    assert len(iv) == len(roots)
    for (lo, hi), r in zip(iv, sorted(roots)):
        assert lo < r <= hi


def test_qlam_arithmetic_and_signs():
    lam = largest_real_root((-1, -1, 1))
    K = lam.field()
    L = K.lam
    # lambda^2 = lambda + 1 exactly
    assert L * L == L + 1
    assert (L - 1) * L == K.one()
    assert sign_of(L - Fraction(3, 2)) == 1
    assert sign_of(L - Fraction(17, 10)) == -1
    assert sign_of(K.zero()) == 0
    assert (L.inverse() * L) == K.one()


def test_sign_of_rationals():
    assert sign_of(Fraction(-1, 3)) == -1
    assert sign_of(0) == 0
    assert issubclass(UncertifiedSign, ArithmeticError)


def test_algnumber_interval_contains_root():
    a = AlgNumber((-2, 0, 1), 1, 2)
    lo, hi = a.interval(Fraction(1, 2**40))
    assert peval((-2, 0, 1), lo) <= 0 <= peval((-2, 0, 1), hi)
    assert abs(float(a) - 2**0.5) < 1e-9
