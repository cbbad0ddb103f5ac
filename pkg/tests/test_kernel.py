"""The FLINT and pure-Python polynomial kernels must agree term for term."""
from hypothesis import given
from hypothesis import strategies as st

from birdyn._kernel import flint_backend, pure
from birdyn.poly import Poly, exact_quotient

N = 3


@st.composite
def polys(draw, nvars=N, max_deg=3, max_terms=5):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        e = tuple(draw(st.integers(0, max_deg)) for _ in range(nvars))
        terms[e] = draw(st.integers(-20, 20))
    return {k: c for k, c in terms.items() if c}


@given(polys(), polys())
def test_mul_agrees(a, b):
    assert pure.mul(a, b, N) == flint_backend.mul(a, b, N)


@given(polys(), st.integers(0, 4))
def test_power_agrees(a, k):
    assert pure.power(a, k, N) == flint_backend.power(a, k, N)


@given(polys(max_deg=2), st.lists(polys(max_deg=2, max_terms=3), min_size=N, max_size=N))
def test_compose_agrees(p, subs):
    assert pure.compose(p, N, subs, N) == flint_backend.compose(p, N, subs, N)


@given(polys(max_deg=2), polys(max_deg=2), polys(max_deg=2))
def test_gcd_agrees_up_to_sign(a, b, c):
    x = pure.mul(a, c, N)
    y = pure.mul(b, c, N)
    if not x or not y:
        return
    g1 = Poly(pure.gcd(x, y, N), N).primitive()
    g2 = Poly(flint_backend.gcd(x, y, N), N).primitive()
    assert g1 == g2


@given(polys(max_deg=2), polys(max_deg=2, max_terms=3))
def test_exact_division_roundtrip(a, b):
    if not b or not a:
        return
    prod = Poly(pure.mul(a, b, N), N)
    assert exact_quotient(prod, Poly(b, N)) == Poly(a, N)


@given(st.lists(st.integers(-10**40, 10**40), min_size=1, max_size=4).filter(any), st.integers(1, 10**30))
def test_primitive_and_content(vec, k):
    scaled = [c * k for c in vec]
    assert pure.primitive(scaled) == flint_backend.primitive(scaled)
    assert pure.content(scaled) == flint_backend.content(scaled)


def test_primitive_large_entries():
    g = 3**5000
    vec = [-g * 7, g * 11, 0]
    assert flint_backend.primitive(vec) == [7, -11, 0]
    assert flint_backend.primitive(vec) == pure.primitive(vec)
    assert flint_backend.content(vec) == g


@given(st.integers(-10**15, 10**15))
def test_prime_factors_agree(n):
    ps = flint_backend.prime_factors(n)
    assert ps == pure.prime_factors(n)
    assert all(type(p) is int for p in ps)


def test_parse_and_print_roundtrip():
    names = ["x", "y", "z"]
    p = Poly.parse("x*y*z + (-y+z)*x^2", names)
    assert Poly.parse(p.to_string(names), names) == p
    assert p.total_degree() == 3
    assert Poly.parse("x/2 + y/3", names) == Poly.parse("3*x + 2*y", names)
