"""Pure-Python polynomial kernel: dict arithmetic plus sympy for gcd and factoring."""
from __future__ import annotations

from functools import lru_cache

from sympy.polys.domains import ZZ
from sympy.polys.rings import ring

NAME = "pure"


def _add_into(acc: dict, key, c):
    v = acc.get(key, 0) + c
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


def mul(a: dict, b: dict, n: int) -> dict:
    if len(a) > len(b):
        a, b = b, a
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            _add_into(out, tuple(x + y for x, y in zip(ea, eb)), ca * cb)
    return out


def power(a: dict, k: int, n: int) -> dict:
    result = {(0,) * n: 1}
    base = a
    while k:
        if k & 1:
            result = mul(result, base, n)
        k >>= 1
        if k:
            base = mul(base, base, n)
    return result


def compose(p: dict, n: int, subs: list[dict], m: int) -> dict:
    # cache powers of each substituted polynomial
    cache: list[dict[int, dict]] = [{0: {(0,) * m: 1}, 1: s} for s in subs]

    def pw(i: int, e: int) -> dict:
        got = cache[i].get(e)
        if got is None:
            half = pw(i, e // 2)
            got = mul(half, half, m)
            if e % 2:
                got = mul(got, subs[i], m)
            cache[i][e] = got
        return got

    out: dict = {}
    for expo, c in p.items():
        term = {(0,) * m: c}
        for i, e in enumerate(expo):
            if e:
                term = mul(term, pw(i, e), m)
        for k, v in term.items():
            _add_into(out, k, v)
    return out


@lru_cache(maxsize=None)
def _ring(n: int):
    R, *gens = ring(",".join(f"x{i}" for i in range(n)) if n > 1 else "x0", ZZ)
    return R


def _to(terms: dict, n: int):
    R = _ring(n)
    return R.from_dict({k: ZZ(c) for k, c in terms.items()}) if terms else R.zero


def _back(p) -> dict:
    return {tuple(k): int(c) for k, c in p.items()}


def gcd(a: dict, b: dict, n: int) -> dict:
    g = _to(a, n).gcd(_to(b, n))
    return _back(g)


def factor(a: dict, n: int):
    c, facs = _to(a, n).factor_list()
    return int(c), [(_back(f), int(e)) for f, e in facs]



def divexact(a: dict, b: dict, n: int) -> dict:
    return _back(_to(a, n).exquo(_to(b, n)))


def primitive(ints: list[int]) -> list[int]:
    """Divide an integer vector by its content, sign fixed by the first nonzero entry."""
    from math import gcd as igcd

    g = 0
    for c in ints:
        g = igcd(g, c)
    if g == 0:
        raise ValueError("zero vector is not a projective point")
    if next(c for c in ints if c) < 0:
        g = -g
    return [c // g for c in ints] if g != 1 else list(ints)


def content(ints) -> int:
    from math import gcd as igcd

    g = 0
    for c in ints:
        g = igcd(g, int(c))
    return g


def rational(a: int, b: int = 1):
    from fractions import Fraction

    return Fraction(a, b)


def prime_factors(n: int) -> list[int]:
    """Distinct primes dividing n, increasing."""
    from sympy import factorint

    n = abs(int(n))
    return sorted(int(p) for p in factorint(n)) if n > 1 else []
