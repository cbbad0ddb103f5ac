"""Polynomial kernel backed by FLINT's fmpz_mpoly (compiled)."""
from __future__ import annotations

from functools import lru_cache

import flint

NAME = "flint"


@lru_cache(maxsize=None)
def _ctx(n: int):
    return flint.fmpz_mpoly_ctx.get(tuple(f"x{i}" for i in range(n)), "degrevlex")


def _to(terms: dict, n: int):
    return _ctx(n).from_dict(terms) if terms else _ctx(n).from_dict({})


def _back(p) -> dict:
    return {tuple(int(e) for e in k): int(c) for k, c in p.to_dict().items()}


def mul(a: dict, b: dict, n: int) -> dict:
    return _back(_to(a, n) * _to(b, n))


def power(a: dict, k: int, n: int) -> dict:
    return _back(_to(a, n) ** k)


def compose(p: dict, n: int, subs: list[dict], m: int) -> dict:
    if not p:
        return {}
    ctx = _ctx(m)
    args = [_to(s, m) for s in subs]
    return _back(_to(p, n).compose(*args, ctx=ctx))


def gcd(a: dict, b: dict, n: int) -> dict:
    return _back(_to(a, n).gcd(_to(b, n)))


def factor(a: dict, n: int):
    c, facs = _to(a, n).factor()
    return int(c), [(_back(f), int(e)) for f, e in facs]


def divexact(a: dict, b: dict, n: int) -> dict:
    return _back(_to(a, n) / _to(b, n))


_SMALL = 1 << 4096


def primitive(ints: list[int]) -> list[int]:
    """As pure.primitive; FLINT's gcd is much faster once entries have many limbs."""
    if all(-_SMALL < c < _SMALL for c in ints):
        from .pure import primitive as small

        return small(ints)
    fs = [flint.fmpz(c) for c in ints]
    g = flint.fmpz(0)
    for c in fs:
        g = g.gcd(c)
    if g == 0:
        raise ValueError("zero vector is not a projective point")
    if next(c for c in ints if c) < 0:
        g = -g
    return [int(c // g) for c in fs] if g != 1 else list(ints)


def content(ints) -> int:
    ints = [int(c) for c in ints]
    if all(-_SMALL < c < _SMALL for c in ints):
        from .pure import content as small

        return small(ints)
    g = flint.fmpz(0)
    for c in ints:
        g = g.gcd(flint.fmpz(c))
    return int(g)


def rational(a: int, b: int = 1):
    return flint.fmpq(a, b)


def prime_factors(n: int) -> list[int]:
    n = abs(int(n))
    if n <= 1:
        return []
    return sorted(int(p) for p, _ in flint.fmpz(n).factor())
