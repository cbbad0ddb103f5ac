"""Places of Q, normalized absolute values and exact product-formula bookkeeping."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from sympy import isprime

PRIME_LIMIT = 2**64


class ZeroNormError(ValueError):
    """Raised when a norm of zero is requested."""


@dataclass(frozen=True, order=True)
class Place:
    """An absolute value of Q: ``p=None`` is the archimedean place."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None:
            if not isinstance(self.p, int) or self.p < 2 or self.p >= PRIME_LIMIT:
                raise ValueError(f"place must be a prime below 2^64, got {self.p!r}")
            if not _is_prime(self.p):
                raise ValueError(f"{self.p} is not prime")

    @property
    def archimedean(self) -> bool:
        return self.p is None

    @classmethod
    def parse(cls, text: str) -> "Place":
        text = text.strip().lower()
        if text in ("inf", "infinity", "oo", "∞"):
            return INF
        return cls(int(text))

    def sort_key(self):
        return (0, 0) if self.p is None else (1, self.p)

    def __str__(self):
        return "inf" if self.p is None else str(self.p)


@lru_cache(maxsize=4096)
def _is_prime(p: int) -> bool:
    # sympy's isprime is a deterministic BPSW test below 2^64
    return bool(isprime(p))


INF = Place(None)


def finite(p: int) -> Place:
    return Place(p)


@dataclass(frozen=True)
class LocalNorm:
    """|a|_v as an exact rational; ``log`` is only for reports."""

    value: Fraction
    place: Place

    @property
    def log(self) -> float:
        return log_fraction(self.value)

    def __float__(self):
        return float(self.value)


def log_fraction(q: Fraction) -> float:
    """Natural log of a positive rational, safe for huge numerators/denominators."""
    q = Fraction(q)
    if q <= 0:
        raise ValueError("log of a non-positive number")
    return math.log(q.numerator) - math.log(q.denominator)


def as_fraction(a) -> Fraction:
    if isinstance(a, Fraction):
        return a
    if isinstance(a, str):
        return Fraction(a.strip())
    if isinstance(a, float):
        raise TypeError("floats are not accepted as exact rationals")
    return Fraction(a)


def valuation(a, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    a = as_fraction(a)
    if a == 0:
        raise ZeroNormError("valuation of zero undefined")
    return _vp(a.numerator, p) - _vp(a.denominator, p)


def _vp(n: int, p: int) -> int:
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def p_power(p: int, e: int) -> Fraction:
    return Fraction(p) ** e


def abs_v(a, v: Place) -> LocalNorm:
    a = as_fraction(a)
    if a == 0:
        raise ZeroNormError("norm of zero undefined")
    if v.archimedean:
        return LocalNorm(abs(a), v)
    return LocalNorm(p_power(v.p, -valuation(a, v.p)), v)


def support(a) -> set[Place]:
    """Places where |a|_v != 1."""
    a = as_fraction(a)
    if a == 0:
        raise ZeroNormError("support of zero undefined")
    places = {Place(p) for p in _primes_of(a.numerator)} | {Place(p) for p in _primes_of(a.denominator)}
    if abs(a) != 1:
        places.add(INF)
    return places


def _primes_of(n: int) -> list[int]:
    from . import _kernel

    return _kernel.backend.prime_factors(n)


def product_formula_check(a) -> bool:
    """Exact check that the product of |a|_v over its support is 1."""
    a = as_fraction(a)
    prod = Fraction(1)
    for v in support(a):
        prod *= abs_v(a, v).value
    return prod == 1


def max_norm_vec(a: Sequence, v: Place) -> LocalNorm:
    coords = [as_fraction(c) for c in a]
    nonzero = [c for c in coords if c != 0]
    if not nonzero:
        raise ZeroNormError("norm of the zero vector undefined")
    return LocalNorm(max(abs_v(c, v).value for c in nonzero), v)


def vector_support(a: Iterable[int]) -> set[Place]:
    """Finite places where a nonzero integer vector has norm != 1, plus inf if its max > 1."""
    coords = [as_fraction(c) for c in a]
    out: set[Place] = set()
    for c in coords:
        if c != 0:
            out |= support(c)
    return {v for v in out if max_norm_vec(coords, v).value != 1}


def sorted_places(places: Iterable[Place]) -> list[Place]:
    return sorted(places, key=Place.sort_key)
