"""Sparse multivariate polynomials with integer coefficients.

Heavy operations (products of large polynomials, composition, gcd, factoring)
are routed through the kernel selected in ``birdyn._kernel``.
"""
from __future__ import annotations

import ast
from fractions import Fraction
from math import gcd as igcd
from typing import Iterable, Mapping, Sequence

from . import _kernel

# products below this many term pairs are done inline
_INLINE_MUL = 64


class Poly:
    __slots__ = ("terms", "nvars", "_hash")

    def __init__(self, terms: Mapping[tuple, int], nvars: int):
        self.terms = {k: int(c) for k, c in terms.items() if c}
        self.nvars = nvars
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def const(cls, c: int, nvars: int) -> "Poly":
        return cls({(0,) * nvars: c}, nvars)

    @classmethod
    def var(cls, i: int, nvars: int) -> "Poly":
        e = [0] * nvars
        e[i] = 1
        return cls({tuple(e): 1}, nvars)

    @classmethod
    def linear(cls, coeffs: Sequence[int]) -> "Poly":
        n = len(coeffs)
        return cls({tuple(int(i == j) for j in range(n)): c for i, c in enumerate(coeffs)}, n)

    @classmethod
    def parse(cls, text: str, varnames: Sequence[str]) -> "Poly":
        """Parse an expression in the given variables; rational coefficients are cleared."""
        rat = parse_rational(text, varnames)
        den = 1
        for c in rat.values():
            den = den * c.denominator // igcd(den, c.denominator)
        return cls({k: int(c * den) for k, c in rat.items()}, len(varnames))

    # basic queries --------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        return max((sum(k) for k in self.terms), default=-1)

    def degree_in(self, idx: Iterable[int]) -> int:
        idx = list(idx)
        return max((sum(k[i] for i in idx) for k in self.terms), default=-1)

    def is_homogeneous_in(self, idx: Iterable[int]) -> bool:
        idx = list(idx)
        return len({sum(k[i] for i in idx) for k in self.terms}) <= 1

    def content(self) -> int:
        g = 0
        for c in self.terms.values():
            g = igcd(g, c)
        return g

    def leading_sign(self) -> int:
        if not self.terms:
            return 0
        return 1 if self.terms[max(self.terms)] > 0 else -1

    def primitive(self) -> "Poly":
        """Divide by content, leading coefficient made positive."""
        g = self.content()
        if g == 0:
            return self
        g *= self.leading_sign()
        return Poly({k: c // g for k, c in self.terms.items()}, self.nvars)

    def coefficient_l1(self) -> int:
        return sum(abs(c) for c in self.terms.values())

    # arithmetic ----------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return Poly(out, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return Poly({k: -c for k, c in self.terms.items()}, self.nvars)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        other = self._coerce(other)
        if len(self.terms) * len(other.terms) <= _INLINE_MUL:
            out: dict = {}
            for ea, ca in self.terms.items():
                for eb, cb in other.terms.items():
                    k = tuple(x + y for x, y in zip(ea, eb))
                    out[k] = out.get(k, 0) + ca * cb
            return Poly(out, self.nvars)
        return Poly(_kernel.backend.mul(self.terms, other.terms, self.nvars), self.nvars)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        if k == 0:
            return Poly.const(1, self.nvars)
        if k == 1:
            return self
        return Poly(_kernel.backend.power(self.terms, k, self.nvars), self.nvars)

    def scale(self, c: int) -> "Poly":
        return Poly({k: v * c for k, v in self.terms.items()}, self.nvars)

    def exact_div_int(self, c: int) -> "Poly":
        out = {}
        for k, v in self.terms.items():
            q, r = divmod(v, c)
            if r:
                raise ValueError("inexact integer division")
            out[k] = q
        return Poly(out, self.nvars)

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            return other
        if isinstance(other, int):
            return Poly.const(other, self.nvars)
        return NotImplemented

    def __eq__(self, other):
        return isinstance(other, Poly) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    # evaluation / substitution ------------------------------------------
    def __call__(self, *point):
        return self.evaluate(point)

    def evaluate(self, point: Sequence):
        """Evaluate at a point with int, Fraction or any ring-like entries."""
        if len(point) != self.nvars:
            raise ValueError("point has wrong length")
        powers: list[dict[int, object]] = [{0: 1} for _ in point]
        total = 0
        for k, c in self.terms.items():
            term = c
            for i, e in enumerate(k):
                if e:
                    cache = powers[i]
                    if e not in cache:
                        cache[e] = point[i] ** e
                    term = term * cache[e]
            total = total + term
        return total

    def compose(self, subs: Sequence["Poly"]) -> "Poly":
        if len(subs) != self.nvars:
            raise ValueError("need one substitution per variable")
        m = subs[0].nvars
        return Poly(_kernel.backend.compose(self.terms, self.nvars, [s.terms for s in subs], m), m)

    def derivative(self, i: int) -> "Poly":
        out = {}
        for k, c in self.terms.items():
            if k[i]:
                e = list(k)
                e[i] -= 1
                out[tuple(e)] = c * k[i]
        return Poly(out, self.nvars)

    def gcd(self, other: "Poly") -> "Poly":
        if self.is_zero():
            return other.primitive()
        if other.is_zero():
            return self.primitive()
        return Poly(_kernel.backend.gcd(self.terms, other.terms, self.nvars), self.nvars).primitive()

    def factor(self) -> tuple[int, list[tuple["Poly", int]]]:
        c, facs = _kernel.backend.factor(self.terms, self.nvars)
        return c, [(Poly(f, self.nvars), e) for f, e in facs]

    def to_string(self, varnames: Sequence[str]) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, reverse=True):
            c = self.terms[k]
            mono = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in zip(varnames, k) if e
            )
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if mono:
                body = mono if a == 1 else f"{a}*{mono}"
            else:
                body = str(a)
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for s, b in parts[1:]:
            out += f" {s} {b}"
        return out

    def __repr__(self):
        return f"Poly({self.to_string([f'x{i}' for i in range(self.nvars)])})"


def exact_quotient(num: Poly, den: Poly) -> Poly:
    """Exact multivariate division num/den (raises if not exact)."""
    if den.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if len(den.terms) > 1:
        return Poly(_kernel.backend.divexact(num.terms, den.terms, num.nvars), num.nvars)
    # dense-ish long division in degrevlex-free form: repeatedly cancel max term
    n = num.nvars
    rem = dict(num.terms)
    dlead = max(den.terms)
    dc = den.terms[dlead]
    quot: dict = {}
    while rem:
        lead = max(rem)
        shift = tuple(a - b for a, b in zip(lead, dlead))
        if min(shift) < 0:
            raise ValueError("division is not exact")
        q, r = divmod(rem[lead], dc)
        if r:
            raise ValueError("division is not exact")
        quot[shift] = q
        for k, c in den.terms.items():
            kk = tuple(a + b for a, b in zip(k, shift))
            v = rem.get(kk, 0) - q * c
            if v:
                rem[kk] = v
            else:
                rem.pop(kk, None)
    return Poly(quot, n)


# --------------------------------------------------------------------------
# parsing


def parse_rational(text: str, varnames: Sequence[str]) -> dict[tuple, Fraction]:
    n = len(varnames)
    index = {v: i for i, v in enumerate(varnames)}
    tree = ast.parse(text.replace("^", "**"), mode="eval")

    def add(a, b, sign=1):
        out = dict(a)
        for k, c in b.items():
            v = out.get(k, 0) + sign * c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return out

    def mul(a, b):
        out: dict = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                k = tuple(x + y for x, y in zip(ea, eb))
                v = out.get(k, 0) + ca * cb
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        return out

    def const_of(d):
        if not d:
            return Fraction(0)
        if set(d) != {(0,) * n}:
            raise ValueError("expected a constant")
        return d[(0,) * n]

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return {(0,) * n: Fraction(node.value)} if node.value else {}
        if isinstance(node, ast.Name):
            if node.id not in index:
                raise ValueError(f"unknown variable {node.id!r}")
            e = [0] * n
            e[index[node.id]] = 1
            return {tuple(e): Fraction(1)}
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return {k: -c for k, c in v.items()} if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Add):
                return add(ev(node.left), ev(node.right))
            if isinstance(node.op, ast.Sub):
                return add(ev(node.left), ev(node.right), -1)
            if isinstance(node.op, ast.Mult):
                return mul(ev(node.left), ev(node.right))
            if isinstance(node.op, ast.Div):
                d = const_of(ev(node.right))
                if d == 0:
                    raise ValueError("division by zero")
                return {k: c / d for k, c in ev(node.left).items()}
            if isinstance(node.op, ast.Pow):
                e = const_of(ev(node.right))
                if e.denominator != 1 or e < 0:
                    raise ValueError("exponents must be nonnegative integers")
                base = ev(node.left)
                out = {(0,) * n: Fraction(1)}
                for _ in range(int(e)):
                    out = mul(out, base)
                return out
        raise ValueError(f"unsupported syntax in polynomial: {ast.dump(node)}")

    return ev(tree)
