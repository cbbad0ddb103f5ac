"""Exact real algebraic numbers: univariate polynomial helpers, Sturm isolation,
and arithmetic in Q(lambda) with certified signs."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from threading import Lock
from typing import Sequence

# Univariate polynomials are tuples of coefficients, lowest degree first.

MAX_DEPTH_BITS = 200


class UncertifiedSign(ArithmeticError):
    """Sign could not be decided before the refinement cap."""


def trim(p: Sequence) -> tuple:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def deg(p: Sequence) -> int:
    return len(trim(p)) - 1


def padd(a, b) -> tuple:
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def psub(a, b) -> tuple:
    return padd(a, [-c for c in b])


def pmul(a, b) -> tuple:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim(out)


def pscale(a, c) -> tuple:
    return trim([c * x for x in a])


def pdivmod(a, b) -> tuple[tuple, tuple]:
    """Division over Q."""
    a = [Fraction(x) for x in trim(a)]
    b = trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    lb = Fraction(b[-1])
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and a:
        c = a[-1] / lb
        shift = len(a) - len(b)
        q[shift] = c
        for i, y in enumerate(b):
            a[i + shift] -= c * y
        a = list(trim(a))
    return trim(q), trim(a)


def pexact_div_int(a, b) -> tuple:
    """Exact division of integer polynomials (used by Bareiss)."""
    q, r = pdivmod(a, b)
    if r:
        raise ArithmeticError("inexact polynomial division")
    if any(Fraction(c).denominator != 1 for c in q):
        raise ArithmeticError("non-integral quotient")
    return tuple(int(c) for c in q)


def peval(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def pderiv(p) -> tuple:
    return trim([i * p[i] for i in range(1, len(p))])


def pmonic(p) -> tuple:
    p = trim(p)
    lc = Fraction(p[-1])
    return tuple(Fraction(c) / lc for c in p)


def pgcd(a, b) -> tuple:
    a, b = trim(a), trim(b)
    while b:
        _, r = pdivmod(a, b)
        a, b = b, r
    return pmonic(a) if a else ()


def primitive_int(p) -> tuple:
    """Scale a rational polynomial to a primitive integer one with positive leading coefficient."""
    p = [Fraction(c) for c in trim(p)]
    den = 1
    for c in p:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in p]
    g = 0
    for c in ints:
        g = gcd(g, c)
    if ints[-1] < 0:
        g = -g
    return tuple(c // g for c in ints)


def pstr(p, var="x") -> str:
    terms = []
    for i in range(len(p) - 1, -1, -1):
        c = p[i]
        if c == 0:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if mono and abs(c) == 1:
            body = mono
        elif mono:
            body = f"{abs(c)}*{mono}"
        else:
            body = str(abs(c))
        terms.append(("-" if c < 0 else "+", body))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for s, b in terms[1:]:
        out += f" {s} {b}"
    return out


# --------------------------------------------------------------------------
# characteristic polynomials


def charpoly_bareiss(M: Sequence[Sequence[int]]) -> tuple:
    """det(x I - M) by fraction-free elimination over Z[x]."""
    n = len(M)
    if n == 0:
        return (1,)
    A = [[(-int(M[i][j]),) if i != j else trim((-int(M[i][j]), 1)) for j in range(n)] for i in range(n)]
    A = [[trim(e) for e in row] for row in A]
    sign = 1
    prev: tuple = (1,)
    for k in range(n - 1):
        if not A[k][k]:
            swap = next((r for r in range(k + 1, n) if A[r][k]), None)
            if swap is None:
                return ()
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = psub(pmul(A[k][k], A[i][j]), pmul(A[i][k], A[k][j]))
                A[i][j] = pexact_div_int(num, prev) if num else ()
            A[i][k] = ()
        prev = A[k][k]
    return pscale(A[n - 1][n - 1], sign)


def charpoly_cofactor(M: Sequence[Sequence[int]]) -> tuple:
    """det(x I - M) by Laplace expansion along the first row (oracle, small n only)."""
    n = len(M)
    entries = [[trim((-int(M[i][j]), 1)) if i == j else trim((-int(M[i][j]),)) for j in range(n)] for i in range(n)]

    def det(rows: tuple, cols: tuple) -> tuple:
        if not rows:
            return (1,)
        r = rows[0]
        total: tuple = ()
        for idx, c in enumerate(cols):
            e = entries[r][c]
            if not e:
                continue
            minor = det(rows[1:], cols[:idx] + cols[idx + 1:])
            term = pmul(e, minor)
            total = padd(total, term) if idx % 2 == 0 else psub(total, term)
        return total

    return det(tuple(range(n)), tuple(range(n)))


def factor_int_poly(p) -> list[tuple[tuple, int]]:
    """Irreducible factors over Q of an integer polynomial."""
    try:
        import flint

        c, facs = flint.fmpz_poly([int(x) for x in p]).factor()
        return [(tuple(int(x) for x in f.coeffs()), int(e)) for f, e in facs]
    except ImportError:  # pragma: no cover
        import sympy

        x = sympy.Symbol("x")
        expr = sum(int(c) * x**i for i, c in enumerate(p))
        _, facs = sympy.factor_list(expr)
        return [(tuple(int(c) for c in reversed(sympy.Poly(f, x).all_coeffs())), int(e)) for f, e in facs]


# --------------------------------------------------------------------------
# Sturm sequences


def sturm_sequence(p) -> list[tuple]:
    p = tuple(Fraction(c) for c in trim(p))
    seq = [p, pderiv(p)]
    while seq[-1] and deg(seq[-1]) > 0:
        _, r = pdivmod(seq[-2], seq[-1])
        if not r:
            break
        seq.append(tuple(-c for c in r))
    return [s for s in seq if s]


def _sign_changes(seq, x) -> int:
    signs = []
    for s in seq:
        v = peval(s, x)
        if v:
            signs.append(v > 0)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(seq, lo, hi) -> int:
    """Number of distinct real roots in (lo, hi] for squarefree input."""
    return _sign_changes(seq, lo) - _sign_changes(seq, hi)


def root_bound(p) -> Fraction:
    p = trim(p)
    lc = abs(Fraction(p[-1]))
    return 1 + max((abs(Fraction(c)) / lc for c in p[:-1]), default=Fraction(0))


def isolate_real_roots(p) -> list[tuple[Fraction, Fraction]]:
    """Disjoint intervals (lo, hi], each containing exactly one real root of squarefree p."""
    p = trim(p)
    if deg(p) < 1:
        return []
    seq = sturm_sequence(p)
    B = root_bound(p)
    out = []
    stack = [(-B, B)]
    while stack:
        lo, hi = stack.pop()
        n = count_roots(seq, lo, hi)
        if n == 0:
            continue
        if n == 1:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        stack.append((lo, mid))
        stack.append((mid, hi))
    return sorted(out)


def refine_root(p, lo: Fraction, hi: Fraction, width: Fraction) -> tuple[Fraction, Fraction]:
    """Bisect (lo, hi] containing one simple root until hi - lo <= width."""
    p = tuple(Fraction(c) for c in trim(p))
    if peval(p, hi) == 0:
        return hi, hi
    shi = peval(p, hi) > 0
    while hi - lo > width:
        mid = (lo + hi) / 2
        v = peval(p, mid)
        if v == 0:
            return mid, mid
        if (v > 0) == shi:
            hi = mid
        else:
            lo = mid
    return lo, hi


# --------------------------------------------------------------------------
# real algebraic numbers and the field Q(lambda)


class AlgNumber:
    """A real root of an irreducible integer polynomial, with a refinable isolating interval."""

    def __init__(self, minpoly: Sequence[int], lo, hi):
        self.minpoly = primitive_int(minpoly)
        self._lo = Fraction(lo)
        self._hi = Fraction(hi)
        self._lock = Lock()
        if self.degree == 1:
            r = Fraction(-self.minpoly[0], self.minpoly[1])
            self._lo = self._hi = r

    @property
    def degree(self) -> int:
        return len(self.minpoly) - 1

    @property
    def rational(self) -> Fraction | None:
        return self._lo if self.degree == 1 else None

    def interval(self, width: Fraction | float = Fraction(1, 10**6)) -> tuple[Fraction, Fraction]:
        width = Fraction(width)
        with self._lock:
            if self._hi - self._lo > width:
                self._lo, self._hi = refine_root(self.minpoly, self._lo, self._hi, width)
            return self._lo, self._hi

    def __float__(self):
        lo, hi = self.interval(Fraction(1, 2**60))
        return float((lo + hi) / 2)

    def field(self) -> "NumberField":
        return NumberField(self)

    def to_dict(self) -> dict:
        lo, hi = self.interval(Fraction(1, 10**6))
        return {
            "minimal_polynomial": list(self.minpoly),
            "minimal_polynomial_text": pstr(self.minpoly),
            "interval": [str(lo), str(hi)],
            "interval_width": float(hi - lo),
            "approx": float(self),
        }

    def __repr__(self):
        lo, hi = self.interval()
        return f"AlgNumber({pstr(self.minpoly)}, ~{float((lo + hi) / 2):.9f})"


@dataclass(frozen=True)
class NumberField:
    """Q(lambda) represented as Q[x]/(minpoly)."""

    gen: AlgNumber
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    @property
    def modulus(self) -> tuple:
        return tuple(Fraction(c) for c in self.gen.minpoly)

    def __call__(self, value) -> "QLam":
        if isinstance(value, QLam):
            return value
        return QLam(self, (Fraction(value),))

    @property
    def lam(self) -> "QLam":
        return QLam(self, (Fraction(0), Fraction(1)))

    def zero(self) -> "QLam":
        return QLam(self, ())

    def one(self) -> "QLam":
        return QLam(self, (Fraction(1),))


class QLam:
    """Element of Q(lambda): polynomial in lambda of degree < [Q(lambda):Q]."""

    __slots__ = ("K", "coeffs")

    def __init__(self, K: NumberField, coeffs: Sequence):
        self.K = K
        c = trim([Fraction(x) for x in coeffs])
        if len(c) > K.gen.degree:
            _, c = pdivmod(c, K.modulus)
        self.coeffs = tuple(Fraction(x) for x in c)

    def _co(self, other) -> "QLam":
        if isinstance(other, QLam):
            return other
        if isinstance(other, (int, Fraction)):
            return QLam(self.K, (other,))
        return NotImplemented

    def __add__(self, other):
        other = self._co(other)
        if other is NotImplemented:
            return other
        return QLam(self.K, padd(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __neg__(self):
        return QLam(self.K, [-c for c in self.coeffs])

    def __sub__(self, other):
        other = self._co(other)
        if other is NotImplemented:
            return other
        return QLam(self.K, psub(self.coeffs, other.coeffs))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._co(other)
        if other is NotImplemented:
            return other
        return QLam(self.K, pmul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def inverse(self) -> "QLam":
        if not self.coeffs:
            raise ZeroDivisionError("inverse of zero in Q(lambda)")
        # extended Euclid: s*a + t*m = 1
        r0, r1 = self.K.modulus, self.coeffs
        s0, s1 = (), (Fraction(1),)
        while r1:
            q, r = pdivmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, psub(s0, pmul(q, s1))
        # r0 is a nonzero constant since minpoly is irreducible
        if deg(r0) != 0:
            raise ArithmeticError("modulus is not irreducible")
        return QLam(self.K, pscale(s0, 1 / Fraction(r0[0])))

    def __truediv__(self, other):
        other = self._co(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._co(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.K.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        other = self._co(other)
        if other is NotImplemented:
            return False
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def enclosure(self, width=Fraction(1, 2**40)) -> tuple[Fraction, Fraction]:
        """Rational interval containing the real value, from interval Horner evaluation."""
        lo, hi = self.K.gen.interval(width)
        return interval_eval(self.coeffs, lo, hi)

    def sign(self) -> int:
        """Certified sign; raises UncertifiedSign past the refinement cap."""
        if not self.coeffs:
            return 0
        w = Fraction(1, 2**20)
        while True:
            a, b = self.enclosure(w)
            if a > 0:
                return 1
            if b < 0:
                return -1
            if w < Fraction(1, 2**MAX_DEPTH_BITS):
                raise UncertifiedSign("sign not certified at width 2^-200")
            w = w / 2**20

    def __float__(self):
        a, b = self.enclosure(Fraction(1, 2**60))
        return float((a + b) / 2)

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    def __repr__(self):
        return f"QLam({pstr(self.coeffs, 'L')})"


def interval_eval(coeffs, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    a = b = Fraction(0)
    for c in reversed(coeffs):
        # multiply [a,b] by [lo,hi] then add c
        prods = (a * lo, a * hi, b * lo, b * hi)
        a, b = min(prods) + c, max(prods) + c
    return a, b


def sign_of(x) -> int:
    """Certified sign of an int, Fraction or QLam."""
    if isinstance(x, QLam):
        return x.sign()
    return (x > 0) - (x < 0)


def to_float(x) -> float:
    return float(x)


def largest_real_root(p) -> AlgNumber | None:
    """Largest real root among the irreducible factors of an integer polynomial."""
    best = None
    for f, _ in factor_int_poly(p):
        if deg(f) < 1:
            continue
        roots = isolate_real_roots(f)
        if not roots:
            continue
        lo, hi = roots[-1]
        cand = AlgNumber(f, lo, hi)
        if best is None or _alg_greater(cand, best):
            best = cand
    return best


def _alg_greater(a: AlgNumber, b: AlgNumber) -> bool:
    if a.minpoly == b.minpoly:
        return False
    w = Fraction(1, 2**10)
    while True:
        alo, ahi = a.interval(w)
        blo, bhi = b.interval(w)
        if alo > bhi:
            return True
        if ahi < blo:
            return False
        w /= 2**10
