"""Picard lattices of point blowups of P^2 and P^1 x P^1."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

from .algnum import sign_of
from .poly import Poly


# --------------------------------------------------------------------------
# ambient surfaces and points


@dataclass(frozen=True)
class Ambient:
    name: str
    groups: tuple[int, ...]  # sizes of the homogeneous coordinate groups
    varnames: tuple[str, ...]
    base_names: tuple[str, ...]
    base_gram: tuple[tuple[int, ...], ...]
    canonical_base: tuple[int, ...]

    @property
    def nvars(self) -> int:
        return sum(self.groups)

    @property
    def base_rank(self) -> int:
        return len(self.base_names)

    def group_slices(self) -> list[slice]:
        out, start = [], 0
        for g in self.groups:
            out.append(slice(start, start + g))
            start += g
        return out

    def group_indices(self) -> list[list[int]]:
        return [list(range(s.start, s.stop)) for s in self.group_slices()]

    def ample_base(self) -> tuple[int, ...]:
        return (1,) if self.name == "P2" else (1, 1)

    def class_of_degrees(self, degrees: Sequence[int]) -> tuple[int, ...]:
        # P2: degree d curve has class dH; P1xP1: bidegree (a,b) has class a F1 + b F2
        return tuple(degrees)


P2 = Ambient("P2", (3,), ("x", "y", "z"), ("H",), ((1,),), (-3,))
P1xP1 = Ambient("P1xP1", (2, 2), ("z0", "z1", "w0", "w1"), ("F1", "F2"), ((0, 1), (1, 0)), (-2, -2))
AMBIENTS = {"P2": P2, "P1xP1": P1xP1}


def normalize_group(v: Sequence[int]) -> tuple[int, ...]:
    """Primitive integer vector with first nonzero entry positive."""
    from . import _kernel

    if all(type(c) is int for c in v):
        ints = list(v)
    else:
        vals = [Fraction(c) for c in v]
        den = 1
        for c in vals:
            den = den * c.denominator // gcd(den, c.denominator)
        ints = [int(c * den) for c in vals]
    return tuple(_kernel.backend.primitive(ints))


def make_point(ambient: Ambient, coords) -> tuple[tuple[int, ...], ...]:
    """Normalize coordinates (flat or grouped) to a tuple of primitive groups."""
    if coords and isinstance(coords[0], (tuple, list)):
        groups = [tuple(g) for g in coords]
    else:
        flat = list(coords)
        groups = [tuple(flat[s]) for s in ambient.group_slices()]
    if [len(g) for g in groups] != list(ambient.groups):
        raise ValueError(f"point {coords!r} does not fit ambient {ambient.name}")
    return tuple(normalize_group(g) for g in groups)


def flat(point) -> tuple:
    return tuple(c for g in point for c in g)


def point_from_affine(ambient: Ambient, values: Sequence) -> tuple:
    """Affine coordinates to a point: P2 (x, y) -> [x:y:1]; P1xP1 (z, w) -> ([1:z],[1:w]).

    ``None`` stands for infinity on a P^1 factor.
    """
    if ambient.name == "P2":
        x, y = (Fraction(v) for v in values)
        return make_point(ambient, [x, y, 1])
    groups = []
    for v in values:
        groups.append((0, 1) if v is None else normalize_group([1, Fraction(v)]))
    return tuple(groups)


def point_str(point) -> str:
    return ";".join(":".join(str(c) for c in g) for g in point)


def parse_point(ambient: Ambient, text: str) -> tuple:
    groups = [g for g in text.replace(" ", "").split(";")]
    if len(groups) == 1 and ambient.name == "P1xP1":
        raise ValueError("P1xP1 points are written z0:z1;w0:w1")
    coords = [[Fraction(c) for c in g.split(":")] for g in groups]
    return make_point(ambient, coords)


# --------------------------------------------------------------------------
# blowup models


@dataclass(frozen=True)
class Proper:
    coords: tuple  # grouped primitive coordinates


@dataclass(frozen=True)
class InfinitelyNear:
    parent: int
    direction: tuple[int, int]  # tangent direction [u:v] in the parent's local chart
    extra_proximate: tuple[int, ...] = ()  # satellite points: further earlier centers


PointSpec = Proper | InfinitelyNear


@dataclass(frozen=True)
class BlowupModel:
    ambient: Ambient
    points: tuple = ()

    def __post_init__(self):
        for j, p in enumerate(self.points):
            if isinstance(p, InfinitelyNear):
                if not 0 <= p.parent < j:
                    raise ValueError("infinitely near point must follow its parent")
                if tuple(p.direction) == (0, 0):
                    raise ValueError("direction must be nonzero")
                for i in p.extra_proximate:
                    if not 0 <= i < j:
                        raise ValueError("proximity must point to earlier centers")
            elif isinstance(p, Proper):
                make_point(self.ambient, p.coords)
            else:
                raise TypeError(f"bad point spec {p!r}")

    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def rank(self) -> int:
        return self.ambient.base_rank + self.n_points

    def basis_names(self) -> list[str]:
        return list(self.ambient.base_names) + [f"e{i}" for i in range(self.n_points)]

    def proximity(self) -> list[list[bool]]:
        """prox[j][i] is True when point j is proximate to point i."""
        n = self.n_points
        prox = [[False] * n for _ in range(n)]
        for j, p in enumerate(self.points):
            if isinstance(p, InfinitelyNear):
                prox[j][p.parent] = True
                for i in p.extra_proximate:
                    prox[j][i] = True
        return prox

    def gram(self) -> list[list[int]]:
        b = self.ambient.base_rank
        n = self.rank
        G = [[0] * n for _ in range(n)]
        for i in range(b):
            for j in range(b):
                G[i][j] = self.ambient.base_gram[i][j]
        for k in range(self.n_points):
            G[b + k][b + k] = -1
        return G

    def e(self, i: int) -> tuple[int, ...]:
        v = [0] * self.rank
        v[self.ambient.base_rank + i] = 1
        return tuple(v)

    def base(self, coeffs: Sequence[int]) -> tuple[int, ...]:
        v = list(coeffs) + [0] * self.n_points
        return tuple(v)

    def strict_exceptional(self, i: int) -> tuple[int, ...]:
        """Class of the strict transform of the i-th exceptional curve: e_i - sum of proximate e_j."""
        prox = self.proximity()
        v = list(self.e(i))
        for j in range(self.n_points):
            if prox[j][i]:
                v[self.ambient.base_rank + j] -= 1
        return tuple(v)

    def curve_class(self, degrees: Sequence[int], mults: Sequence[int]) -> tuple[int, ...]:
        """Class of a strict transform with given (bi)degree and multiplicities at the centers."""
        return tuple(list(self.ambient.class_of_degrees(degrees)) + [-m for m in mults])

    def canonical_class(self) -> tuple[int, ...]:
        return tuple(list(self.ambient.canonical_base) + [1] * self.n_points)

    def ample_base_class(self) -> tuple[int, ...]:
        return self.base(self.ambient.ample_base())

    def signature(self) -> tuple[int, int]:
        """(positive, negative) inertia of the intersection form, by exact LDL^T."""
        return inertia(self.gram())


def intersection(model: BlowupModel, a: Sequence, b: Sequence):
    if len(a) != model.rank or len(b) != model.rank:
        raise ValueError("class dimension does not match the model")
    bb = model.ambient.base_rank
    total = 0
    for i in range(bb):
        for j in range(bb):
            g = model.ambient.base_gram[i][j]
            if g and a[i] and b[j]:
                total = a[i] * b[j] * g + total
    for k in range(bb, model.rank):
        if a[k] and b[k]:
            total = total - a[k] * b[k]
    return total


def canonical_class(model: BlowupModel) -> tuple[int, ...]:
    return model.canonical_class()


def inertia(G: Sequence[Sequence]) -> tuple[int, int]:
    A = [[Fraction(x) for x in row] for row in G]
    n = len(A)
    pos = neg = 0
    idx = list(range(n))
    while idx:
        piv = next((i for i in idx if A[i][i] != 0), None)
        if piv is None:
            # find an off-diagonal entry and rotate it onto the diagonal
            pair = next(((i, j) for i in idx for j in idx if i != j and A[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            for k in range(n):
                A[i][k] += A[j][k]
            for k in range(n):
                A[k][i] += A[k][j]
            continue
        d = A[piv][piv]
        pos += d > 0
        neg += d < 0
        idx.remove(piv)
        for i in idx:
            f = A[i][piv] / d
            if f:
                for k in idx:
                    A[i][k] -= f * A[piv][k]
        for i in idx:
            A[i][piv] = A[piv][i] = Fraction(0)
    return pos, neg


def add(a: Sequence, b: Sequence) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Sequence, b: Sequence) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def scale(c, a: Sequence) -> tuple:
    return tuple(c * x for x in a)


def mat_vec(M: Sequence[Sequence], v: Sequence) -> tuple:
    out = []
    for row in M:
        acc = 0
        for m, x in zip(row, v):
            if m:
                acc = m * x + acc
        out.append(acc)
    return tuple(out)


def class_str(model: BlowupModel, a: Sequence) -> str:
    parts = []
    for name, c in zip(model.basis_names(), a):
        if c:
            parts.append(f"{c}*{name}" if c != 1 else name)
    return " + ".join(parts) if parts else "0"


# --------------------------------------------------------------------------
# tracked curves


@dataclass(frozen=True)
class TrackedCurve:
    label: str
    cls: tuple[int, ...]
    poly: Poly | None = None  # defining polynomial of the ambient curve
    exc_index: int | None = None  # strict transform of an exceptional curve
    note: str = ""

    @property
    def is_exceptional(self) -> bool:
        return self.exc_index is not None


def ambient_curve(model: BlowupModel, label: str, poly: Poly, mults: Sequence[int], note: str = "") -> TrackedCurve:
    degrees = [poly.degree_in(ix) for ix in model.ambient.group_indices()]
    return TrackedCurve(label, model.curve_class(degrees, mults), poly=poly, note=note)


def exceptional_curve(model: BlowupModel, label: str, i: int, note: str = "") -> TrackedCurve:
    return TrackedCurve(label, model.strict_exceptional(i), exc_index=i, note=note)


# --------------------------------------------------------------------------
# effectivity and nefness relative to a tracked list


@dataclass
class Verdict:
    status: str  # "yes" or "unknown"
    witness: dict = field(default_factory=dict)
    note: str = ""

    @property
    def yes(self) -> bool:
        return self.status == "yes"


def leq_effective(model: BlowupModel, a1: Sequence, a2: Sequence, curves: Sequence[TrackedCurve]) -> Verdict:
    """Is a2 - a1 a nonnegative rational combination of tracked classes?"""
    diff = [Fraction(x) for x in sub(a2, a1)]
    if all(d == 0 for d in diff):
        return Verdict("yes", {c.label: Fraction(0) for c in curves})
    cols = [[Fraction(x) for x in c.cls] for c in curves]
    sol = feasible_nonneg(cols, diff)
    if sol is not None:
        return Verdict("yes", {c.label: x for c, x in zip(curves, sol) if x})
    H = model.ample_base_class()
    pairing = intersection(model, diff, H)
    note = "relative to tracked set"
    if pairing < 0:
        note = f"not effective: pairing with nef {class_str(model, H)} is {pairing} < 0"
    return Verdict("unknown", note=note)


def feasible_nonneg(cols: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction] | None:
    """Exact phase-one simplex: find x >= 0 with sum_j x_j cols[j] = b, or None."""
    m, n = len(b), len(cols)
    rows = []
    rhs = []
    for i in range(m):
        sgn = -1 if b[i] < 0 else 1
        rows.append([sgn * cols[j][i] for j in range(n)] + [Fraction(int(k == i)) for k in range(m)])
        rhs.append(sgn * b[i])
    basis = [n + i for i in range(m)]
    total = n + m
    # objective: minimise the sum of artificials; reduced costs computed each round
    for _ in range(10_000):
        cost = [Fraction(0)] * total
        for j in range(total):
            c = Fraction(1) if j >= n else Fraction(0)
            cb = sum((Fraction(1) if basis[i] >= n else Fraction(0)) * rows[i][j] for i in range(m))
            cost[j] = c - cb
        enter = next((j for j in range(total) if cost[j] < 0 and j not in basis), None)
        if enter is None:
            break
        ratios = [(rhs[i] / rows[i][enter], basis[i], i) for i in range(m) if rows[i][enter] > 0]
        if not ratios:
            return None
        _, _, r = min(ratios)
        piv = rows[r][enter]
        rows[r] = [x / piv for x in rows[r]]
        rhs[r] /= piv
        for i in range(m):
            if i != r and rows[i][enter] != 0:
                f = rows[i][enter]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
                rhs[i] -= f * rhs[r]
        basis[r] = enter
    x = [Fraction(0)] * total
    for i, j in enumerate(basis):
        x[j] = rhs[i]
    if any(x[j] != 0 for j in range(n, total)):
        return None
    return x[:n]


def nef_on_tracked(model: BlowupModel, alpha: Sequence, curves: Sequence[TrackedCurve]) -> tuple[bool, list[str]]:
    """(alpha . C) >= 0 for all tracked C and for the base nef classes; signs are certified.

    Raises UncertifiedSign when a pairing cannot be decided.
    """
    tests = [(c.label, c.cls) for c in curves]
    for k, name in enumerate(model.ambient.base_names):
        v = [0] * model.rank
        # nef test classes: H on P2, the two rulings on P1xP1
        v[k] = 1
        tests.append((name, tuple(v)))
    bad = []
    for label, cls in tests:
        if sign_of(intersection(model, alpha, cls)) < 0:
            bad.append(label)
    return not bad, bad

