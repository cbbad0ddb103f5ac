"""Formal arcs: truncated power series used to evaluate maps on blowup models.

A point of a blowup model is either a point of the ambient surface that is
not a blowup center, or a point on the exceptional curve of center ``i`` given
by a tangent direction [u:v] in that center's local chart.  Charts:

* proper center: affine chart of the first nonzero coordinate of each group,
  local coordinates (s, t) vanishing at the center;
* infinitely near center with direction [u:v] at its parent: (s, t/s - v/u)
  when u != 0, otherwise (s/t, t).
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .lattice import BlowupModel, InfinitelyNear, Proper, make_point, normalize_group

DEFAULT_PREC = 24


class PrecisionLoss(ArithmeticError):
    pass


class Series:
    """Power series in e with coefficients known up to e^(prec-1)."""

    __slots__ = ("c", "prec")

    def __init__(self, coeffs: Sequence, prec: int):
        c = [Fraction(x) for x in coeffs[:prec]]
        c += [Fraction(0)] * (prec - len(c))
        self.c = c
        self.prec = prec

    @classmethod
    def const(cls, a, prec: int) -> "Series":
        return cls([a], prec)

    def _co(self, other) -> "Series":
        if isinstance(other, Series):
            return other
        return Series.const(other, self.prec)

    def __add__(self, other):
        o = self._co(other)
        p = min(self.prec, o.prec)
        return Series([a + b for a, b in zip(self.c[:p], o.c[:p])], p)

    __radd__ = __add__

    def __neg__(self):
        return Series([-a for a in self.c], self.prec)

    def __sub__(self, other):
        return self + (-self._co(other))

    def __rsub__(self, other):
        return self._co(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Series([a * other for a in self.c], self.prec)
        o = self._co(other)
        p = min(self.prec, o.prec)
        out = [Fraction(0)] * p
        for i in range(p):
            ai = self.c[i]
            if ai:
                for j in range(p - i):
                    if o.c[j]:
                        out[i + j] += ai * o.c[j]
        return Series(out, p)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Series.const(1, self.prec)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def order(self) -> int | None:
        """Index of the first nonzero coefficient, or None if zero to known precision."""
        for i, a in enumerate(self.c):
            if a:
                return i
        return None

    def shift_down(self, m: int) -> "Series":
        if any(self.c[:m]):
            raise ArithmeticError("series not divisible by e^m")
        if m >= self.prec:
            raise PrecisionLoss("no coefficients left")
        return Series(self.c[m:], self.prec - m)

    def inverse(self) -> "Series":
        if not self.c[0]:
            raise ZeroDivisionError("series is not a unit")
        inv = [Fraction(0)] * self.prec
        inv[0] = 1 / self.c[0]
        for n in range(1, self.prec):
            acc = Fraction(0)
            for k in range(1, n + 1):
                if self.c[k]:
                    acc += self.c[k] * inv[n - k]
            inv[n] = -acc * inv[0]
        return Series(inv, self.prec)

    def divide(self, other: "Series") -> "Series":
        """self / other where ord(self) >= ord(other); precision drops by ord(other)."""
        m = other.order()
        if m is None:
            raise PrecisionLoss("divisor vanishes to known precision")
        return self.shift_down(m) * other.shift_down(m).inverse()

    def __repr__(self):
        return f"Series({[str(a) for a in self.c[:6]]}.., prec={self.prec})"


# --------------------------------------------------------------------------
# model points


@dataclass(frozen=True)
class ModelPoint:
    """A point of a blowup model: ``center is None`` means a non-center ambient point."""

    base: tuple  # grouped ambient coordinates
    center: int | None = None
    direction: tuple[int, int] | None = None

    @property
    def proper(self) -> bool:
        return self.center is None

    def to_json(self):
        d = {"base": [list(g) for g in self.base]}
        if self.center is not None:
            d["center"] = self.center
            d["direction"] = list(self.direction)
        return d

    def __str__(self):
        b = ";".join(":".join(str(c) for c in g) for g in self.base)
        if self.center is None:
            return f"[{b}]"
        return f"[{b}]@e{self.center}<{self.direction[0]}:{self.direction[1]}>"


def model_point_from_json(model: BlowupModel, d) -> ModelPoint:
    base = make_point(model.ambient, d["base"])
    if "center" in d:
        return ModelPoint(base, int(d["center"]), tuple(normalize_group(d["direction"])))
    return ModelPoint(base)


def norm_direction(u, v) -> tuple[int, int]:
    return normalize_group([u, v])


# --------------------------------------------------------------------------
# charts


def _chart_indices(point) -> list[int]:
    """For each group, the index (within group) of the first nonzero coordinate."""
    return [next(i for i, c in enumerate(g) if c) for g in point]


def local_coords_proper(model: BlowupModel, center_point, arc: Sequence[Series]) -> list[Series]:
    """Local (s, t) coordinates at a proper point for an arc through it."""
    amb = model.ambient
    slices = amb.group_slices()
    idxs = _chart_indices(center_point)
    out = []
    for gi, (sl, piv) in enumerate(zip(slices, idxs)):
        coords = arc[sl]
        pt = center_point[gi]
        inv = coords[piv].inverse()
        for j in range(len(coords)):
            if j != piv:
                out.append(coords[j] * inv - Fraction(pt[j], pt[piv]))
    return out


def ambient_from_local(model: BlowupModel, center_point, s: Series, t: Series) -> list[Series]:
    """Inverse of local_coords_proper: homogeneous arc with pivot coordinates equal to 1."""
    idxs = _chart_indices(center_point)
    locals_ = iter([s, t])
    out: list[Series] = []
    for gi, piv in enumerate(idxs):
        pt = center_point[gi]
        grp = []
        for j in range(len(pt)):
            if j == piv:
                grp.append(Series.const(1, s.prec))
            else:
                grp.append(next(locals_) + Fraction(pt[j], pt[piv]))
        out.extend(grp)
    return out


def chain(model: BlowupModel, i: int) -> list[int]:
    """Centers from the proper ancestor down to i."""
    out = [i]
    while isinstance(model.points[out[-1]], InfinitelyNear):
        out.append(model.points[out[-1]].parent)
    return out[::-1]


def proper_ancestor_coords(model: BlowupModel, i: int):
    return model.points[chain(model, i)[0]].coords


def descend(s: Series, t: Series, direction) -> tuple[Series, Series]:
    """Chart at the infinitely near point in the given direction."""
    u, v = direction
    if u != 0:
        return s, t.divide(s) - Fraction(v, u)
    return s.divide(t), t


def ascend(s: Series, t: Series, direction) -> tuple[Series, Series]:
    """Inverse of ``descend``."""
    u, v = direction
    if u != 0:
        return s, s * (t + Fraction(v, u))
    return s * t, t


def children(model: BlowupModel, i: int) -> list[int]:
    return [j for j, p in enumerate(model.points) if isinstance(p, InfinitelyNear) and p.parent == i]


def proper_centers(model: BlowupModel) -> dict:
    return {make_point(model.ambient, p.coords): i for i, p in enumerate(model.points) if isinstance(p, Proper)}


# --------------------------------------------------------------------------
# locating an arc on the model


def leading_point(model: BlowupModel, arc: Sequence[Series]) -> tuple[tuple, list[Series]]:
    """Normalize each coordinate group by its lowest power of e; return the base point and arc."""
    out: list[Series] = []
    base = []
    for sl in model.ambient.group_slices():
        grp = arc[sl]
        orders = [g.order() for g in grp]
        known = [o for o in orders if o is not None]
        if not known:
            raise PrecisionLoss("coordinate group vanishes to known precision")
        m = min(known)
        grp = [g.shift_down(m) if g.order() is not None else Series([], g.prec - m) for g in grp]
        base.append(tuple(g.c[0] for g in grp))
        out.extend(grp)
    return make_point(model.ambient, base), out


def locate(model: BlowupModel, arc: Sequence[Series]) -> ModelPoint:
    """Model point at e=0 of an arc given in ambient homogeneous coordinates."""
    base, arc = leading_point(model, arc)
    centers = proper_centers(model)
    if base not in centers:
        return ModelPoint(base)
    i = centers[base]
    s, t = local_coords_proper(model, base, arc)
    while True:
        os_, ot = s.order(), t.order()
        known = [o for o in (os_, ot) if o is not None]
        if not known:
            raise PrecisionLoss("arc is constant at a center to known precision")
        k = min(known)
        d = norm_direction(s.c[k] if k < s.prec else 0, t.c[k] if k < t.prec else 0)
        nxt = next((j for j in children(model, i) if norm_direction(*model.points[j].direction) == d), None)
        if nxt is None:
            return ModelPoint(base, i, d)
        s, t = descend(s, t, d)
        i = nxt


def arc_through(model: BlowupModel, pt: ModelPoint, rng: random.Random, prec: int = DEFAULT_PREC) -> list[Series]:
    """A generic polynomial arc whose lift passes through ``pt`` at e = 0."""
    def r():
        return Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 5))

    if pt.proper:
        coords = [c for g in pt.base for c in g]
        return [Series([c, r(), r()], prec) for c in coords]
    u, v = pt.direction
    s = Series([0, u, r(), r()], prec)
    t = Series([0, v, r(), r()], prec)
    path = chain(model, pt.center)
    # path[-1] is the center; walk back up through parents
    for j in reversed(path[1:]):
        s, t = ascend(s, t, model.points[j].direction)
    return ambient_from_local(model, pt.base, s, t)


def arc_image(components: Sequence, arc: Sequence[Series]) -> list[Series]:
    """Apply polynomial components (flat list) to an arc."""
    return [p.evaluate(arc) for p in components]

