"""Birational maps given by coordinate polynomials: composition, evaluation,
multiplicities, and verification of declared indeterminacy/exceptional data."""
from __future__ import annotations

import hashlib
import json
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

from .arcs import (
    DEFAULT_PREC,
    ModelPoint,
    PrecisionLoss,
    arc_image,
    arc_through,
    chain,
    locate,
    proper_centers,
)
from .lattice import (
    Ambient,
    BlowupModel,
    InfinitelyNear,
    P2,
    Proper,
    flat,
    make_point,
)
from .poly import Poly, exact_quotient, parse_rational


class MapError(ValueError):
    """Input data does not describe a valid birational map."""


@dataclass(frozen=True)
class IndeterminacyHit:
    point: object

    def __bool__(self):
        return False


# --------------------------------------------------------------------------
# polynomial maps


@dataclass(frozen=True)
class PolyMap:
    ambient: Ambient
    components: tuple  # flat tuple of Poly, grouped like the ambient coordinates

    def __post_init__(self):
        if len(self.components) != self.ambient.nvars:
            raise MapError("wrong number of components")
        for grp in self.groups():
            if all(p.is_zero() for p in grp):
                raise MapError("a component group is identically zero")
            for gi, ix in enumerate(self.ambient.group_indices()):
                degs = {p.degree_in(ix) for p in grp if not p.is_zero()}
                if len(degs) != 1 or not all(p.is_homogeneous_in(ix) for p in grp):
                    raise MapError("components must be (bi)homogeneous of a common (bi)degree")

    @classmethod
    def parse(cls, ambient: Ambient, texts: Sequence[str]) -> "PolyMap":
        """Components as strings; rational coefficients are cleared per coordinate group."""
        if len(texts) != ambient.nvars:
            raise MapError("wrong number of components")
        rats = [parse_rational(t, ambient.varnames) for t in texts]
        comps = []
        for s in ambient.group_slices():
            den = 1
            for r in rats[s]:
                for c in r.values():
                    den = den * c.denominator // gcd(den, c.denominator)
            comps.extend(Poly({k: int(c * den) for k, c in r.items()}, ambient.nvars) for r in rats[s])
        return cls(ambient, tuple(comps)).normalized()

    @classmethod
    def identity(cls, ambient: Ambient) -> "PolyMap":
        n = ambient.nvars
        return cls(ambient, tuple(Poly.var(i, n) for i in range(n)))

    def groups(self) -> list[tuple]:
        return [self.components[s] for s in self.ambient.group_slices()]

    def degrees(self) -> tuple:
        """Per output group, the degree in each source coordinate group."""
        out = []
        for grp in self.groups():
            p = next(q for q in grp if not q.is_zero())
            out.append(tuple(p.degree_in(ix) for ix in self.ambient.group_indices()))
        return tuple(out)

    @property
    def degree(self) -> int:
        """Total degree on P2 (for P1xP1 the sum of all bidegree entries)."""
        return sum(sum(d) for d in self.degrees())

    def normalized(self) -> "PolyMap":
        """Remove common factors and content per group; fix the sign."""
        comps = []
        for grp in self.groups():
            nz = [p for p in grp if not p.is_zero()]
            g = nz[0].primitive()
            for p in nz[1:]:
                if g.total_degree() == 0:
                    break
                g = g.gcd(p)
            if g.total_degree() > 0:
                grp = tuple(exact_quotient(p, g) if not p.is_zero() else p for p in grp)
            c = 0
            for p in grp:
                c = gcd(c, p.content())
            first = next(p for p in grp if not p.is_zero())
            c *= first.leading_sign()
            comps.extend(p.exact_div_int(c) for p in grp)
        return PolyMap(self.ambient, tuple(comps))

    def to_strings(self) -> list[str]:
        return [p.to_string(self.ambient.varnames) for p in self.components]

    def __call__(self, x):
        return evaluate(self, x)


def compose(f: PolyMap, g: PolyMap) -> PolyMap:
    """f o g, with common factors removed."""
    if f.ambient != g.ambient:
        raise MapError("ambient mismatch")
    comps = tuple(p.compose(list(g.components)) for p in f.components)
    for s in f.ambient.group_slices():
        if all(p.is_zero() for p in comps[s]):
            raise MapError("composition is identically zero (input is not birational)")
    return PolyMap(f.ambient, comps).normalized()


CACHE_ENV = "BIRDYN_CACHE_DIR"


def _poly_to_cache(p: Poly) -> list:
    # hex coefficients: no decimal digit limits, exact round trip
    return [[list(k), hex(c)] for k, c in sorted(p.terms.items())]


def _poly_from_cache(rows, nvars: int) -> Poly:
    return Poly({tuple(k): int(c, 16) for k, c in rows}, nvars)


def iterate_map(f: PolyMap, n: int, cache_dir: str | None = None) -> list[PolyMap]:
    """[f^0, f^1, ..., f^n] by repeated composition.

    Iterates are cached on disk when ``cache_dir`` or $BIRDYN_CACHE_DIR is set.
    """
    cache_dir = cache_dir or os.environ.get(CACHE_ENV)
    path = None
    out = [PolyMap.identity(f.ambient)]
    nv = f.ambient.nvars
    if cache_dir:
        key = hashlib.sha256(json.dumps([f.ambient.name, f.to_strings()]).encode()).hexdigest()[:24]
        path = os.path.join(cache_dir, f"iterates-{key}.json")
        try:
            with open(path, encoding="utf-8") as fh:
                stored = json.load(fh)
            if stored.get("format") == "terms/1":
                out = [PolyMap(f.ambient, tuple(_poly_from_cache(c, nv) for c in comps))
                       for comps in stored["iterates"][: n + 1]]
        except (OSError, ValueError, KeyError, TypeError, AttributeError):
            out = [PolyMap.identity(f.ambient)]
    start = len(out)
    while len(out) <= n:
        out.append(compose(f, out[-1]))
    if path and len(out) > start:
        from .io import atomic_write

        os.makedirs(cache_dir, exist_ok=True)
        atomic_write(path, json.dumps({"format": "terms/1",
                                       "iterates": [[_poly_to_cache(p) for p in g.components] for g in out]}))
    return out[: n + 1]


def is_identity(f: PolyMap) -> bool:
    return f == PolyMap.identity(f.ambient)


def evaluate(f: PolyMap, x) -> tuple | IndeterminacyHit:
    """Image of a point in primitive coordinates, or IndeterminacyHit."""
    coords = flat(x)
    vals = [p.evaluate(coords) for p in f.components]
    groups = [vals[s] for s in f.ambient.group_slices()]
    if any(all(v == 0 for v in g) for g in groups):
        return IndeterminacyHit(x)
    return make_point(f.ambient, groups)


def lift_values(f: PolyMap, x) -> list[list[int]]:
    """F(a) for the primitive lift a of x, grouped (no normalization)."""
    coords = flat(x)
    vals = [p.evaluate(coords) for p in f.components]
    return [vals[s] for s in f.ambient.group_slices()]


def verify_inverse(f: PolyMap, g: PolyMap) -> bool:
    try:
        return is_identity(compose(f, g)) and is_identity(compose(g, f))
    except MapError:
        return False


# --------------------------------------------------------------------------
# local expansions and multiplicities


class Local:
    """Bivariate polynomial with rational coefficients in local coordinates (s, t)."""

    __slots__ = ("t",)

    def __init__(self, terms):
        self.t = {k: Fraction(c) for k, c in terms.items() if c}

    @staticmethod
    def const(c):
        return Local({(0, 0): c})

    def _co(self, o):
        return o if isinstance(o, Local) else Local.const(o)

    def __add__(self, o):
        o = self._co(o)
        out = dict(self.t)
        for k, c in o.t.items():
            out[k] = out.get(k, 0) + c
        return Local(out)

    __radd__ = __add__

    def __neg__(self):
        return Local({k: -c for k, c in self.t.items()})

    def __sub__(self, o):
        return self + (-self._co(o))

    def __mul__(self, o):
        if not isinstance(o, Local):
            return Local({k: c * o for k, c in self.t.items()})
        out: dict = {}
        for a, ca in self.t.items():
            for b, cb in o.t.items():
                k = (a[0] + b[0], a[1] + b[1])
                out[k] = out.get(k, 0) + ca * cb
        return Local(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = Local.const(1)
        for _ in range(k):
            out = out * self
        return out

    def order(self) -> int | None:
        return min((a + b for a, b in self.t), default=None)

    def is_zero(self):
        return not self.t

    def blowup(self, direction, m: int) -> "Local":
        """Pass to the chart at the infinitely near point and divide by the exceptional power."""
        u, v = direction
        out: dict = {}
        if u != 0:
            c = Fraction(v, u)
            # t -> s (t + c)
            for (i, j), a in self.t.items():
                # (t + c)^j expanded
                binom = 1
                for r in range(j + 1):
                    k = (i + j - m, r)
                    out[k] = out.get(k, 0) + a * binom * c ** (j - r)
                    binom = binom * (j - r) // (r + 1)
        else:
            for (i, j), a in self.t.items():
                k = (i, i + j - m)
                out[k] = out.get(k, 0) + a
        if any(k[0] < 0 or k[1] < 0 for k, c in out.items() if c):
            raise ArithmeticError("exceptional power does not divide")
        return Local(out)


def local_expansion(model: BlowupModel, center_coords, polys: Sequence[Poly]) -> list[Local]:
    """Expand ambient polynomials in the local chart at a proper point."""
    amb = model.ambient
    pt = make_point(amb, center_coords)
    s, t = Local({(1, 0): 1}), Local({(0, 1): 1})
    locs = iter([s, t])
    subs = []
    for g in pt:
        piv = next(i for i, c in enumerate(g) if c)
        for j, c in enumerate(g):
            subs.append(Local.const(1) if j == piv else next(locs) + Fraction(c, g[piv]))
    return [p.evaluate(subs) for p in polys]


def multiplicities_along(model: BlowupModel, polys: Sequence[Poly], i: int) -> list[int]:
    """Multiplicities of the linear system spanned by ``polys`` at each center on the chain to i."""
    path = chain(model, i)
    locs = local_expansion(model, model.points[path[0]].coords, polys)
    mults = []
    for step, j in enumerate(path):
        orders = [L.order() for L in locs if not L.is_zero()]
        m = min(orders) if orders else 0
        mults.append(m)
        if step + 1 < len(path):
            d = model.points[path[step + 1]].direction
            locs = [L.blowup(d, m) for L in locs]
    return mults


def multiplicity_at(model: BlowupModel, polys: Sequence[Poly], i: int) -> int:
    """Vanishing order of the system at center i (after the parents' blowups)."""
    return multiplicities_along(model, polys, i)[-1]


def point_multiplicity(f: PolyMap, point) -> int:
    """multiplicity_at for a proper point given by coordinates (bare model)."""
    model = BlowupModel(f.ambient, (Proper(make_point(f.ambient, point)),))
    return max(multiplicity_at(model, grp, 0) for grp in f.groups())


def pullback_base_columns(f: PolyMap, model: BlowupModel) -> list[tuple[int, ...]]:
    """Columns of f^* on the ambient base classes: degree part minus multiplicities."""
    cols = []
    for grp, degs in zip(f.groups(), f.degrees()):
        mults = [multiplicity_at(model, grp, i) for i in range(model.n_points)]
        cols.append(model.curve_class(degs, mults))
    return cols


def curve_multiplicities(model: BlowupModel, poly: Poly) -> list[int]:
    return [multiplicity_at(model, [poly], i) for i in range(model.n_points)]


def curve_class(model: BlowupModel, poly: Poly) -> tuple[int, ...]:
    degs = [poly.degree_in(ix) for ix in model.ambient.group_indices()]
    return model.curve_class(degs, curve_multiplicities(model, poly))


def noether_check(f: PolyMap, model: BlowupModel) -> dict:
    """Sum m_i = 3(d-1) and sum m_i^2 = d^2 - 1 over the model's centers (P2 only)."""
    if f.ambient != P2:
        return {"applicable": False}
    d = f.degree
    m = [multiplicity_at(model, f.components, i) for i in range(model.n_points)]
    ok = sum(m) == 3 * (d - 1) and sum(x * x for x in m) == d * d - 1
    return {"applicable": True, "multiplicities": m, "degree": d, "status": "pass" if ok else "warn"}


# --------------------------------------------------------------------------
# rational points on curves


def rational_points_on(ambient: Ambient, poly: Poly, count: int, rng: random.Random, avoid=()) -> list[tuple]:
    """Sample rational points on {poly = 0}, preferring variables in which poly is linear."""
    found: list[tuple] = []
    seen = set(avoid)
    groups = ambient.group_indices()
    tries = 0
    while len(found) < count and tries < 400:
        tries += 1
        pt = _one_point(ambient, poly, groups, rng)
        if pt is not None and pt not in seen and poly.evaluate(flat(pt)) == 0:
            seen.add(pt)
            found.append(pt)
    return found


def _one_point(ambient, poly, groups, rng):
    n = ambient.nvars
    if ambient.name == "P2":
        lin = [i for i in range(3) if poly.degree_in([i]) == 1]
        if lin:
            i = rng.choice(lin)
            vals = [rng.randint(-12, 12) for _ in range(3)]
            vals[i] = Poly.var(i, 3)
            # poly = A * x_i + B
            sub = [v if isinstance(v, Poly) else Poly.const(v, 3) for v in vals]
            p = poly.compose(sub)
            A = p.terms.get(tuple(int(k == i) for k in range(3)), 0)
            B = p.terms.get((0, 0, 0), 0)
            if A == 0:
                return None
            coords = [Fraction(v) if not isinstance(v, Poly) else Fraction(-B, A) for v in vals]
            if all(c == 0 for c in coords):
                return None
            return make_point(ambient, coords)
        return _rational_root_point(ambient, poly, rng)
    # P1xP1: poly has bidegree (a, b); solve in a group of degree 1 or 0
    degs = [poly.degree_in(ix) for ix in groups]
    for gi in rng.sample(range(2), 2):
        if degs[gi] == 1:
            other = 1 - gi
            ov = [rng.randint(-12, 12), rng.randint(-12, 12)]
            if ov == [0, 0]:
                return None
            if degs[other] == 0:
                ov = [0, 0]
            vals = [None] * 4
            for k, ix in enumerate(groups[other]):
                vals[ix] = Poly.const(ov[k], n)
            for ix in groups[gi]:
                vals[ix] = Poly.var(ix, n)
            p = poly.compose(vals)
            e0 = tuple(int(k == groups[gi][0]) for k in range(n))
            e1 = tuple(int(k == groups[gi][1]) for k in range(n))
            A, B = p.terms.get(e0, 0), p.terms.get(e1, 0)
            if A == 0 and B == 0:
                return None
            gpt = (B, -A)
            if degs[other] == 0:
                ov = [rng.randint(-12, 12), rng.randint(-12, 12)]
                if ov == [0, 0]:
                    return None
            grouped = [None, None]
            grouped[gi] = gpt
            grouped[other] = tuple(ov)
            return make_point(ambient, grouped)
    return _rational_root_point(ambient, poly, rng)


def _rational_root_point(ambient, poly, rng):
    """Fix all but one coordinate at random and look for rational roots."""
    from .algnum import factor_int_poly

    n = ambient.nvars
    i = rng.randrange(n)
    vals = [Poly.const(rng.randint(-8, 8), n) for _ in range(n)]
    vals[i] = Poly.var(i, n)
    p = poly.compose(vals)
    uni = [0] * (p.total_degree() + 1 if not p.is_zero() else 1)
    for k, c in p.terms.items():
        uni[k[i]] += c
    if not any(uni) or len(uni) < 2:
        return None
    for fac, _ in factor_int_poly(uni):
        if len(fac) == 2:
            root = Fraction(-fac[0], fac[1])
            coords = [Fraction(next(iter(v.terms.values()), 0)) if k != i else root for k, v in enumerate(vals)]
            try:
                return make_point(ambient, [coords[s] for s in ambient.group_slices()])
            except ValueError:
                return None
    return None


# --------------------------------------------------------------------------
# birational maps with declared data


@dataclass
class BirMap:
    forward: PolyMap
    backward: PolyMap
    ind_f: tuple = ()
    ind_finv: tuple = ()
    exc_f: tuple = ()  # (Poly, image point)
    exc_finv: tuple = ()
    name: str = ""

    @property
    def ambient(self) -> Ambient:
        return self.forward.ambient

    def inverse(self) -> "BirMap":
        return BirMap(self.backward, self.forward, self.ind_finv, self.ind_f, self.exc_finv, self.exc_f,
                      name=f"({self.name})^-1")


def exceptional_verify(f: BirMap, poly: Poly, image, rng: random.Random | None = None, samples: int = 5) -> str:
    """'pass', 'fail' or 'unknown' (no rational points found)."""
    rng = rng or random.Random(0)
    c, facs = poly.factor()
    if len(facs) != 1 or facs[0][1] != 1:
        return "fail"
    pts = rational_points_on(f.ambient, poly, samples, rng, avoid=set(f.ind_f))
    if len(pts) < samples:
        return "unknown"
    target = make_point(f.ambient, image) if image is not None else None
    imgs = set()
    for p in pts:
        q = evaluate(f.forward, p)
        if isinstance(q, IndeterminacyHit):
            continue
        imgs.add(q)
    if len(imgs) != 1:
        return "fail"
    if target is not None and imgs != {target}:
        return "fail"
    return "pass"


def indeterminacy_image(f: BirMap, x) -> list[Poly]:
    """The f^-1-exceptional curves contracted onto the indeterminacy point x."""
    x = make_point(f.ambient, x)
    if x not in [make_point(f.ambient, p) for p in f.ind_f]:
        raise MapError("point is not a declared indeterminacy point")
    out = [p for p, img in f.exc_finv if make_point(f.ambient, img) == x]
    if not out:
        raise MapError("declared indeterminacy and exceptional data are inconsistent")
    return out


@dataclass
class BirMapReport:
    inverse_ok: bool
    ind_ok: list = field(default_factory=list)
    exc: list = field(default_factory=list)
    noether: dict = field(default_factory=dict)
    partition_ok: bool = True

    @property
    def ok(self) -> bool:
        return (self.inverse_ok and all(self.ind_ok) and all(v != "fail" for _, v in self.exc)
                and self.partition_ok)

    def to_dict(self):
        return {
            "inverse": self.inverse_ok,
            "indeterminacy_points_vanish": self.ind_ok,
            "exceptional_curves": [{"curve": c, "verdict": v} for c, v in self.exc],
            "noether": self.noether,
            "indeterminacy_partition": self.partition_ok,
            "ok": self.ok,
        }


def verify_birmap(f: BirMap, model: BlowupModel | None = None, rng: random.Random | None = None) -> BirMapReport:
    rng = rng or random.Random(0)
    rep = BirMapReport(verify_inverse(f.forward, f.backward))
    for m, pts in ((f.forward, f.ind_f), (f.backward, f.ind_finv)):
        for p in pts:
            rep.ind_ok.append(isinstance(evaluate(m, make_point(f.ambient, p)), IndeterminacyHit))
    names = f.ambient.varnames
    for g, exc in ((f, f.exc_f), (f.inverse(), f.exc_finv)):
        for poly, img in exc:
            rep.exc.append((poly.to_string(names), exceptional_verify(g, poly, img, rng)))
    # every indeterminacy point receives at least one contracted curve of the inverse
    for g in (f, f.inverse()):
        for x in g.ind_f:
            try:
                indeterminacy_image(g, x)
            except MapError:
                rep.partition_ok = False
    if model is not None and f.ambient == P2:
        rep.noether = noether_check(f.forward, model)
    return rep


# --------------------------------------------------------------------------
# sections on bare P2


def section_pullback(f: PolyMap, sigma: Poly) -> Poly:
    """sigma o F divided by its (positive) integer content."""
    if f.ambient != P2:
        raise MapError("sections are supported on bare P2")
    p = sigma.compose(list(f.components))
    if p.is_zero():
        raise MapError("pulled-back section vanishes identically")
    return p.exact_div_int(p.content())


def pairing_constant(f: PolyMap, sigma: Poly, tau: Poly, rng: random.Random | None = None) -> Fraction:
    """The constant (tau(f(x))/sigma(f(x))) / (tau'(x)/sigma'(x)), checked at two samples."""
    rng = rng or random.Random(1)
    sp, tp = section_pullback(f, sigma), section_pullback(f, tau)
    vals = []
    tries = 0
    while len(vals) < 2 and tries < 200:
        tries += 1
        x = [rng.randint(-50, 50) for _ in range(3)]
        if x == [0, 0, 0]:
            continue
        F = [p.evaluate(x) for p in f.components]
        sF, tF, sx, tx = sigma.evaluate(F), tau.evaluate(F), sp.evaluate(x), tp.evaluate(x)
        if 0 in (sF, tF, sx, tx):
            continue
        vals.append(Fraction(tF, sF) / Fraction(tx, sx))
    if len(vals) < 2:
        raise MapError("could not find sample points for the pairing constant")
    if vals[0] != vals[1]:
        raise MapError("pairing constant differs between samples")
    return vals[0]


# --------------------------------------------------------------------------
# maps on blowup models


def model_eval(f: PolyMap, model: BlowupModel, pt: ModelPoint, seed: int = 0, arcs: int = 3):
    """Image of a model point under the lift of f to the model (same model on both sides)."""
    if pt.proper:
        q = evaluate(f, pt.base)
        centers = proper_centers(model)
        if isinstance(q, IndeterminacyHit):
            if pt.base not in centers:
                return IndeterminacyHit(pt)
        elif q not in centers:
            return ModelPoint(q)
    rng = random.Random(hash((seed, str(pt))) & 0xFFFFFFFF)
    results = set()
    for _ in range(arcs):
        prec = DEFAULT_PREC
        while True:
            try:
                arc = arc_through(model, pt, rng, prec)
                results.add(locate(model, arc_image(f.components, arc)))
                break
            except PrecisionLoss:
                prec *= 2
                if prec > 4 * DEFAULT_PREC:
                    raise
    if len(results) == 1:
        return results.pop()
    return IndeterminacyHit(pt)


def point_on_curve(model: BlowupModel, pt: ModelPoint, curve) -> bool:
    """Incidence of a model point with a tracked curve (strict transform)."""
    if curve.poly is not None:
        if curve.poly.evaluate(flat(pt.base)) != 0:
            return False
        if pt.proper:
            return True
        # on an exceptional curve: the strict transform passes through the point
        # iff its tangent cone contains the direction (checked by an arc)
        return _strict_transform_through(model, curve.poly, pt)
    i = curve.exc_index
    if pt.proper:
        return False
    if pt.center == i:
        return True
    # a point on E_j with j a child of i may lie on the strict transform of E_i
    p = model.points[pt.center]
    if isinstance(p, InfinitelyNear) and (p.parent == i or i in p.extra_proximate):
        u, v = pt.direction
        # the strict transform of E_parent is {s = 0} in the (s, t/s - c) chart: direction [0:1]
        pdir = p.direction
        return (pdir[0] != 0 and u == 0) or (pdir[0] == 0 and v == 0)
    return False


def _strict_transform_through(model: BlowupModel, poly: Poly, pt: ModelPoint) -> bool:
    path = chain(model, pt.center)
    locs = local_expansion(model, model.points[path[0]].coords, [poly])
    L = locs[0]
    for step, j in enumerate(path):
        m = L.order() or 0
        if step + 1 < len(path):
            L = L.blowup(model.points[path[step + 1]].direction, m)
    m = L.order() or 0
    if m == 0:
        return False
    # tangent cone of L at the center contains direction (u, v)?
    u, v = pt.direction
    lead = sum(c * Fraction(u) ** a * Fraction(v) ** b for (a, b), c in L.t.items() if a + b == m)
    return lead == 0
