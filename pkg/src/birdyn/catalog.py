"""Built-in example families with stabilizing blowup models and ledgers.

Two stabilized families are supported:

* ``bd_sigma_tau(a, b)``: f = sigma o tau on P^2 where sigma is the cubic
  involution [xyz + (z-y)x^2 : xyz + (z-x)y^2 : xyz] and tau the linear
  involution [x : bx + (a+1)z - y : z], on the blowup of [1:0:0], [1:b:0],
  [0:1:0] and one point infinitely near [0:1:0].
* ``df_epsilon(eps)``: f(z, w) = (w + 1 - eps, z(w - eps)/(w + 1)) on P^1 x P^1,
  blown up along the orbit that makes it stable.

The quadratic involution [yz : xz : xy] and quadratic Henon maps are also
available on the bare plane, as a non-stable example and as test maps for
heights.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .arcs import ModelPoint
from .birmap import BirMap, MapError, PolyMap, compose, verify_inverse
from .lattice import (
    P1xP1,
    P2,
    BlowupModel,
    InfinitelyNear,
    Proper,
    exceptional_curve,
    make_point,
    point_from_affine,
)
from .picdyn import ActionLedger, ModelMap
from .poly import Poly


class CatalogError(ValueError):
    """Parameters outside the supported range of a family."""


@dataclass
class MapDefinition:
    mm: ModelMap
    family: str = ""
    params: dict = field(default_factory=dict)
    expected: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.mm.name


def _frac_str(q: Fraction) -> str:
    return str(Fraction(q))


def _tracked(model, specs):
    """specs: list of (label, poly | int exceptional index, note)."""
    from .birmap import curve_class
    from .lattice import TrackedCurve

    out = []
    for label, obj, note in specs:
        if isinstance(obj, int):
            out.append(exceptional_curve(model, label, obj, note))
        else:
            out.append(TrackedCurve(label, curve_class(model, obj), poly=obj, note=note))
    return out


def _poly(text, amb):
    return Poly.parse(text, amb.varnames)


# --------------------------------------------------------------------------
# sigma o tau on P^2


SIGMA = ["x*y*z + (-y+z)*x^2", "x*y*z + (-x+z)*y^2", "x*y*z"]


def bd_maps(a, b) -> tuple[PolyMap, PolyMap]:
    a, b = Fraction(a), Fraction(b)
    sigma = PolyMap.parse(P2, SIGMA)
    tau = PolyMap.parse(P2, ["x", f"({b})*x + ({a + 1})*z - y", "z"])
    return sigma, tau


def catalog_bd_sigma_tau(a, b, check: bool = True) -> MapDefinition:
    a, b = Fraction(a), Fraction(b)
    if b == 0:
        raise CatalogError("b = 0 merges the centers [1:0:0] and [1:b:0]")
    if a == -1:
        raise CatalogError("a = -1 moves an indeterminacy point onto [0:0:1]")
    sigma, tau = bd_maps(a, b)
    f, g = compose(sigma, tau), compose(tau, sigma)
    amb = P2
    p1, p2, p3 = make_point(amb, [1, 0, 0]), make_point(amb, [1, b, 0]), make_point(amb, [0, 1, 0])
    model = BlowupModel(amb, (Proper(p1), Proper(p2), Proper(p3), InfinitelyNear(2, (1, 1))))
    bq = lambda t: _poly(t, amb)  # noqa: E731
    ell = bq(f"({a})*z + ({b})*x - y + z")
    quad = bq(f"({a})*x*z - ({a})*z^2 + ({b})*x^2 - ({b})*x*z - x*y + y*z - z^2")
    conic = bq("x*y - x*z - y*z")
    curves = _tracked(model, [
        ("z=0", bq("z"), "strict transform of {z=0}"),
        ("E2'", 2, "exceptional curve over [0:1:0]"),
        ("E0", 0, ""),
        ("E1", 1, ""),
        ("E3", 3, "over the point infinitely near [0:1:0]"),
        ("x=0", bq("x"), ""),
        ("y=0", bq("y"), "contracted by f^-1"),
        ("ell", ell, "line contracted by f"),
        ("Q", quad, "conic contracted by f"),
        ("conic", conic, "conic contracted by f^-1"),
    ])
    A = ModelPoint(make_point(amb, [0, a + 1, 1]))
    B = ModelPoint(p2, 1, _dir(a, 1))
    O = ModelPoint(make_point(amb, [0, 0, 1]))
    P = ModelPoint(p1, 0, (1, 1))
    H = (1, 0, 0, 0, 0)
    e = [model.e(i) for i in range(4)]
    sub = lambda u, v: tuple(x - y for x, y in zip(u, v))  # noqa: E731
    ledger = ActionLedger(
        pull_E=[H, e[0], sub(H, e[3]), sub(H, e[2])],
        push_E=[e[1], H, sub(H, e[3]), sub(H, e[2])],
        images={"z=0": "z=0", "E2'": "E2'", "E0": "E1", "E1": "E0", "x=0": "E3", "E3": "x=0",
                "ell": P, "Q": O},
        preimages={"z=0": "z=0", "E2'": "E2'", "E0": "E1", "E1": "E0", "x=0": "E3", "E3": "x=0",
                   "y=0": B, "conic": A},
        ind=[A, B],
        ind_inv=[O, P],
    )
    bir = BirMap(
        f, g,
        ind_f=(p2, p3, A.base),
        ind_finv=(p1, p3, O.base),
        exc_f=((ell, p1), (quad, O.base), (bq("x"), p3)),
        exc_finv=((bq("y"), p2), (conic, A.base), (bq("x"), p3)),
        name=f"bd_sigma_tau(a={a},b={b})",
    )
    mm = ModelMap(bir, model, ledger, curves, name=bir.name)
    d = MapDefinition(mm, "bd_sigma_tau", {"a": _frac_str(a), "b": _frac_str(b)},
                      expected={"c_per": ["z=0", "E2'"], "c_exc_plus": [], "c_exc_minus": []},
                      # cubic map: orbit coordinates pass the bit cap near step 16
                      options={"height_horizon": 12})
    if check:
        _check_generic(d)
    return d


def _dir(u, v):
    from .arcs import norm_direction

    return norm_direction(u, v)


# --------------------------------------------------------------------------
# the family (z, w) -> (w + 1 - eps, z (w - eps)/(w + 1)) on P^1 x P^1


def df_maps(eps) -> tuple[PolyMap, PolyMap]:
    e = Fraction(eps)
    f = PolyMap.parse(P1xP1, ["w0", f"w1 + (1 - {e})*w0", "z0*(w1 + w0)", f"z1*(w1 - ({e})*w0)"])
    g = PolyMap.parse(P1xP1, ["w0*(z1 - z0)", f"w1*(z1 + ({e})*z0)", "z0", f"z1 - (1 - {e})*z0"])
    return f, g


def df_family(eps) -> tuple[str, int]:
    """('inverse', k) for eps = 1/k with k >= 4, ('ratio', k) for eps = k/(k+2) with k >= 3."""
    e = Fraction(eps)
    if e > 0 and e.numerator == 1 and e.denominator >= 4:
        return "inverse", e.denominator
    if e > 0 and e < 1:
        k = 2 * e / (1 - e)
        if k.denominator == 1 and k >= 3:
            return "ratio", int(k)
    raise CatalogError(f"eps = {e} is not of the form 1/k (k >= 4) or k/(k+2) (k >= 3)")


def catalog_df_epsilon(eps, check: bool = True) -> MapDefinition:
    e = Fraction(eps)
    kind, k = df_family(e)
    amb = P1xP1
    f, g = df_maps(e)
    bq = lambda t: _poly(t, amb)  # noqa: E731
    pt = lambda z, w: point_from_affine(amb, [z, w])  # noqa: E731
    Wm1, Weps = bq("w1 + w0"), bq(f"w1 - ({e})*w0")
    Z1, Zmeps = bq("z1 - z0"), bq(f"z1 + ({e})*z0")
    Lline = bq("z1*w0 - w1*z0 - z0*w0")
    q2, r2 = pt(None, e), pt(-e, None)  # Ind f and Ind f^-1 at infinity
    s_f, s_g = pt(0, -1), pt(1, 0)  # the other two indeterminacy points
    if kind == "inverse":
        centers = [pt(1 - j * e, -j * e) for j in range(k + 1)]
    else:
        centers = []
        for j in range(k + 1):
            c = j * (1 - e) - e
            centers += [pt(c, None), pt(None, c)]
    n = len(centers)
    model = BlowupModel(amb, tuple(Proper(c) for c in centers))
    specs = [
        ("w=-1", Wm1, "contracted by f"),
        ("w=eps", Weps, "contracted by f"),
        ("z=1", Z1, "contracted by f^-1"),
        ("z=-eps", Zmeps, "contracted by f^-1"),
        ("L", Lline, "line through (1,0) and (0,-1)"),
    ]
    if kind == "ratio":
        specs += [("z=inf", bq("z0"), ""), ("w=inf", bq("w0"), "")]
    specs += [(f"E{i}", i, "") for i in range(n)]
    curves = _tracked(model, specs)
    F1, F2 = model.base((1, 0)), model.base((0, 1))
    E = [f"E{i}" for i in range(n)]
    images = {E[i]: E[i + 1] for i in range(n - 1)}
    preimages = {E[i + 1]: E[i] for i in range(n - 1)}
    if kind == "inverse":
        pull_E = [F2] + [model.e(j - 1) for j in range(1, n)]
        push_E = [model.e(j + 1) for j in range(n - 1)] + [F1]
        images.update({E[-1]: "z=-eps", "w=-1": ModelPoint(r2), "w=eps": E[0], "L": "L"})
        preimages.update({E[0]: "w=eps", "z=1": ModelPoint(q2), "z=-eps": E[-1], "L": "L"})
        ind, ind_inv = [ModelPoint(q2)], [ModelPoint(r2)]
        expected = {"c_per": ["L"], "c_exc_plus": ["w=-1"], "c_exc_minus": ["z=1"], "c_both": []}
    else:
        pull_E = [F2] + [model.e(j - 1) for j in range(1, n)]
        push_E = [model.e(j + 1) for j in range(n - 1)] + [F1]
        images.update({E[-1]: "z=1", "w=-1": E[0], "w=eps": ModelPoint(s_g),
                       "z=inf": "w=inf", "w=inf": "z=inf", "L": "L"})
        preimages.update({E[0]: "w=-1", "z=1": E[-1], "z=-eps": ModelPoint(s_f),
                          "z=inf": "w=inf", "w=inf": "z=inf", "L": "L"})
        ind, ind_inv = [ModelPoint(s_f)], [ModelPoint(s_g)]
        expected = {}
    ledger = ActionLedger(pull_E, push_E, images, preimages, ind, ind_inv)
    bir = BirMap(
        f, g,
        ind_f=(q2, s_f), ind_finv=(s_g, r2),
        exc_f=((Weps, s_g), (Wm1, r2)),
        exc_finv=((Z1, q2), (Zmeps, s_f)),
        name=f"df_epsilon(eps={e})",
    )
    mm = ModelMap(bir, model, ledger, curves, name=bir.name)
    d = MapDefinition(mm, "df_epsilon", {"eps": _frac_str(e)}, expected=expected)
    if check:
        _check_generic(d)
    return d


def _check_generic(d: MapDefinition):
    """Reject parameters where the map is not birational or the model is not dynamically interesting."""
    from .picdyn import dynamical_degree

    mm = d.mm
    if not verify_inverse(mm.bir.forward, mm.bir.backward):
        raise CatalogError(f"{mm.name}: declared inverse does not invert the map")
    try:
        lam = dynamical_degree(mm.pullback_matrix())
    except MapError as exc:
        raise CatalogError(str(exc)) from exc
    if lam.rational == 1:
        raise CatalogError(f"{mm.name}: dynamical degree is 1 on this model")


# --------------------------------------------------------------------------
# maps on the bare plane (no stabilizing model)


def catalog_quadratic_involution() -> MapDefinition:
    """[yz : xz : xy]; its own inverse, not algebraically stable on P^2."""
    from .picdyn import bare_model_map

    amb = P2
    f = PolyMap.parse(amb, ["y*z", "x*z", "x*y"])
    pts = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    exc = tuple((_poly(v, amb), p) for v, p in zip(("x", "y", "z"), pts))
    bir = BirMap(f, f, tuple(pts), tuple(pts), exc, exc, name="quadratic_involution")
    return MapDefinition(bare_model_map(bir), "quadratic_involution", {},
                         {"as1": False, "first_failure": 2})


def catalog_henon(c=Fraction(1, 2)) -> MapDefinition:
    """Quadratic Henon map (x, y) -> (y, y^2 + c - x) in homogeneous form."""
    from .picdyn import bare_model_map

    c = Fraction(c)
    amb = P2
    cs = _frac_str(c)
    f = PolyMap.parse(amb, ["y*z", f"y^2 - x*z + ({cs})*z^2", "z^2"])
    g = PolyMap.parse(amb, [f"x^2 + ({cs})*z^2 - y*z", "x*z", "z^2"])
    if not verify_inverse(f, g):
        raise CatalogError("henon: inverse check failed")
    z = _poly("z", amb)
    bir = BirMap(f, g, ((1, 0, 0),), ((0, 1, 0),), ((z, (0, 1, 0)),), ((z, (1, 0, 0)),),
                 name=f"henon(c={cs})")
    return MapDefinition(bare_model_map(bir), "henon", {"c": c}, {"as1": True})


def catalog(name: str, **params) -> MapDefinition:
    if name in ("bd", "bd_sigma_tau"):
        return catalog_bd_sigma_tau(params.get("a", 2), params.get("b", 1))
    if name in ("df", "df_epsilon"):
        return catalog_df_epsilon(params.get("eps", Fraction(1, 4)))
    if name in ("qi", "quadratic_involution"):
        return catalog_quadratic_involution()
    if name == "henon":
        return catalog_henon(params.get("c", Fraction(1, 2)))
    raise CatalogError(f"unknown catalog family {name!r}")
