"""Map-definition files (JSON), model-point strings and atomic writes.

Schema ``birdyn-map/1`` (UTF-8 JSON, rationals as "p/q" strings):

    name, family, params        identification; params values are strings
    ambient                     "P2" or "P1xP1"
    map, inverse                component polynomials as strings
    ind, ind_inverse            base points of Ind(f), Ind(f^-1), e.g. "1:0:0" or "0:1;1:4"
    exceptional[_inverse]       [{"curve": poly, "image": point}]
    model.points                [{"proper": point}] or [{"parent": i, "direction": [u, v],
                                 "extra_proximate": [...]}]
    curves                      [{"label", "poly" | "exceptional": i, "class": [...], "note"}]
    ledger                      pull_E, push_E (class columns), images / preimages
                                (label -> label, or {"point": model point}), ind, ind_inverse
    expected, options           free-form
"""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .arcs import ModelPoint
from .lattice import (
    P1xP1,
    P2,
    BlowupModel,
    InfinitelyNear,
    Proper,
    TrackedCurve,
    normalize_group,
    parse_point,
)
from .poly import Poly

SCHEMA = "birdyn-map/1"
AMBIENTS = {"P2": P2, "P1xP1": P1xP1}


class DefinitionError(ValueError):
    """A map-definition file that does not match the schema or fails verification."""


def atomic_write(path, text: str) -> None:
    """Write via a temporary file in the same directory and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --------------------------------------------------------------------------
# points


def format_point(point) -> str:
    return ";".join(":".join(str(c) for c in g) for g in point)


def format_model_point(p: ModelPoint) -> str:
    return str(p)


def parse_model_point(ambient, text: str) -> ModelPoint:
    """'[1:0:0]', '1:0:0', '[1:b:0]@e1<2:1>' or '0:1;1:4'."""
    text = text.strip()
    center = direction = None
    if "@" in text:
        text, rest = text.split("@", 1)
        if not (rest.startswith("e") and "<" in rest and rest.endswith(">")):
            raise DefinitionError(f"bad model point suffix {rest!r}")
        idx, d = rest[1:-1].split("<")
        center = int(idx)
        u, v = (int(c) for c in d.split(":"))
        direction = normalize_group([u, v])
    text = text.strip().lstrip("[").rstrip("]")
    base = parse_point(ambient, text)
    if center is None:
        return ModelPoint(base)
    return ModelPoint(base, center, direction)


# --------------------------------------------------------------------------
# map definitions


def _poly_str(p: Poly, amb) -> str:
    return p.to_string(amb.varnames)


def _target(t):
    return {"point": str(t)} if isinstance(t, ModelPoint) else t


def definition_to_json(d) -> dict:
    mm = d.mm
    bir, model, led = mm.bir, mm.model, mm.ledger
    amb = model.ambient
    pts = []
    for spec in model.points:
        if isinstance(spec, Proper):
            pts.append({"proper": format_point(spec.coords)})
        else:
            pts.append({"parent": spec.parent, "direction": list(spec.direction),
                        "extra_proximate": list(spec.extra_proximate)})
    curves = []
    for c in mm.curves:
        e = {"label": c.label}
        if c.exc_index is not None:
            e["exceptional"] = c.exc_index
        else:
            e["poly"] = _poly_str(c.poly, amb)
        e["class"] = list(c.cls)
        if c.note:
            e["note"] = c.note
        curves.append(e)

    def pt(x):
        return format_point(x.base if isinstance(x, ModelPoint) else x)

    return {
        "schema": SCHEMA,
        "name": mm.name,
        "family": d.family,
        "params": {k: str(v) for k, v in d.params.items()},
        "ambient": amb.name,
        "map": bir.forward.to_strings(),
        "inverse": bir.backward.to_strings(),
        "ind": [pt(x) for x in bir.ind_f],
        "ind_inverse": [pt(x) for x in bir.ind_finv],
        "exceptional": [{"curve": _poly_str(p, amb), "image": pt(q)} for p, q in bir.exc_f],
        "exceptional_inverse": [{"curve": _poly_str(p, amb), "image": pt(q)} for p, q in bir.exc_finv],
        "model": {"points": pts},
        "curves": curves,
        "ledger": {
            "pull_E": [list(c) for c in led.pull_E],
            "push_E": [list(c) for c in led.push_E],
            "images": {k: _target(v) for k, v in led.images.items()},
            "preimages": {k: _target(v) for k, v in led.preimages.items()},
            "ind": [str(x) for x in led.ind],
            "ind_inverse": [str(x) for x in led.ind_inv],
        },
        "expected": d.expected,
        "options": d.options,
    }


def dumps_definition(d) -> str:
    return json.dumps(definition_to_json(d), indent=2, ensure_ascii=False) + "\n"


def definition_from_json(obj: dict, verify: bool = True):
    from .birmap import BirMap, PolyMap, curve_class, verify_inverse
    from .catalog import MapDefinition
    from .picdyn import ActionLedger, ModelMap

    if obj.get("schema") != SCHEMA:
        raise DefinitionError(f"unknown schema {obj.get('schema')!r}")
    try:
        amb = AMBIENTS[obj["ambient"]]
        fwd = PolyMap.parse(amb, obj["map"])
        bwd = PolyMap.parse(amb, obj["inverse"])
        specs = []
        for p in obj["model"]["points"]:
            if "proper" in p:
                specs.append(Proper(parse_point(amb, p["proper"])))
            else:
                specs.append(InfinitelyNear(int(p["parent"]), tuple(normalize_group(p["direction"])),
                                            tuple(p.get("extra_proximate", ()))))
        model = BlowupModel(amb, tuple(specs))
        poly = lambda s: Poly.parse(s, amb.varnames)  # noqa: E731
        curves = []
        for c in obj["curves"]:
            cls = tuple(int(x) for x in c["class"])
            if "exceptional" in c:
                curves.append(TrackedCurve(c["label"], cls, exc_index=int(c["exceptional"]), note=c.get("note", "")))
            else:
                P = poly(c["poly"])
                if verify and curve_class(model, P) != cls:
                    raise DefinitionError(f"curve {c['label']}: declared class does not match its multiplicities")
                curves.append(TrackedCurve(c["label"], cls, poly=P, note=c.get("note", "")))
        mp = lambda s: parse_model_point(amb, s)  # noqa: E731
        tgt = lambda v: mp(v["point"]) if isinstance(v, dict) else v  # noqa: E731
        L = obj["ledger"]
        ledger = ActionLedger(
            [tuple(c) for c in L["pull_E"]], [tuple(c) for c in L["push_E"]],
            {k: tgt(v) for k, v in L["images"].items()},
            {k: tgt(v) for k, v in L["preimages"].items()},
            [mp(s) for s in L["ind"]], [mp(s) for s in L["ind_inverse"]],
        )
        bir = BirMap(
            fwd, bwd,
            ind_f=tuple(parse_point(amb, s) for s in obj["ind"]),
            ind_finv=tuple(parse_point(amb, s) for s in obj["ind_inverse"]),
            exc_f=tuple((poly(e["curve"]), parse_point(amb, e["image"])) for e in obj["exceptional"]),
            exc_finv=tuple((poly(e["curve"]), parse_point(amb, e["image"])) for e in obj["exceptional_inverse"]),
            name=obj.get("name", ""),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DefinitionError):
            raise
        raise DefinitionError(f"malformed map definition: {exc}") from exc
    if verify and not verify_inverse(fwd, bwd):
        raise DefinitionError("declared inverse does not invert the map")
    mm = ModelMap(bir, model, ledger, curves, name=bir.name)
    return MapDefinition(mm, obj.get("family", ""), dict(obj.get("params", {})),
                         dict(obj.get("expected", {})), dict(obj.get("options", {})))


def load_definition(path, verify: bool = True):
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise DefinitionError(f"{path}: cannot read ({exc.strerror})") from exc
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise DefinitionError(f"{path}: not valid JSON ({exc})") from exc
    return definition_from_json(obj, verify=verify)


def save_definition(d, path) -> None:
    atomic_write(path, dumps_definition(d))


def dump_json(obj, path) -> None:
    atomic_write(path, json.dumps(obj, indent=2, ensure_ascii=False, default=_default) + "\n")


def _default(o):
    from fractions import Fraction

    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    if hasattr(o, "to_json"):
        return o.to_json()
    if isinstance(o, tuple):
        return list(o)
    return str(o)
