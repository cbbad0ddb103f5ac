"""Exact orbits of rational points on blowup models."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from .arcs import ModelPoint
from .birmap import IndeterminacyHit, PolyMap, point_on_curve
from .lattice import BlowupModel, flat, intersection, make_point

DEFAULT_BIT_CAP = 10**6


@dataclass
class OrbitRecord:
    start: ModelPoint
    points: list
    events: list  # one per computed point: "ok", or a terminal event
    horizon: int
    status: str = "horizon"  # horizon | indeterminacy | periodic | size-capped
    period: int | None = None
    preperiod: int | None = None

    @property
    def steps(self) -> int:
        return len(self.points) - 1

    @property
    def complete(self) -> bool:
        """All points up to the horizon are available (directly or through the cycle)."""
        return self.status in ("horizon", "periodic")

    def point(self, k: int) -> ModelPoint:
        """k-th orbit point, unrolling a detected cycle."""
        if k < len(self.points):
            return self.points[k]
        if self.status != "periodic":
            raise IndexError(f"orbit not available at step {k} ({self.status})")
        pre, per = self.preperiod, self.period
        return self.points[pre + (k - pre) % per]

    def to_dict(self):
        return {
            "start": str(self.start),
            "horizon": self.horizon,
            "status": self.status,
            "period": self.period,
            "preperiod": self.preperiod,
            "points": [str(p) for p in self.points],
            "events": self.events,
        }

    def to_csv(self) -> str:
        from .heightlab import naive_height

        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "point", "event", "naive_height"])
        for k, (p, ev) in enumerate(zip(self.points, self.events)):
            w.writerow([k, str(p), ev, repr(naive_height(p.base).log_value)])
        return buf.getvalue()


def _as_model_point(ambient, y) -> ModelPoint:
    if isinstance(y, ModelPoint):
        return y
    return ModelPoint(make_point(ambient, y))


def _stepper(f):
    """Return (ambient, step function) for a ModelMap or a bare PolyMap."""
    if isinstance(f, PolyMap):
        from .birmap import evaluate

        def step(p):
            q = evaluate(f, p.base)
            return q if isinstance(q, IndeterminacyHit) else ModelPoint(q)

        return f.ambient, step
    return f.model.ambient, f.eval


def bits(p: ModelPoint) -> int:
    return max(abs(c).bit_length() for c in flat(p.base))


def iterate(f, y, N: int, bit_cap: int = DEFAULT_BIT_CAP) -> OrbitRecord:
    """Exact forward orbit of y under f (ModelMap or PolyMap) up to N steps."""
    ambient, step = _stepper(f)
    p = _as_model_point(ambient, y)
    rec = OrbitRecord(p, [p], ["ok"], N)
    seen = {p: 0}
    for k in range(1, N + 1):
        q = step(p)
        if isinstance(q, IndeterminacyHit):
            rec.events[-1] = "indeterminacy"
            rec.status = "indeterminacy"
            return rec
        if q in seen:
            rec.status = "periodic"
            rec.preperiod = seen[q]
            rec.period = k - seen[q]
            rec.events[-1] = f"period {rec.period} (preperiod {rec.preperiod})"
            return rec
        if bits(q) > bit_cap:
            rec.status = "size-capped"
            rec.events[-1] = f"size-capped at step {k}"
            return rec
        seen[q] = k
        rec.points.append(q)
        rec.events.append("ok")
        p = q
    return rec


def as1_orbit_scan(mm, N: int) -> dict:
    """Orbits of Ind(f^-1) on the model avoid Ind(f) for k <= N (or forever when the orbit cycles)."""
    ind = set(mm.ledger.ind)
    rows = []
    ok = True
    for x in mm.ledger.ind_inv:
        rec = iterate(mm, x, N)
        hit = next((k for k, p in enumerate(rec.points) if p in ind), None)
        if hit is not None:
            ok = False
            rows.append({"start": str(x), "violation_at": hit, "point": str(rec.points[hit])})
            continue
        if rec.status == "indeterminacy":
            # the last point is indeterminate but not declared: the ledger is incomplete
            ok = False
            rows.append({"start": str(x), "undeclared_indeterminacy": str(rec.points[-1])})
            continue
        scope = "for all k (cycle closed)" if rec.status == "periodic" else f"to horizon {N}"
        if rec.status == "size-capped":
            scope = f"to step {rec.steps} (size cap)"
        rows.append({"start": str(x), "avoids_ind": scope})
    return {"ok": ok, "horizon": N, "orbits": rows}


def orbit_trichotomy(mm, record: OrbitRecord, classification) -> str:
    """Preperiodic, ConfinedToPerCurves, GenericCase3 or HorizonLimited."""
    if record.status == "periodic":
        return "Preperiodic"
    if record.status != "horizon" or record.steps < 4:
        return "HorizonLimited"
    tail = record.points[len(record.points) // 2:]
    model = mm.model
    per = [mm.curve(lab) for lab in classification.c_per]
    plus = [mm.curve(lab) for lab in classification.c_plus]
    if per and all(any(point_on_curve(model, p, c) for c in per) for p in tail):
        return "ConfinedToPerCurves"
    if not any(point_on_curve(model, p, c) for p in tail for c in plus):
        return "GenericCase3"
    return "HorizonLimited"


@dataclass
class CurveOrbit:
    label: str
    labels: list
    classes: list
    self_intersections: list
    status: str  # contracted | periodic | undetermined
    contracted_at: int | None = None
    contracted_to: str | None = None
    period: int | None = None
    zeta: int = 0
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {
            "curve": self.label,
            "strict_transforms": self.labels,
            "classes": [list(c) for c in self.classes],
            "self_intersections": self.self_intersections,
            "status": self.status,
            "contracted_at": self.contracted_at,
            "contracted_to": self.contracted_to,
            "period": self.period,
            "zeta": self.zeta,
        }


def curve_orbit(mm, label: str, N: int) -> CurveOrbit:
    """Iterated strict transforms of a tracked curve following the ledger's correspondences."""
    model: BlowupModel = mm.model
    labels = [label]
    status, at, to, period = "undetermined", None, None, None
    for k in range(1, N + 1):
        img = mm.ledger.images.get(labels[-1])
        if img is None:
            break
        if isinstance(img, ModelPoint):
            status, at, to = "contracted", k, str(img)
            break
        if img in labels:
            status, period = "periodic", k - labels.index(img)
            break
        labels.append(img)
    classes = [mm.curve(lab).cls for lab in labels]
    selfs = [intersection(model, c, c) for c in classes]
    return CurveOrbit(label, labels, classes, selfs, status, at, to, period, min(selfs))
