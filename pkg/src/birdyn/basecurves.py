"""Base curves: classification, the structure theorem at finite horizon, and two
decompositions of theta+."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algnum import UncertifiedSign, sign_of
from .birmap import point_on_curve
from .lattice import intersection, nef_on_tracked
from .orbitlab import curve_orbit, iterate
from .picdyn import Report, SpectralData, mat_pow_vec


def _sign(x) -> int | None:
    try:
        return sign_of(x)
    except UncertifiedSign:
        return None


@dataclass
class BaseCurveClassification:
    c_per: list
    c_exc_plus: list  # C_exc^+ minus C_exc^-
    c_exc_minus: list  # C_exc^- minus C_exc^+
    c_both: list
    non_base: list
    undetermined: list
    horizon: int
    evidence: dict = field(default_factory=dict)
    per_cross_check: dict = field(default_factory=dict)

    @property
    def c_plus(self) -> list:
        return [lab for lab, ev in self.evidence.items() if ev["in_C_plus"]]

    @property
    def c_minus(self) -> list:
        return [lab for lab, ev in self.evidence.items() if ev["in_C_minus"]]

    @property
    def exc_plus_all(self) -> list:
        return self.c_exc_plus + self.c_both

    @property
    def exc_minus_all(self) -> list:
        return self.c_exc_minus + self.c_both

    def to_dict(self):
        return {
            "horizon": self.horizon,
            "C_per": self.c_per,
            "C_exc_plus_only": self.c_exc_plus,
            "C_exc_minus_only": self.c_exc_minus,
            "C_exc_both": self.c_both,
            "non_base": self.non_base,
            "undetermined": self.undetermined,
            "evidence": self.evidence,
            "per_cross_check": self.per_cross_check,
        }


def _fate(mm, label: str, N: int) -> tuple[str, dict]:
    orb = curve_orbit(mm, label, N)
    return orb.status, orb.to_dict()


def classify(mm, spectral: SpectralData, N: int) -> BaseCurveClassification:
    model = mm.model
    inv = mm.inverse()
    cls = BaseCurveClassification([], [], [], [], [], [], N)
    per_from_minus = set()
    for c in mm.curves:
        tp = intersection(model, c.cls, spectral.theta_plus)
        tm = intersection(model, c.cls, spectral.theta_minus)
        in_plus, in_minus = sign_of(tp) == 0, sign_of(tm) == 0
        ev = {
            "class": list(c.cls),
            "dot_theta_plus": {"q_lambda": tp.to_json(), "approx": float(tp), "sign": _sign(tp)},
            "dot_theta_minus": {"q_lambda": tm.to_json(), "approx": float(tm), "sign": _sign(tm)},
            "self_intersection": intersection(model, c.cls, c.cls),
            "in_C_plus": in_plus,
            "in_C_minus": in_minus,
        }
        cls.evidence[c.label] = ev
        if not (in_plus or in_minus):
            cls.non_base.append(c.label)
            continue
        fwd, fwd_ev = _fate(mm, c.label, N) if in_plus else (None, None)
        bwd, bwd_ev = _fate(inv, c.label, N) if in_minus else (None, None)
        ev["forward"], ev["backward"] = fwd_ev, bwd_ev
        if ev["self_intersection"] >= 0:
            ev["warning"] = "base curve with nonnegative self-intersection"
        if bwd == "periodic":
            per_from_minus.add(c.label)
        exc_p, exc_m = fwd == "contracted", bwd == "contracted"
        if fwd == "undetermined" or bwd == "undetermined":
            cls.undetermined.append(c.label)
        elif exc_p and exc_m:
            cls.c_both.append(c.label)
        elif exc_p:
            cls.c_exc_plus.append(c.label)
        elif exc_m:
            cls.c_exc_minus.append(c.label)
        elif fwd == "periodic" or bwd == "periodic":
            cls.c_per.append(c.label)
        else:
            cls.undetermined.append(c.label)
    per_plus = {lab for lab in cls.c_per if cls.evidence[lab]["in_C_plus"]}
    cls.per_cross_check = {"ok": per_plus == per_from_minus,
                                                  "from_theta_plus": sorted(per_plus),
                                                  "from_theta_minus": sorted(per_from_minus)}
    return cls


# --------------------------------------------------------------------------
# the structure theorem at finite horizon


def _ind_orbit_points(mm, N: int) -> tuple[set, set]:
    """Points of Ind(f^n) and Ind(f^-n) for 1 <= n <= N on the model.

    x is in Ind(f^n) iff f^k(x) is in Ind(f) for some k < n, so these are the
    backward orbits of Ind(f) (and forward orbits of Ind(f^-1))."""
    back, fwd = set(), set()
    for x in mm.ledger.ind:
        back.update(iterate(mm.inverse(), x, N - 1).points)
    for x in mm.ledger.ind_inv:
        fwd.update(iterate(mm, x, N - 1).points)
    return back, fwd


def _exceptional_family(m, N: int) -> set:
    """Tracked curves in the support of R_{f^n}, n <= N: f-exceptional curves and their f^-1 transforms."""
    out = set()
    inv = m.inverse()
    for lab in m.exceptional_labels():
        orb = curve_orbit(inv, lab, N - 1)
        out.update(orb.labels)
    return out


def _nef_big(model, v, curves) -> tuple[bool, dict]:
    try:
        nef, bad = nef_on_tracked(model, v, curves)
        sq = intersection(model, v, v)
        big = sign_of(sq) > 0
    except UncertifiedSign:
        return False, {"uncertified": True}
    return nef and big, {"nef_on_tracked": nef, "violators": bad, "self_intersection": float(sq)}


def big_nef_threshold(mm, label: str, push: bool, horizon: int, cap: int = 60):
    """Smallest N such that (f^n)^*[C] (or f^n_*[C]) is big and nef on tracked curves for N <= n <= N + horizon."""
    M = mm.pushforward_matrix() if push else mm.pullback_matrix()
    v = mm.curve(label).cls
    seq = []
    for n in range(cap + horizon + 1):
        ok, _ = _nef_big(mm.model, v, mm.curves)
        seq.append(ok)
        v = mat_pow_vec(M, v, 1)
    for n0 in range(cap + 1):
        if all(seq[n0:n0 + horizon + 1]):
            return n0
    return None


def verify_basecurve_theorem(cls: BaseCurveClassification, mm, spectral: SpectralData, N: int) -> Report:
    model = mm.model
    rep = Report(f"basecurve_theorem({mm.name}, N={N})")
    back_ind, fwd_ind = _ind_orbit_points(mm, N)
    R_plus = _exceptional_family(mm, N)
    R_minus = _exceptional_family(mm.inverse(), N)
    M, P = mm.pullback_matrix(), mm.pushforward_matrix()

    def meets(lab, pts):
        c = mm.curve(lab)
        return [str(x) for x in pts if point_on_curve(model, x, c)]

    def disjoint(a, b):
        return a != b and intersection(model, mm.curve(a).cls, mm.curve(b).cls) == 0

    per_classes = {mm.curve(lab).cls for lab in cls.c_per}
    for lab in cls.c_per:
        hits = meets(lab, back_ind | fwd_ind)
        ram = [d for d in R_plus | R_minus if not disjoint(lab, d)]
        cyc = True
        v = w = mm.curve(lab).cls
        for _ in range(N):
            v, w = mat_pow_vec(M, v, 1), mat_pow_vec(P, w, 1)
            cyc &= v in per_classes and w in per_classes
        rep.add(f"(1) {lab}", not hits and not ram and cyc, ind_hits=hits, meets_ramification=ram,
                transforms_stay_in_C_per=cyc)
    for lab in cls.c_per:
        bad = [d for d in cls.exc_plus_all + cls.exc_minus_all if not disjoint(lab, d)]
        rep.add(f"(2) {lab}", not bad, meets=bad)
    for lab in cls.c_both:
        hits = meets(lab, back_ind | fwd_ind)
        vp, vm = mat_pow_vec(M, mm.curve(lab).cls, N), mat_pow_vec(P, mm.curve(lab).cls, N)
        rep.add(f"(3) {lab}", not hits and not any(vp) and not any(vm), ind_hits=hits)
    for labs, m, ind_pts, theta, tag, push in (
        (cls.c_exc_plus, mm, back_ind, spectral.theta_minus, "(4)", False),
        (cls.c_exc_minus, mm.inverse(), fwd_ind, spectral.theta_plus, "(5)", True),
    ):
        for lab in labs:
            c = mm.curve(lab)
            hits = meets(lab, ind_pts)
            contracted_at = curve_orbit(m, lab, N).contracted_at
            Mp = P if not push else M  # f^n_* for (4), f^-n_* = f^n^* for (5)
            zero_from = None
            v = c.cls
            for n in range(1, N + 1):
                v = mat_pow_vec(Mp, v, 1)
                if not any(v) and zero_from is None:
                    zero_from = n
                elif any(v):
                    zero_from = None
            pairing = intersection(model, c.cls, theta)
            pos = _sign(pairing)
            Nd = big_nef_threshold(mm, lab, push=push, horizon=N)
            rep.add(f"{tag} {lab}", not hits and zero_from is not None and pos == 1 and Nd is not None,
                    a_ind_hits=hits, contracted_at=contracted_at, b_pushforward_zero_from=zero_from,
                    c_pairing=float(pairing), c_sign=pos, d_big_nef_from=Nd, d_checked_through=(Nd or 0) + N)
    # zeta bounds along strict transforms of exceptional curves
    zetas = {}
    for m, tag in ((mm, "f"), (mm.inverse(), "f^-1")):
        for lab in m.exceptional_labels():
            orb = curve_orbit(m.inverse(), lab, N)
            z = min(orb.self_intersections + ([0] if orb.status == "contracted" else []))
            zetas[f"{tag}:{lab}"] = {"sequence": orb.self_intersections, "zeta": z, "tail": orb.status,
                                     "ok": all(s >= z for s in orb.self_intersections)}
    rep.add("zeta_bounds", all(v["ok"] for v in zetas.values()), curves=zetas)
    rep.add("per_plus_equals_per_minus", cls.per_cross_check["ok"])
    rep.add("base_curves_negative", all(cls.evidence[lab]["self_intersection"] < 0
                                        for lab in cls.c_plus + cls.c_minus))
    return rep


# --------------------------------------------------------------------------
# decompositions of theta+


@dataclass
class ThetaDecomposition:
    kind: str  # "kawamata" or "new"
    parts: dict
    checks: dict
    ok: bool

    def to_dict(self, model=None):
        def enc(v):
            if isinstance(v, (list, tuple)):
                return [enc(x) for x in v]
            if isinstance(v, Fraction):
                return str(v)
            if hasattr(v, "to_json"):
                return {"q_lambda": v.to_json(), "approx": float(v)}
            return v
        return {"kind": self.kind, "ok": self.ok, "parts": {k: enc(v) for k, v in self.parts.items()},
                "checks": self.checks}


def _neg_inverse_ones(G):
    """Solve G r = -1 over Q (G negative definite)."""
    n = len(G)
    A = [[Fraction(x) for x in row] + [Fraction(-1)] for row in G]
    for c in range(n):
        piv = next(r for r in range(c, n) if A[r][c] != 0)
        A[c], A[piv] = A[piv], A[c]
        pv = A[c][c]
        A[c] = [x / pv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[n] for row in A]


def _kaw_attempt(mm, spectral, labels, r):
    model = mm.model
    A = list(spectral.theta_plus)
    for lab, rc in zip(labels, r):
        A = [a - rc * x for a, x in zip(A, mm.curve(lab).cls)]
    bad = []
    try:
        for c in mm.curves:
            if sign_of(intersection(model, A, c.cls)) <= 0:
                bad.append(c.label)
        for k, name in enumerate(model.ambient.base_names):
            v = [0] * model.rank
            v[k] = 1
            if sign_of(intersection(model, A, v)) <= 0:
                bad.append(name)
        sq_ok = sign_of(intersection(model, A, A)) > 0
    except UncertifiedSign:
        return None, ["uncertified"]
    if not sq_ok:
        bad.append("(A.A)")
    return A, bad


def kawamata_decomposition(mm, spectral: SpectralData, cls: BaseCurveClassification, max_depth: int = 60):
    """theta+ = A + [D], D = sum r_C C over C in C+, with A positive on tracked curves and (A.A) > 0."""
    labels = cls.c_plus
    if not labels:
        A, bad = _kaw_attempt(mm, spectral, [], [])
        return ThetaDecomposition("kawamata", {"A": A, "D": {}}, {"positivity_failures": bad}, not bad)
    G = [[intersection(mm.model, mm.curve(a).cls, mm.curve(b).cls) for b in labels] for a in labels]
    probes = [("equal", [Fraction(1)] * len(labels)), ("refined", _neg_inverse_ones(G))]
    for name, base in probes:
        if any(x <= 0 for x in base):
            continue
        for j in range(1, max_depth + 1):
            t = Fraction(1, 2**j)
            r = [t * x for x in base]
            A, bad = _kaw_attempt(mm, spectral, labels, r)
            if A is not None and not bad:
                return ThetaDecomposition(
                    "kawamata",
                    {"A": A, "D": dict(zip(labels, r))},
                    {"probe": name, "depth": j, "support": labels,
                     "positive_on": "all tracked curves and base rulings; (A.A) > 0",
                     "ample": "relative to tracked set"},
                    True,
                )
    return ThetaDecomposition("kawamata", {"A": None, "D": {}}, {"status": "unknown"}, False)


def kawamata_scaled_valid(mm, spectral, kaw: ThetaDecomposition, t: Fraction) -> bool:
    labels = list(kaw.parts["D"])
    r = [t * kaw.parts["D"][lab] for lab in labels]
    A, bad = _kaw_attempt(mm, spectral, labels, r)
    return A is not None and not bad


def choose_power(mm, cls: BaseCurveClassification, N: int) -> int:
    """n as in the new decomposition: a multiple of every C_per period beyond all contraction and big-nef times."""
    from math import lcm

    periods = [curve_orbit(mm, lab, N).period or 1 for lab in cls.c_per]
    base = lcm(*periods) if periods else 1
    need = 1
    for lab in cls.c_exc_plus:
        Nd = big_nef_threshold(mm, lab, push=False, horizon=N)
        need = max(need, Nd or 0)
    for lab in cls.c_both:
        need = max(need, (curve_orbit(mm, lab, N).contracted_at or 0) + 1)
    n = base
    while n < need:
        n += base
    return n


def new_decomposition(kaw: ThetaDecomposition, mm, spectral: SpectralData, cls: BaseCurveClassification,
                      n: int | None = None, N: int = 6) -> ThetaDecomposition:
    """theta+ = B + L + [D_per'] with B = lam^-n M^n A, L = lam^-n M^n D_exc, D_per' = lam^-n D_per."""
    model = mm.model
    K = spectral.field
    n = n if n is not None else choose_power(mm, cls, N)
    lam_n = K.lam ** n
    M = mm.pullback_matrix()
    A = kaw.parts["A"]
    D = kaw.parts["D"]
    rank = model.rank
    d_exc = [K.zero()] * rank
    d_per = [K.zero()] * rank
    for lab, r in D.items():
        target = d_per if lab in cls.c_per else d_exc
        for i, x in enumerate(mm.curve(lab).cls):
            if x:
                target[i] = target[i] + r * x
    inv = lam_n.inverse()
    B = [inv * x for x in mat_pow_vec(M, [K(x) for x in A], n)]
    L = [inv * x for x in mat_pow_vec(M, d_exc, n)]
    d_per_n = mat_pow_vec(M, d_per, n)
    Dp = [inv * x for x in d_per]
    total = [b + l + d for b, l, d in zip(B, L, Dp)]
    identity = all((t - th).is_zero() for t, th in zip(total, spectral.theta_plus))
    invariant = all((a - b).is_zero() for a, b in zip(d_per_n, d_per))
    try:
        l_nef, l_bad = nef_on_tracked(model, L, mm.curves)
        b_nef, b_bad = nef_on_tracked(model, B, mm.curves)
        ind_pos = {}
        for x in mm.ledger.ind:
            val = intersection(model, B, mm.ind_image_class(x))
            ind_pos[str(x)] = {"pairing": float(val), "positive": sign_of(val) > 0}
    except UncertifiedSign:
        return ThetaDecomposition("new", {}, {"status": "uncertified"}, False)
    ok = identity and invariant and l_nef and b_nef and all(v["positive"] for v in ind_pos.values())
    checks = {
        "n": n,
        "identity_exact": identity,
        "D_per_invariant": invariant,
        "L_nef_on_tracked": l_nef, "L_violators": l_bad,
        "B_nef_on_tracked": b_nef, "B_violators": b_bad,
        "B_dot_f(x)": ind_pos,
        "base_point_freeness": "assumed (not certified)",
    }
    return ThetaDecomposition("new", {"B": B, "L": L, "D_per": Dp, "D_exc_source": d_exc}, checks, ok)
