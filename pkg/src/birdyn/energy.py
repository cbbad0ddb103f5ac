"""v-adic chordal distances and weighted log-distance sums along exact orbits."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .arcs import ModelPoint
from .exact import INF, Place, log_fraction, valuation
from .lattice import normalize_group


@dataclass(frozen=True)
class DistanceValue:
    """Dist_v; ``exact`` is the exact value at finite places (None at inf)."""

    value: float
    place: Place
    exact: Fraction | None = None

    @property
    def log(self) -> float:
        if self.exact is not None:
            return -math.inf if self.exact == 0 else log_fraction(self.exact)
        return -math.inf if self.value == 0 else math.log(self.value)

    @property
    def is_zero(self) -> bool:
        return self.value == 0


def _groups(x):
    if isinstance(x, ModelPoint):
        x = x.base
    if isinstance(x[0], (tuple, list)):
        return [normalize_group(g) for g in x]
    return [normalize_group(x)]


def _wedge(a, b) -> list[int]:
    n = len(a)
    return [a[i] * b[j] - a[j] * b[i] for i in range(n) for j in range(i + 1, n)]


def _log_l2(v) -> float:
    s = sum(c * c for c in v)
    return 0.5 * math.log(s) if s else -math.inf


def _group_dist(a, b, v: Place) -> tuple[float, Fraction | None]:
    w = _wedge(a, b)
    if v.archimedean:
        lw = _log_l2(w)
        if lw == -math.inf:
            return 0.0, None
        # summing the norms first keeps the value exactly symmetric
        return math.exp(lw - (_log_l2(a) + _log_l2(b))), None
    g = 0
    for c in w:
        g = gcd(g, c)
    if g == 0:
        return 0.0, Fraction(0)
    e = Fraction(v.p) ** -valuation(g, v.p)
    return float(e), e


def dist_v(x, y, v: Place = INF) -> DistanceValue:
    """Chordal distance; on P1xP1 the max of the factor distances.

    Points on a blowup model are compared through their base points."""
    xs, ys = _groups(x), _groups(y)
    vals = [_group_dist(a, b, v) for a, b in zip(xs, ys)]
    if v.archimedean:
        return DistanceValue(max(d for d, _ in vals), v)
    ex = max(e for _, e in vals)
    return DistanceValue(float(ex), v, ex)


def dist_to_ind(x, v: Place, ind) -> DistanceValue:
    """min over the declared indeterminacy points; +inf when there are none."""
    ind = list(ind)
    if not ind:
        return DistanceValue(math.inf, v, None)
    if isinstance(x, ModelPoint) and any(isinstance(p, ModelPoint) and p == x for p in ind):
        z = Fraction(0) if not v.archimedean else None
        return DistanceValue(0.0, v, z)
    return min((dist_v(x, p, v) for p in ind), key=lambda d: d.value)


# --------------------------------------------------------------------------
# (BD_v) partial sums


@dataclass
class BDReport:
    start: str
    place: str
    horizon: int
    lam: float
    lam_interval: tuple
    terms: list = field(default_factory=list)  # dicts per step
    partial_sums: list = field(default_factory=list)
    sum_errors: list = field(default_factory=list)
    status: str = "complete"  # complete | ind-hit | truncated
    hit_at: int | None = None
    cauchy_gap: float | None = None
    tail_bound: float | None = None
    all_terms_exact: bool = False
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == "complete"

    def to_dict(self):
        return {
            "start": self.start, "place": self.place, "horizon": self.horizon,
            "lambda": self.lam, "lambda_interval": [str(x) for x in self.lam_interval],
            "status": self.status, "ind_hit_at": self.hit_at,
            "partial_sum": self.partial_sums[-1] if self.partial_sums else 0.0,
            "partial_sum_error": self.sum_errors[-1] if self.sum_errors else 0.0,
            "cauchy_gap_S_K_minus_S_K-10": self.cauchy_gap,
            "tail_bound_if_dist_ge_min_seen": self.tail_bound,
            "all_terms_exact": self.all_terms_exact,
            "notes": self.notes,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "place", "dist", "term", "partial_sum", "err"])
        for t, s, e in zip(self.terms, self.partial_sums, self.sum_errors):
            w.writerow([t["k"], self.place, t["dist"], repr(t["term"]), repr(s), repr(e)])
        return buf.getvalue()


def _lam_bounds(lam) -> tuple[Fraction, Fraction]:
    if hasattr(lam, "interval"):
        return lam.interval(Fraction(1, 2**60))
    q = Fraction(lam)
    return q, q


def bd_partial_sums(f, y, v: Place, K: int, lam=None, ind=None) -> BDReport:
    """Partial sums of lam^-k log Dist_v(f^k y, Ind_f), k = 0..K.

    f is a ModelMap (Ind from its ledger) or a bare PolyMap (pass ``ind``).
    ``lam`` may be an AlgNumber; the sums then carry interval error bars."""
    from .orbitlab import iterate

    if ind is None:
        ind = f.ledger.ind
    if lam is None:
        from .picdyn import dynamical_degree

        lam = dynamical_degree(f.pullback_matrix())
    lo, hi = _lam_bounds(lam)
    lam_f = float((lo + hi) / 2)
    rec = iterate(f, y, K)
    rep = BDReport(str(rec.start), str(v), K, lam_f, (lo, hi))
    if not ind:
        rep.notes.append("Ind_f empty: the sum is empty")
        rep.partial_sums, rep.sum_errors, rep.cauchy_gap, rep.all_terms_exact = [0.0], [0.0], 0.0, True
        return rep
    S_lo = S_hi = S = 0.0
    exact_all = not v.archimedean
    min_log = 0.0
    for k in range(K + 1):
        try:
            p = rec.point(k)
        except IndexError:
            rep.status = "truncated"
            rep.notes.append(f"orbit stops at step {rec.steps} ({rec.status})")
            break
        d = dist_to_ind(p, v, ind)
        if d.is_zero:
            rep.status, rep.hit_at = "ind-hit", k
            rep.terms.append({"k": k, "dist": "0", "term": -math.inf})
            break
        ld = min(d.log, 0.0) if math.isinf(d.value) else d.log
        min_log = min(min_log, ld)
        w_lo, w_hi = float(hi) ** -k, float(lo) ** -k
        term = ld * lam_f**-k
        # log dist <= 0 for these metrics, so the smaller weight gives the larger term
        S += term
        S_lo += ld * (w_hi if ld < 0 else w_lo)
        S_hi += ld * (w_lo if ld < 0 else w_hi)
        dist_repr = str(d.exact) if d.exact is not None else repr(d.value)
        rep.terms.append({"k": k, "dist": dist_repr, "term": term, "log_dist": ld})
        rep.partial_sums.append(S)
        rep.sum_errors.append(max(abs(S - S_lo), abs(S_hi - S)) + 1e-15 * (k + 1))
    rep.all_terms_exact = exact_all
    n = len(rep.partial_sums)
    if n > 10:
        rep.cauchy_gap = abs(rep.partial_sums[-1] - rep.partial_sums[-11])
    if rep.status == "complete":
        rep.tail_bound = min_log * lam_f ** -(K + 1) / (1 - 1 / lam_f)
    return rep


def bd_lower_bound_p2(f, y, ledger=None) -> dict:
    """The exact bound -h(y) - c * sum_w C_w for the lam^-k weighted phi_v partial sums on a bare model.

    c = lam/(lam-1), which is at most 2 for lam >= 2. The bound is returned in
    multiplicative form: exp(bound) = H(y)^-1 * prod_w (Cmult_w)^(-c/d)."""
    from .heightlab import build_cv_ledger, naive_height

    ledger = ledger or build_cv_ledger(f)
    h = naive_height(y)
    d = ledger.degree
    c = Fraction(d, d - 1)
    total_C = sum(ledger.log_C(w) for w in ledger.S)
    bound = -h.log_value - float(c) * total_C
    return {
        "height": h.log_value,
        "height_mult": str(h.exact_mult),
        "sum_C": total_C,
        "factor": str(c),
        "bound": bound,
        "S": [str(w) for w in ledger.S],
    }
