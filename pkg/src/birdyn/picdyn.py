"""Pullback/pushforward matrices on blowup models, stability checks, dynamical
degree and the invariant classes theta+ and theta-."""
from __future__ import annotations

import random
from math import gcd
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import algnum
from .algnum import AlgNumber, NumberField, UncertifiedSign, sign_of
from .arcs import ModelPoint, children
from .birmap import (
    BirMap,
    IndeterminacyHit,
    iterate_map,
    model_eval,
    point_on_curve,
    pullback_base_columns,
    rational_points_on,
)
from .lattice import (
    BlowupModel,
    InfinitelyNear,
    Proper,
    TrackedCurve,
    feasible_nonneg,
    intersection,
    mat_vec,
    nef_on_tracked,
    sub,
)


class LedgerError(ValueError):
    pass


# --------------------------------------------------------------------------
# ledgers and model maps


@dataclass
class ActionLedger:
    """Declared combinatorics of f on a model.

    ``pull_E[j]`` is the class f^* e_j and ``push_E[j]`` the class f_* e_j.
    ``images[label]`` is the label of f(C) for a tracked curve C, or a ModelPoint
    when C is contracted; ``preimages`` holds the same data for f^-1.
    ``ind`` and ``ind_inv`` are the indeterminacy points of f and f^-1 on the model.
    """

    pull_E: list = field(default_factory=list)
    push_E: list = field(default_factory=list)
    images: dict = field(default_factory=dict)
    preimages: dict = field(default_factory=dict)
    ind: list = field(default_factory=list)
    ind_inv: list = field(default_factory=list)

    def inverse(self) -> "ActionLedger":
        return ActionLedger(self.push_E, self.pull_E, self.preimages, self.images, self.ind_inv, self.ind)


@dataclass
class ModelMap:
    """A birational map together with a blowup model, its ledger and tracked curves."""

    bir: BirMap
    model: BlowupModel
    ledger: ActionLedger
    curves: list
    name: str = ""

    def inverse(self) -> "ModelMap":
        return ModelMap(self.bir.inverse(), self.model, self.ledger.inverse(), self.curves,
                        name=f"{self.name}^-1")

    @property
    def forward(self):
        return self.bir.forward

    def curve(self, label: str) -> TrackedCurve:
        for c in self.curves:
            if c.label == label:
                return c
        raise KeyError(label)

    def eval(self, pt: ModelPoint):
        return model_eval(self.bir.forward, self.model, pt)

    def pullback_matrix(self) -> list[list[int]]:
        return build_pullback_matrix(self.bir, self.model, self.ledger)[0]

    def pushforward_matrix(self) -> list[list[int]]:
        return build_pullback_matrix(self.bir, self.model, self.ledger)[1]

    def ind_image(self, x: ModelPoint) -> list[str]:
        """Labels of the curves contracted by f^-1 onto x (the divisor f(x))."""
        return [lab for lab, img in self.ledger.preimages.items() if isinstance(img, ModelPoint) and img == x]

    def ind_image_class(self, x: ModelPoint) -> tuple:
        cls = tuple([0] * self.model.rank)
        for lab in self.ind_image(x):
            cls = tuple(a + b for a, b in zip(cls, self.curve(lab).cls))
        return cls

    def exceptional_labels(self) -> list[str]:
        return [lab for lab, img in self.ledger.images.items() if isinstance(img, ModelPoint)]


def bare_model_map(bir: BirMap, name: str = "") -> ModelMap:
    """Model map on the ambient surface itself, using the declared data of the map."""
    from .lattice import ambient_curve, make_point

    amb = bir.ambient
    model = BlowupModel(amb, ())
    curves, images, preimages = [], {}, {}
    for tag, exc, target in (("C", bir.exc_f, images), ("D", bir.exc_finv, preimages)):
        for k, (poly, img) in enumerate(exc):
            lab = f"{tag}{k}"
            curves.append(ambient_curve(model, lab, poly, []))
            target[lab] = ModelPoint(make_point(amb, img))
    ledger = ActionLedger([], [], images, preimages,
                          [ModelPoint(make_point(amb, p)) for p in bir.ind_f],
                          [ModelPoint(make_point(amb, p)) for p in bir.ind_finv])
    return ModelMap(bir, model, ledger, curves, name=name or bir.name)


def columns_to_matrix(cols: Sequence[Sequence]) -> list[list]:
    n = len(cols)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def build_pullback_matrix(bir: BirMap, model: BlowupModel, ledger: ActionLedger):
    """(M_pull, M_push): base columns from multiplicities, exceptional columns from the ledger."""
    if len(ledger.pull_E) != model.n_points or len(ledger.push_E) != model.n_points:
        raise LedgerError("ledger must give a column for every exceptional class")
    pull = pullback_base_columns(bir.forward, model) + [tuple(c) for c in ledger.pull_E]
    push = pullback_base_columns(bir.backward, model) + [tuple(c) for c in ledger.push_E]
    for c in pull + push:
        if len(c) != model.rank or any(Fraction(x).denominator != 1 for x in c):
            raise LedgerError(f"ledger column {c} is not an integral class of rank {model.rank}")
    return columns_to_matrix(pull), columns_to_matrix(push)


def mat_mul(A, B):
    n, m, p = len(A), len(B), len(B[0])
    return [[sum((A[i][k] * B[k][j] for k in range(m) if A[i][k] and B[k][j]), 0) for j in range(p)]
            for i in range(n)]


def mat_pow_vec(M, v, n: int):
    for _ in range(n):
        v = mat_vec(M, v)
    return v


def transpose(A):
    return [list(r) for r in zip(*A)]


def gram_inverse(model: BlowupModel):
    G = [[Fraction(x) for x in row] for row in model.gram()]
    n = len(G)
    A = [row + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(G)]
    for c in range(n):
        piv = next(r for r in range(c, n) if A[r][c] != 0)
        A[c], A[piv] = A[piv], A[c]
        pv = A[c][c]
        A[c] = [x / pv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


def adjoint_of(M_pull, model: BlowupModel):
    """G^-1 M^T G."""
    G = model.gram()
    return mat_mul(mat_mul(gram_inverse(model), transpose(M_pull)), G)


# --------------------------------------------------------------------------
# verification


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self):
        return {"check": self.name, "ok": self.ok, **self.detail}


@dataclass
class Report:
    title: str
    checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, name, ok, **detail):
        self.checks.append(CheckResult(name, bool(ok), detail))

    def to_dict(self):
        return {"title": self.title, "ok": self.ok, "checks": [c.to_dict() for c in self.checks]}


def nef_test_classes(model: BlowupModel) -> list[tuple[str, tuple]]:
    out = []
    base = model.ambient.base_names
    for k, name in enumerate(base):
        v = [0] * model.rank
        v[k] = 1
        out.append((name, tuple(v)))
    amb = model.ample_base_class()
    for i, p in enumerate(model.points):
        if isinstance(p, Proper):
            v = list(amb)
            v[model.ambient.base_rank + i] = -1
            out.append((f"{'+'.join(base)}-e{i}", tuple(v)))
    return out


def ramification_class(M_pull, model: BlowupModel) -> tuple:
    K = model.canonical_class()
    return sub(K, mat_vec(M_pull, K))


def verify_action(mm: ModelMap, theta_plus=None, geometric: bool = True, seed: int = 0) -> Report:
    model = mm.model
    rep = Report(f"verify_action({mm.name})")
    M_pull, M_push = build_pullback_matrix(mm.bir, model, mm.ledger)
    # (i) adjointness
    adj = adjoint_of(M_pull, model)
    rep.add("adjoint", adj == [[Fraction(x) for x in row] for row in M_push],
            M_pull=M_pull, M_push=M_push)
    # (ii) push-pull on nef test classes
    tests = nef_test_classes(model)
    if theta_plus is not None:
        tests.append(("theta+", tuple(theta_plus)))
    bad = []
    for name, a in tests:
        for M, tag in ((M_pull, "pull"), (M_push, "push")):
            fa = mat_vec(M, a)
            if sign_of(intersection(model, fa, fa) - intersection(model, a, a)) < 0:
                bad.append(f"{tag}:{name}")
    rep.add("push_pull", not bad, witnesses=bad)
    # (iii) ramification: K - f^*K effective on f-exceptional curves
    for M, m, tag in ((M_pull, mm, "f"), (M_push, mm.inverse(), "f^-1")):
        R = ramification_class(M, model)
        exc = [m.curve(lab) for lab in m.exceptional_labels()]
        sol = feasible_nonneg([[Fraction(x) for x in c.cls] for c in exc], [Fraction(x) for x in R])
        integral = sol is not None and all(x.denominator == 1 for x in sol)
        rep.add(f"ramification_{tag}", integral, class_=list(R),
                support={c.label: str(x) for c, x in zip(exc, sol or []) if x})
    # (iv) curve correspondences against the matrices
    for M, m, tag in ((M_push, mm, "f"), (M_pull, mm.inverse(), "f^-1")):
        bad = []
        for c in m.curves:
            img = m.ledger.images.get(c.label)
            if img is None:
                continue
            expected = [0] * model.rank
            if not isinstance(img, ModelPoint):
                expected = list(m.curve(img).cls)
            for x in m.ledger.ind:
                if point_on_curve(model, x, c):
                    expected = [a + b for a, b in zip(expected, m.ind_image_class(x))]
            if list(mat_vec(M, c.cls)) != expected:
                bad.append(c.label)
        rep.add(f"correspondences_{tag}", not bad, mismatched=bad)
    if geometric:
        for m, tag in ((mm, "f"), (mm.inverse(), "f^-1")):
            res = verify_correspondences_geometric(m, seed=seed)
            ok = res.pop("ok")
            rep.add(f"geometric_images_{tag}", ok, **res)
    return rep


def sample_curve_points(m: ModelMap, c: TrackedCurve, count: int, rng: random.Random) -> list[ModelPoint]:
    model = m.model
    avoid_pts = set()
    out = []
    if c.poly is not None:
        from .arcs import proper_centers

        centers = proper_centers(model)
        pts = rational_points_on(model.ambient, c.poly, count + 4, rng)
        for p in pts:
            mp = ModelPoint(p)
            if p in centers or mp in m.ledger.ind:
                continue
            out.append(mp)
        return out[:count]
    i = c.exc_index
    p = model.points[i]
    from .arcs import proper_ancestor_coords

    base = proper_ancestor_coords(model, i)
    taken = {tuple(model.points[j].direction) for j in children(model, i)}
    tries = 0
    while len(out) < count and tries < 100:
        tries += 1
        d = (rng.randint(-9, 9), rng.randint(1, 9))
        from .arcs import norm_direction

        d = norm_direction(*d)
        mp = ModelPoint(base, i, d)
        if d in taken or mp in m.ledger.ind or mp in avoid_pts:
            continue
        # avoid the point where the strict transform meets the parent's exceptional curve
        if isinstance(p, InfinitelyNear) and d in ((0, 1), (1, 0)):
            continue
        avoid_pts.add(mp)
        out.append(mp)
    return out


def image_of_curve(m: ModelMap, c: TrackedCurve, rng: random.Random, samples: int = 5):
    """Geometric image: a tracked label, a ModelPoint (contracted), or 'untracked'/'unknown'."""
    pts = sample_curve_points(m, c, samples, rng)
    if len(pts) < 3:
        return "unknown", []
    imgs = [m.eval(p) for p in pts]
    imgs = [q for q in imgs if not isinstance(q, IndeterminacyHit)]
    if len(imgs) < 3:
        return "unknown", imgs
    if len(set(imgs)) == 1:
        return imgs[0], imgs
    for d in m.curves:
        if all(point_on_curve(m.model, q, d) for q in imgs):
            return d.label, imgs
    return "untracked", imgs


def verify_correspondences_geometric(m: ModelMap, seed: int = 0) -> dict:
    rng = random.Random(seed)
    mismatched = {}
    for c in m.curves:
        declared = m.ledger.images.get(c.label)
        if declared is None:
            continue
        got, _ = image_of_curve(m, c, rng)
        if got != declared:
            mismatched[c.label] = {"declared": str(declared), "observed": str(got)}
    ind_bad = [str(x) for x in m.ledger.ind if not isinstance(m.eval(x), IndeterminacyHit)]
    return {"ok": not mismatched and not ind_bad, "mismatched": mismatched, "ind_not_indeterminate": ind_bad}


# --------------------------------------------------------------------------
# algebraic stability


def degree_prediction(M_pull, model: BlowupModel, n: int) -> tuple:
    """Per output coordinate group, the (bi)degree predicted by M^n on the base classes."""
    b = model.ambient.base_rank
    out = []
    for k in range(b):
        v = [0] * model.rank
        v[k] = 1
        w = mat_pow_vec(M_pull, v, n)
        out.append(tuple(w[:b]))
    return tuple(out)


def as1_check(mm: ModelMap, N: int, iterates=None) -> Report:
    """Degree oracle by composition plus exact orbits of Ind(f^-1) avoiding Ind(f)."""
    from .orbitlab import as1_orbit_scan

    if N < 2:
        raise ValueError("horizon must be at least 2")
    rep = Report(f"as1_check({mm.name}, N={N})")
    M = mm.pullback_matrix()
    iterates = iterates or iterate_map(mm.forward, N)
    first_bad = None
    rows = []
    for n in range(1, N + 1):
        got = iterates[n].degrees()
        want = degree_prediction(M, mm.model, n)
        rows.append({"n": n, "composed": [list(g) for g in got], "predicted": [list(w) for w in want]})
        if tuple(got) != want and first_bad is None:
            first_bad = n
    rep.add("degree_oracle", first_bad is None, first_failure=first_bad, table=rows)
    scan = as1_orbit_scan(mm, N)
    rep.add("orbit_scan", scan["ok"], **{k: v for k, v in scan.items() if k != "ok"})
    rep.verdict = f"AS1 verified to horizon {N}" if rep.ok else (
        f"AS1 fails at n={first_bad}" if first_bad else "AS1 orbit collision")
    return rep


def _solve_exact(rows, rhs):
    """A solution of rows * c = rhs over Q (consistent systems only), or None."""
    n = len(rows[0])
    A = [[Fraction(x) for x in r] + [Fraction(b)] for r, b in zip(rows, rhs)]
    piv_cols, r = [], 0
    for c in range(n):
        piv = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        pv = A[r][c]
        A[r] = [x / pv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        piv_cols.append(c)
        r += 1
    if any(all(x == 0 for x in row[:n]) and row[n] != 0 for row in A):
        return None
    if len(piv_cols) < n:
        return None
    sol = [Fraction(0)] * n
    for i, c in enumerate(piv_cols):
        sol[c] = A[i][n]
    return sol


def _entry_sequences(its) -> list[list[int]]:
    rows = [[c for g in it.degrees() for c in g] for it in its]
    return [[r[j] for r in rows] for j in range(len(rows[0]))]


def fit_recurrence(seqs, max_skip: int = 2, max_order: int | None = None):
    """Smallest (order, transient) with a common recurrence and at least one redundant equation."""
    n_terms = min(len(s) for s in seqs)
    for k in range(1, (max_order or n_terms) + 1):
        for start in range(max_skip + 1):
            eqs = set()
            for s in seqs:
                for n in range(start, len(s) - k):
                    eqs.add((tuple(s[n + k - i] for i in range(1, k + 1)), s[n + k]))
            # shifted entry sequences repeat windows; only distinct equations count
            eqs = sorted(eqs)
            rows, rhs = [list(r) for r, _ in eqs], [b for _, b in eqs]
            if len(rows) <= k:
                continue
            c = _solve_exact(rows, rhs)
            if c is not None:
                return k, start, c, len(rows)
    return None


def _predict(s, c, n):
    k = len(c)
    return sum(c[i - 1] * s[n - i] for i in range(1, k + 1))


def degree_growth_oracle(f, n_max: int = 8, extend_to: int | None = None, confirm: int = 2,
                         width=Fraction(1, 10**6), max_skip: int = 2) -> dict:
    """Growth rate of deg(f^n) from composition alone.

    Every entry of the multidegree of f^n, n <= n_max, is fit by one common
    minimal linear recurrence (at least one redundant equation, the first
    ``max_skip`` terms may be a transient) and the dominant root of its
    characteristic polynomial is isolated exactly. With ``extend_to`` the data
    range grows until a fit exists that also predicts the next ``confirm``
    composed iterates."""
    top = extend_to if extend_to is not None else n_max
    its = iterate_map(f, top + (confirm if extend_to is not None else 0))
    seqs_all = _entry_sequences(its)
    n_used, fit = n_max, None
    while n_used <= top:
        seqs = [s[: n_used + 1] for s in seqs_all]
        fit = fit_recurrence(seqs, max_skip)
        if fit is not None and extend_to is not None:
            c = fit[2]
            ok = all(_predict(s, c, n) == s[n] for s in seqs_all for n in range(n_used + 1, n_used + confirm + 1))
            if not ok:
                fit = None
        if fit is not None or extend_to is None:
            break
        n_used += 1
    tot = [sum(s[n] for s in seqs_all) for n in range(min(len(its), n_used + 1))]
    ratios = [float(Fraction(tot[n], tot[n - 1])) for n in range(1, len(tot))]
    out = {"n_max": n_max, "n_used": n_used, "totals": tot, "ratios": ratios}
    if fit is None:
        out.update(order=None, note="no recurrence determined from the data")
        return out
    k, start, c, neq = fit
    # x^k - c_1 x^(k-1) - ... - c_k, low-to-high integer coefficients
    poly = [-c[k - 1 - i] for i in range(k)] + [Fraction(1)]
    den = 1
    for q in poly:
        den = den * q.denominator // gcd(den, q.denominator)
    ipoly = algnum.primitive_int(tuple(int(q * den) for q in poly))
    out.update(order=k, transient=start, equations=neq, recurrence=[str(x) for x in c],
               characteristic_polynomial=algnum.pstr(ipoly))
    root = algnum.largest_real_root(ipoly)
    if root is not None:
        out.update(root=root, interval=root.interval(width))
    return out


def oracle_agrees(lam: AlgNumber, oracle: dict, width=Fraction(1, 10**6)) -> bool:
    """The oracle's dominant root and lam share a certified interval of width <= ``width``."""
    if "root" not in oracle:
        return False
    lo, hi = lam.interval(width)
    olo, ohi = oracle["interval"]
    return max(lo, olo) <= min(hi, ohi) and hi - lo <= width and ohi - olo <= width


def as2_check(mm: ModelMap, spectral: "SpectralData") -> Report:
    rep = Report(f"as2_check({mm.name})")
    model = mm.model
    for m, theta, tag in ((mm, spectral.theta_plus, "theta+"), (mm.inverse(), spectral.theta_minus, "theta-")):
        for x in m.ledger.ind:
            cls = m.ind_image_class(x)
            val = intersection(model, theta, cls)
            try:
                s = sign_of(val)
                verdict = "pass" if s > 0 else "fail"
            except UncertifiedSign:
                verdict = "unknown"
            rep.add(f"{tag}.f({x})", verdict == "pass", verdict=verdict, pairing=float(val),
                    curves=m.ind_image(x))
    return rep


# --------------------------------------------------------------------------
# spectral data


def charpoly(M) -> tuple:
    return algnum.charpoly_bareiss(M)


def dynamical_degree(M_pull) -> AlgNumber:
    """Spectral radius of M_pull as an exact algebraic number (1 when no root exceeds 1)."""
    p = charpoly(M_pull)
    lam = algnum.largest_real_root(p)
    if lam is None or not _exceeds_one(lam):
        return AlgNumber((-1, 1), 1, 1)
    return lam


def _exceeds_one(lam: AlgNumber) -> bool:
    if lam.rational is not None:
        return lam.rational > 1
    w = Fraction(1, 2**10)
    while True:
        lo, hi = lam.interval(w)
        if lo > 1:
            return True
        if hi < 1:
            return False
        w /= 2**10


def nullspace(A, K: NumberField) -> list[list]:
    """Basis of the right kernel of a matrix over Q(lambda)."""
    A = [[K(x) for x in row] for row in A]
    m, n = len(A), len(A[0])
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if not A[i][c].is_zero()), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = A[r][c].inverse()
        A[r] = [x * inv for x in A[r]]
        for i in range(m):
            if i != r and not A[i][c].is_zero():
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [K.zero() for _ in range(n)]
        v[fc] = K.one()
        for i, pc in enumerate(pivots):
            v[pc] = -A[i][fc]
        basis.append(v)
    return basis


@dataclass
class SpectralData:
    lam: AlgNumber
    field: NumberField
    theta_plus: list
    theta_minus: list
    normalization: dict
    big: bool | None
    nef: dict = field(default_factory=dict)

    def to_dict(self, model: BlowupModel | None = None):
        names = model.basis_names() if model else [str(i) for i in range(len(self.theta_plus))]
        return {
            "lambda": self.lam.to_dict(),
            "theta_plus": {n: {"q_lambda": c.to_json(), "approx": float(c)} for n, c in zip(names, self.theta_plus)},
            "theta_minus": {n: {"q_lambda": c.to_json(), "approx": float(c)} for n, c in zip(names, self.theta_minus)},
            "normalization": self.normalization,
            "strictly_birational": self.big,
            "nef_on_tracked": self.nef,
        }


class DegenerateSpectrum(ArithmeticError):
    pass


def invariant_classes(M_pull, M_push, model: BlowupModel, curves=(), lam: AlgNumber | None = None) -> SpectralData:
    lam = lam or dynamical_degree(M_pull)
    K = lam.field()
    L = K.lam
    n = len(M_pull)
    out = []
    for M in (M_pull, M_push):
        A = [[K(M[i][j]) - (L if i == j else 0) for j in range(n)] for i in range(n)]
        ker = nullspace(A, K)
        if len(ker) != 1:
            raise DegenerateSpectrum(f"eigenspace of dimension {len(ker)}")
        out.append(ker[0])
    tp, tm = out
    amb = model.ample_base_class()
    # orient by pairing with the ample base class, scale theta+ to pair to 1 with it
    sp = intersection(model, tp, amb)
    if sign_of(sp) == 0:
        raise DegenerateSpectrum("theta+ is orthogonal to the ample class")
    tp = [x / sp for x in tp]
    sm = intersection(model, tm, amb)
    if sign_of(sm) < 0:
        tm = [-x for x in tm]
    pm = intersection(model, tp, tm)
    s = sign_of(pm)
    norm = {"theta_plus_dot_ample": "1", "theta_plus_dot_theta_minus_before": float(pm), "sign": s}
    if s > 0:
        tm = [x / pm for x in tm]
        norm["theta_plus_dot_theta_minus"] = "1"
    big_val = intersection(model, tp, tp)
    try:
        big = sign_of(big_val) > 0
    except UncertifiedSign:
        big = None
    nef = {}
    if curves:
        for tag, th in (("theta+", tp), ("theta-", tm)):
            ok, bad = nef_on_tracked(model, th, curves)
            nef[tag] = {"ok": ok, "violators": bad}
    return SpectralData(lam, K, tp, tm, norm, big, nef)


def eigen_residual(M, theta, lam_el) -> list:
    return [a - lam_el * b for a, b in zip(mat_vec(M, theta), theta)]


def convergence_check(M_pull, spectral: SpectralData, model: BlowupModel, alpha: Sequence, N: int) -> dict:
    """Residuals ||lam^-n M^n alpha - (alpha.theta-) theta+||_inf for n <= N with enclosures."""
    K = spectral.field
    L = K.lam
    coef = intersection(model, [K(a) for a in alpha], spectral.theta_minus)
    limit = [coef * t for t in spectral.theta_plus]
    v = [K(a) for a in alpha]
    rows = []
    inv = L.inverse()
    scale = K.one()
    for n in range(N + 1):
        diff = [scale * a - b for a, b in zip(v, limit)]
        enc = [d.enclosure(Fraction(1, 2**80)) for d in diff]
        lo = max(max(0, a if a > 0 else -b if b < 0 else 0) for a, b in enc)
        hi = max(max(abs(a), abs(b)) for a, b in enc)
        rows.append({"n": n, "residual": float((lo + hi) / 2), "lo": lo, "hi": hi})
        v = list(mat_vec(M_pull, v))
        scale = scale * inv
    decreasing = []
    for r0, r1 in zip(rows, rows[1:]):
        decreasing.append(r1["hi"] < r0["lo"])
    for r in rows:
        r["err"] = float(r["hi"] - r["lo"])
        r["lo"], r["hi"] = float(r["lo"]), float(r["hi"])
    return {"rows": rows, "strictly_decreasing_steps": decreasing}
