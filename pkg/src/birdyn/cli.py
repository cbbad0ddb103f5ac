"""Command line driver: load a map, run the analyses, write JSON and CSV reports.

Exit codes: 0 ok, 2 invalid input, 3 a verification failed, 4 a requested
horizon could not be reached, 5 internal error.
"""
from __future__ import annotations

import argparse
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .catalog import CatalogError, catalog
from .exact import INF, finite
from .io import DefinitionError, atomic_write, dump_json, load_definition, parse_model_point

EXIT_OK, EXIT_INPUT, EXIT_VERIFY, EXIT_HORIZON, EXIT_INTERNAL = 0, 2, 3, 4, 5

DEFAULT_FAMILIES = (("df", {"eps": Fraction(1, 4)}), ("bd", {"a": Fraction(2), "b": Fraction(1)}))


class InputError(ValueError):
    pass


class Outcome:
    """Collects the worst exit status seen while running a command."""

    def __init__(self):
        self.code = EXIT_OK

    def fail(self, code: int):
        if self.code == EXIT_OK or code == EXIT_INTERNAL:
            self.code = code


# --------------------------------------------------------------------------
# input


def _parse_params(items) -> dict:
    out = {}
    for it in items or ():
        if "=" not in it:
            raise InputError(f"--param expects k=v, got {it!r}")
        k, v = it.split("=", 1)
        try:
            out[k.strip()] = Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"--param {k}: not a rational ({v!r})") from exc
    return out


def load_map(args):
    if args.file and args.catalog:
        raise InputError("give either --catalog or --file, not both")
    if args.file:
        return load_definition(args.file)
    if args.catalog:
        return catalog(args.catalog, **_parse_params(args.param))
    raise InputError("no map given (use --catalog NAME or --file PATH)")


def _start(d, text):
    try:
        return parse_model_point(d.mm.model.ambient, text)
    except (ValueError, IndexError) as exc:
        raise InputError(f"bad point {text!r}: {exc}") from exc


def _places(text: str):
    out = []
    for tok in text.split(","):
        tok = tok.strip().lower()
        if tok in ("inf", "infinity", "oo"):
            out.append(INF)
            continue
        try:
            out.append(finite(int(tok)))
        except ValueError as exc:
            raise InputError(f"bad place {tok!r}") from exc
    return out


def sample_points(ambient, count: int, rng: random.Random, bound: int = 12) -> list:
    """Random primitive rational points with coordinates in [-bound, bound]."""
    from .lattice import make_point

    pts = []
    while len(pts) < count:
        groups = []
        for n in ambient.groups:
            g = [rng.randint(-bound, bound) for _ in range(n)]
            if not any(g):
                g[0] = 1
            groups.append(g)
        pts.append(make_point(ambient, groups))
    return pts


# --------------------------------------------------------------------------
# analyses (each returns a JSON-able dict and records failures on ``out``)


def spectral_section(d, out: Outcome, N: int = 12):
    from .picdyn import DegenerateSpectrum, convergence_check, dynamical_degree, invariant_classes

    mm = d.mm
    M = mm.pullback_matrix()
    lam = dynamical_degree(M)
    sec = {"lambda": lam.to_dict(), "pullback_matrix": M}
    if lam.rational == 1:
        sec["note"] = "dynamical degree 1 on this model"
        return sec, None
    try:
        sp = invariant_classes(M, mm.pushforward_matrix(), mm.model, mm.curves, lam)
    except DegenerateSpectrum as exc:
        sec["error"] = str(exc)
        out.fail(EXIT_VERIFY)
        return sec, None
    sec.update(sp.to_dict(mm.model))
    conv = convergence_check(M, sp, mm.model, mm.model.ample_base_class(), N)
    conv["horizon"] = N
    conv["alpha"] = "ample base class"
    sec["convergence"] = conv
    return sec, sp


def verify_section(d, out: Outcome, N: int, seed: int):
    from .birmap import verify_birmap
    from .picdyn import as1_check, as2_check, verify_action

    mm = d.mm
    sec = {"horizon": N, "seed": seed}
    rb = verify_birmap(mm.bir, mm.model, random.Random(seed))
    sec["birmap"] = rb.to_dict()
    spec, sp = spectral_section(d, Outcome())
    ra = verify_action(mm, sp.theta_plus if sp else None, geometric=True, seed=seed)
    sec["action"] = ra.to_dict()
    r1 = as1_check(mm, N)
    sec["as1"] = r1.to_dict()
    sec["as1_verdict"] = r1.verdict
    oks = [rb.ok, ra.ok, r1.ok]
    if sp is not None:
        r2 = as2_check(mm, sp)
        sec["as2"] = r2.to_dict()
        oks.append(r2.ok)
    else:
        sec["as2"] = {"ok": False, "reason": "no invariant classes"}
        oks.append(False)
    sec["ok"] = all(oks)
    if not sec["ok"]:
        out.fail(EXIT_VERIFY)
    return sec, sp


def classify_section(d, sp, out: Outcome, N: int):
    from .basecurves import classify, kawamata_decomposition, new_decomposition, verify_basecurve_theorem

    mm = d.mm
    cls = classify(mm, sp, N)
    thm = verify_basecurve_theorem(cls, mm, sp, N)
    sec = {"horizon": N, "classification": cls.to_dict(), "base_curve_checks": thm.to_dict()}
    exp = d.expected
    if exp:
        mism = {}
        for key, got in (("c_per", cls.c_per), ("c_exc_plus", cls.c_exc_plus),
                         ("c_exc_minus", cls.c_exc_minus), ("c_both", cls.c_both)):
            if key in exp and sorted(exp[key]) != sorted(got):
                mism[key] = {"expected": exp[key], "got": got}
        sec["expected_mismatch"] = mism
        if mism:
            out.fail(EXIT_VERIFY)
    if not thm.ok:
        out.fail(EXIT_VERIFY)
    kaw = kawamata_decomposition(mm, sp, cls)
    sec["kawamata"] = kaw.to_dict()
    if kaw.ok:
        new = new_decomposition(kaw, mm, sp, cls, N=N)
        sec["decomposition"] = new.to_dict()
    return sec, cls


def orbit_section(d, start, N: int, out: Outcome):
    from .orbitlab import iterate

    rec = iterate(d.mm, start, N)
    if rec.status == "size-capped":
        out.fail(EXIT_HORIZON)
    return rec


def height_section(d, sp, starts, N: int, out: Outcome):
    from .heightlab import canonical_height, functional_equation_check

    rows = []
    for x in starts:
        ch = canonical_height(d.mm, sp, x, N)
        row = ch.to_dict()
        if ch.status == "complete":
            row["functional_equation"] = functional_equation_check(d.mm, sp, x, N)
        else:
            out.fail(EXIT_HORIZON)
        rows.append((ch, row))
    return rows


def bd_section(d, sp, starts, places, K: int, out: Outcome):
    from .energy import bd_partial_sums

    reps = []
    for y in starts:
        for v in places:
            r = bd_partial_sums(d.mm, y, v, K, lam=sp.lam if sp else None)
            if r.status == "truncated":
                out.fail(EXIT_HORIZON)
            reps.append(r)
    return reps


def telescope_section(d, starts, n: int, out: Outcome):
    from .heightlab import build_cv_ledger, telescoping_check

    f = d.mm.forward
    led = build_cv_ledger(f)
    rows = []
    for y in starts:
        res = telescoping_check(f, y.base if hasattr(y, "base") else y, n, ledger=led)
        if not res["ok"]:
            out.fail(EXIT_VERIFY)
        rows.append({"start": str(y), "steps": n, **{k: v for k, v in res.items() if k != "rows"}})
    return {"cv_ledger": led.to_dict(), "checks": rows}


# --------------------------------------------------------------------------
# commands


def _write(out_dir: Path, name: str, obj):
    dump_json(obj, out_dir / name)


def _header(d, args) -> dict:
    return {"map": d.name, "family": d.family, "params": {k: str(v) for k, v in d.params.items()},
            "seed": args.seed, "version": __version__}


def cmd_verify(d, args, out_dir, out):
    sec, _ = verify_section(d, out, args.horizon, args.seed)
    _write(out_dir, "verify.json", {**_header(d, args), **sec})
    print(f"{d.name}: {sec['as1_verdict']}; birmap {'ok' if sec['birmap']['ok'] else 'FAILED'}; "
          f"action {'ok' if sec['action']['ok'] else 'FAILED'}; as2 {'ok' if sec['as2']['ok'] else 'FAILED'}")


def cmd_spectral(d, args, out_dir, out):
    sec, sp = spectral_section(d, out, args.horizon)
    _write(out_dir, "spectral.json", {**_header(d, args), **sec})
    lam = sec["lambda"]
    print(f"{d.name}: lambda root of {lam['minimal_polynomial_text']} in "
          f"[{lam['interval'][0]}, {lam['interval'][1]}] (~{lam['approx']:.12g})")
    if sp is not None:
        steps = sec["convergence"]["strictly_decreasing_steps"]
        print(f"  theta+.theta+ > 0: {sp.big}; residuals decreasing on {sum(steps)}/{len(steps)} steps")


def _need_spectral(d, out):
    _, sp = spectral_section(d, out)
    if sp is None:
        raise InputError(f"{d.name}: no invariant classes (dynamical degree 1 or degenerate spectrum)")
    return sp


def cmd_classify(d, args, out_dir, out):
    sp = _need_spectral(d, out)
    sec, cls = classify_section(d, sp, out, args.horizon)
    _write(out_dir, "classify.json", {**_header(d, args), **sec})
    print(f"{d.name}: C_per={cls.c_per} C_exc+={cls.c_exc_plus} C_exc-={cls.c_exc_minus} "
          f"both={cls.c_both}; base-curve checks {'ok' if sec['base_curve_checks']['ok'] else 'FAILED'}")


def cmd_orbit(d, args, out_dir, out):
    rec = orbit_section(d, _start(d, args.start), args.horizon, out)
    _write(out_dir, "orbit.json", {**_header(d, args), **rec.to_dict()})
    atomic_write(out_dir / "orbit.csv", rec.to_csv())
    print(f"{d.name}: orbit of {rec.start}: {rec.steps} steps, status {rec.status}")


def cmd_height(d, args, out_dir, out):
    from .heightlab import naive_height

    x = _start(d, args.start)
    res = {**_header(d, args), "start": str(x), "naive_height": naive_height(x.base).log_value}
    if args.canonical:
        sp = _need_spectral(d, out)
        ((ch, row),) = height_section(d, sp, [x], args.horizon, out)
        res["canonical"] = row
        atomic_write(out_dir / "height.csv", ch.to_csv())
        print(f"{d.name}: canonical height of {x} ~ {ch.estimate!r} "
              f"(horizon {ch.horizon}, Cauchy gap {ch.cauchy_gap!r}, {ch.status})")
    else:
        print(f"{d.name}: naive height of {x} = {res['naive_height']!r}")
    _write(out_dir, "height.json", res)


def _bd_starts(d, args):
    if args.start:
        return [_start(d, args.start)]
    return list(d.mm.ledger.ind_inv)


def cmd_bdsum(d, args, out_dir, out):
    sp = _need_spectral(d, out)
    starts = _bd_starts(d, args)
    reps = bd_section(d, sp, starts, _places(args.places), args.horizon, out)
    index = []
    for i, r in enumerate(reps):
        name = f"bd_{starts.index(_start(d, r.start)) if not args.start else 0}_{r.place}.csv"
        atomic_write(out_dir / name, r.to_csv())
        index.append({**r.to_dict(), "csv": name})
        gap = "n/a" if r.cauchy_gap is None else f"{r.cauchy_gap:.3g}"
        print(f"{d.name}: y={r.start} v={r.place} K={r.horizon}: {r.status}, "
              f"S={index[-1]['partial_sum']:.12g}, gap={gap}")
    _write(out_dir, "bdsum.json", {**_header(d, args), "horizon": args.horizon, "reports": index})


def cmd_telescope(d, args, out_dir, out):
    if d.mm.model.points:
        print(f"{d.name}: note: telescoping uses the map on the ambient surface", file=sys.stderr)
    rng = random.Random(args.seed)
    starts = [_start(d, args.start)] if args.start else sample_points(d.mm.model.ambient, 5, rng)
    sec = telescope_section(d, starts, args.horizon, out)
    _write(out_dir, "telescope.json", {**_header(d, args), "steps": args.horizon, **sec})
    ok = sum(r["ok"] for r in sec["checks"])
    print(f"{d.name}: telescoping exact on {ok}/{len(sec['checks'])} starts ({args.horizon} steps)")


def report_one(d, args, out_dir: Path, out: Outcome) -> dict:
    t0 = time.perf_counter()
    rep = _header(d, args)
    ver, sp = verify_section(d, out, args.horizon, args.seed)
    rep["verify"] = ver
    rep["spectral"], _ = spectral_section(d, Outcome())
    if sp is None:
        rep["note"] = "no invariant classes; remaining sections skipped"
        return rep
    rep["classify"], cls = classify_section(d, sp, out, args.horizon)
    if args.all:
        from .orbitlab import iterate, orbit_trichotomy

        rng = random.Random(args.seed)
        rep["ind_inverse_orbits"] = []
        for y in d.mm.ledger.ind_inv:
            rec = iterate(d.mm, y, args.orbit_horizon)
            rep["ind_inverse_orbits"].append({**rec.to_dict(), "trichotomy": orbit_trichotomy(d.mm, rec, cls)})
        pts = sample_points(d.mm.model.ambient, args.samples, rng)
        hh = args.height_horizon or int(d.options.get("height_horizon", 20))
        hs = height_section(d, sp, pts, hh, Outcome())
        rep["heights"] = {"horizon": hh, "points": [row for _, row in hs]}
        bds = bd_section(d, sp, list(d.mm.ledger.ind_inv), [INF, finite(2), finite(3), finite(5)],
                         args.bd_horizon, out)
        rep["bdsum"] = {"horizon": args.bd_horizon, "reports": [r.to_dict() for r in bds]}
        for k, r in enumerate(bds):
            atomic_write(out_dir / f"bd_{k}_{r.place}.csv", r.to_csv())
    rep["elapsed_seconds"] = round(time.perf_counter() - t0, 3)
    return rep


def cmd_report(d, args, out_dir, out):
    maps = [d] if d is not None else [catalog(n, **p) for n, p in DEFAULT_FAMILIES]
    for m in maps:
        sub = out_dir if d is not None else out_dir / m.family
        rep = report_one(m, args, sub, out)
        _write(sub, "report.json", rep)
        cls = rep.get("classify", {}).get("classification", {})
        print(f"{m.name}: {rep['verify']['as1_verdict']}; C_per={cls.get('C_per')} "
              f"C_exc+={cls.get('C_exc_plus_only')} C_exc-={cls.get('C_exc_minus_only')} "
              f"({rep.get('elapsed_seconds', 0)} s)")


COMMANDS = {
    "verify": cmd_verify, "spectral": cmd_spectral, "classify": cmd_classify, "orbit": cmd_orbit,
    "height": cmd_height, "bdsum": cmd_bdsum, "telescope": cmd_telescope, "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("map selection")
    src.add_argument("--catalog", help="df | bd | henon | quadratic_involution")
    src.add_argument("--param", action="append", metavar="K=V", help="family parameter, rational (repeatable)")
    src.add_argument("--file", help="map-definition JSON file")
    common.add_argument("--out", default="birdyn-out", help="output directory (default: %(default)s)")
    common.add_argument("--seed", type=int, default=0, help="seed for all random sampling")

    p = argparse.ArgumentParser(prog="birdyn", description="Dynamics of birational surface maps.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="birational map, action and stability checks").add_argument(
        "--horizon", type=int, default=6)
    sub.add_parser("spectral", parents=[common], help="dynamical degree and invariant classes").add_argument(
        "--horizon", type=int, default=12, help="convergence-check horizon")
    sub.add_parser("classify", parents=[common], help="base-curve classification").add_argument(
        "--horizon", type=int, default=6)
    o = sub.add_parser("orbit", parents=[common], help="exact forward orbit")
    o.add_argument("--start", required=True)
    o.add_argument("--horizon", type=int, default=20)
    h = sub.add_parser("height", parents=[common], help="naive or canonical height")
    h.add_argument("--start", required=True)
    h.add_argument("--canonical", action="store_true")
    h.add_argument("--horizon", type=int, default=20)
    b = sub.add_parser("bdsum", parents=[common], help="weighted log-distance sums to Ind(f)")
    b.add_argument("--places", default="inf,2,3,5")
    b.add_argument("--horizon", type=int, default=40)
    g = b.add_mutually_exclusive_group()
    g.add_argument("--start")
    g.add_argument("--from-ind-inverse", action="store_true", help="start at each point of Ind(f^-1) (default)")
    t = sub.add_parser("telescope", parents=[common], help="exact telescoping identity on the ambient surface")
    t.add_argument("--start")
    t.add_argument("--horizon", type=int, default=10)
    r = sub.add_parser("report", parents=[common], help="full analysis report")
    r.add_argument("--all", action="store_true", help="also orbits, heights and BD sums")
    r.add_argument("--horizon", type=int, default=6)
    r.add_argument("--orbit-horizon", type=int, default=20)
    r.add_argument("--height-horizon", type=int, default=None,
                   help="canonical-height horizon (default: the map's option, else 20)")
    r.add_argument("--bd-horizon", type=int, default=40)
    r.add_argument("--samples", type=int, default=5, help="random points for the height table")
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = Outcome()
    out_dir = Path(args.out)
    try:
        if args.command == "report" and not (args.catalog or args.file):
            d = None
        else:
            d = load_map(args)
        COMMANDS[args.command](d, args, out_dir, out)
    except (InputError, CatalogError, DefinitionError) as exc:
        print(f"birdyn: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"birdyn: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return out.code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
