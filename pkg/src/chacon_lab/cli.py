"""Command-line front end: ``chacon-lab <command> ...``.

Exit status is 0 on success, 1 when a verification report has failures and
2 on usage or precondition errors.  Output goes to stdout, or atomically to
``--output`` (written to a temporary file and renamed).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from fractions import Fraction

import numpy as np

from . import crossings as cr
from . import diagonals as dg
from . import measures as ms
from . import render
from . import witness as wt
from .errors import ChaconError
from .report import Report, jsonable
from .tower import TowerGeometry, default_geometry, half_height
from .transform import scaled_orbit
from .triadic import from_scaled, parse_triadic


class UsageError(Exception):
    pass


# parsing helpers -------------------------------------------------------------


def _ints(text: str) -> tuple:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _point(text: str) -> tuple:
    try:
        return tuple(parse_triadic(t.strip()) for t in text.split(","))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _load_json(text: str):
    if os.path.exists(text):
        with open(text, encoding="utf-8") as fh:
            return json.load(fh)
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        raise UsageError(f"not a JSON file or JSON text: {text!r}") from None


def _family(args) -> dg.ConsistentFamily:
    return dg.ConsistentFamily.from_json(_load_json(args.family))


def _params(args) -> ms.DiagonalMeasureParams:
    obj = _load_json(args.family)
    scale = args.scale if getattr(args, "scale", None) is not None else obj.get("scale", 1)
    return ms.DiagonalMeasureParams(dg.ConsistentFamily.from_json(obj), ms.parse_rational(scale),
                                    max_depth=args.geometry.max_depth)


def _box(text: str) -> dg.BoxD:
    try:
        depth, levels = text.split(":")
        return dg.BoxD(int(depth), _ints(levels))
    except ValueError as exc:
        raise UsageError(f"box must look like 'n:l1,l2,...' ({exc})") from None


def _read_tensor(path: str) -> dict:
    tensor = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or not row[0].strip().lstrip("-").isdigit():
                continue
            if "/" in row[-1]:
                key, value = row[:-1], Fraction(row[-1])
            else:
                key, value = row[:-2], Fraction(int(row[-2]), 3 ** int(row[-1]))
            tensor[tuple(int(v) for v in key)] = value
    if not tensor:
        raise UsageError(f"no tensor rows in {path}")
    return tensor


# output -------------------------------------------------------------------


def _write(args, text: str) -> None:
    if not args.output or args.output == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(args.output))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(args.output))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, args.output)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n"


def _csv(header: list, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([str(v) for v in r])
    return buf.getvalue()


def _emit_reports(args, reports) -> int:
    if isinstance(reports, Report):
        reports = [reports]
    total = reports[0]
    for r in reports[1:]:
        total = total.merge(r) if r.name == total.name else total
    payload = total.to_json() if len(reports) == 1 else {"total": total.to_json(), "runs": reports}
    _write(args, _json(payload))
    return 0 if all(r.ok for r in reports) else 1


# commands -----------------------------------------------------------------


def cmd_tower(args) -> int:
    g: TowerGeometry = args.geometry
    if args.levels is not None:
        n = args.levels
        rows = []
        for level in range(g.height(n)):
            a, b = g.level_interval(n, level)
            rows.append((level, a.to_fraction(), b.to_fraction()))
        _write(args, _csv(["level", "left", "right"], rows))
        return 0
    depth = args.depth if args.depth is not None else g.max_depth
    g._check_depth(depth)
    rows = [(n, g.height(n), g.support_length(n).to_fraction()) for n in range(depth + 1)]
    _write(args, _csv(["n", "h_n", "L_n"], rows))
    return 0


def cmd_orbit(args) -> int:
    xs = _point(args.point)
    j_min, j_max = (-args.steps, 0) if args.backward else (0, args.steps)
    grid, rows = scaled_orbit(xs, j_min, j_max, args.geometry)
    header = ["j"] + [f"x{i + 1}" for i in range(len(xs))]
    if args.depth is not None:
        header += [f"level{i + 1}" for i in range(len(xs))]
    out = []
    for k in range(j_max - j_min + 1):
        vals = [rows[i][k] for i in range(len(xs))]
        if any(v is None for v in vals):
            continue
        line = [j_min + k] + [from_scaled(v, grid.scale).to_fraction() for v in vals]
        if args.depth is not None:
            line += [grid.level_of(args.depth, v) for v in vals]
        out.append(line)
    _write(args, _csv(header, out))
    return 0


def cmd_crossings(args) -> int:
    xs = _point(args.point)
    found = cr.crossings_in_window(xs, args.n, args.j_min, args.j_max, args.geometry)
    _write(args, _json({"depth": args.n, "window": [args.j_min, args.j_max], "crossings": found}))
    return 0


def cmd_verify(args) -> int:
    g = args.geometry
    kind = args.lemma
    if kind == "lemma22":
        shifts = [cr.PartialShift.from_g1(args.d, _ints(args.g1))] if args.g1 is not None \
            else cr.PartialShift.all(args.d)
        reports = [cr.verify_bto_sb(args.n, s, args.resolution, args.centres, g) for s in shifts]
        return _emit_reports(args, reports)
    if kind == "lemma23":
        return _emit_reports(args, cr.verify_tn(args.n, args.ell, args.d, args.resolution, g))
    if kind in ("lemma24", "lemma25"):
        xs = _point(args.point)
        j_max = args.window if args.j_max is None else args.j_max
        fn = cr.verify_separation if kind == "lemma24" else cr.verify_long_crossing
        return _emit_reports(args, fn(xs, args.n, args.j_min, j_max, g))
    if kind == "lemma26":
        xs = _point(args.point)
        hits = cr.find_special_depths(xs, args.n_max, args.window, g)
        ok = all(h.pattern_ok and h.increment_ok for h in hits)
        _write(args, _json({"special_depths": hits, "failed": sum(not (h.pattern_ok and h.increment_ok) for h in hits)}))
        return 0 if ok else 1
    if kind == "seen":
        spec = wt.WitnessSpec(_family(args), args.depth, args.position, args.central_choice,
                              not args.allow_inconsistent)
        return _emit_reports(args, wt.verify_seen_invariance(spec, args.j_min, args.j_max, g))
    p = _params(args)
    if kind == "graph-identity":
        return _emit_reports(args, ms.verify_graph_identity(p, args.n, g))
    if kind == "additivity":
        return _emit_reports(args, ms.verify_additivity(p, args.n))
    raise UsageError(f"unknown check {kind}")


def cmd_diagonal(args) -> int:
    if args.action == "refine":
        D = dg.DiagonalD(args.depth, _ints(args.offsets))
        tau = _ints(args.tau)
        out = dg.diagonal_refine(D, tau, allow_forbidden=args.allow_forbidden)
        _write(args, _json({"from": D, "tau": list(tau), "to": out, "admissible": dg.is_admissible(tau)}))
        return 0
    if args.action == "check":
        f = _family(args)
        diags = dg.refine_family(f, args.up_to, args.geometry)
        report = dg.initial_report(f.initial)
        _write(args, _json({"family": f, "initial": report, "diagonals": diags,
                            "condition_tau": f.condition_tau()}))
        return 0 if report["initial"] else 1
    example = dg.DiagonalD(args.depth, _ints(args.offsets))
    _write(args, render.figure2(2, example))
    return 0


def cmd_measure(args) -> int:
    if args.action == "factorize":
        res = ms.factorize(_read_tensor(args.tensor), ms.parse_rational(args.tolerance))
        _write(args, _json(res))
        return 0
    if args.action == "eval" and args.product:
        obj = _load_json(args.product)
        pp = ms.ProductParams(tuple(tuple(p) for p in obj["partition"]),
                              tuple(ms.DiagonalMeasureParams.from_json(f) for f in obj["factors"]))
        b = _box(args.box)
        _write(args, _json({"box": b, "value": ms.product_measure_of_box(pp, b)}))
        return 0
    p = _params(args)
    if args.action == "eval":
        b = _box(args.box)
        _write(args, _json({"box": b, "value": ms.measure_of_box(p, b), "derived_by_restriction": b.depth < p.n0}))
    elif args.action == "halfcube":
        rows = ms.halfcube_table(p, args.n_max)
        if args.format == "csv":
            _write(args, _csv(["n", "box_count", "alpha", "sigma_C", "bound", "step"],
                              [(r["n"], r["box_count"], r["alpha"], r["sigma_C"], r["bound"], r["step"] or "")
                               for r in rows]))
        else:
            _write(args, _json(rows))
    elif args.action == "classify":
        _write(args, _json(ms.classify(p)))
    elif args.action == "marginal":
        out = ms.marginal(p, args.n, args.coordinate)
        out["compatible_levels"] = ms.compatible_level_count(p, args.n)[0]
        _write(args, _json(out))
    return 0


def cmd_witness(args) -> int:
    spec = wt.WitnessSpec(_family(args), args.depth, args.position, args.central_choice,
                          not args.allow_inconsistent)
    if args.action == "make":
        chain = wt.witness_chain(spec)
        xs = wt.witness_point(spec, args.geometry)
        _write(args, _json({"spec": spec, "point": [str(x) for x in xs], "chain": chain}))
        return 0
    return _emit_reports(args, wt.verify_seen_invariance(spec, args.j_min, args.j_max, args.geometry))


def _start(args, p) -> tuple:
    if args.point:
        return _point(args.point)
    rng = np.random.default_rng(args.seed)
    return wt.random_start(p, args.start_depth, rng, args.geometry)


def cmd_experiment(args) -> int:
    p = _params(args)
    g = args.geometry
    if args.action == "hopf":
        start = _start(args, p)
        table = wt.hopf_experiment(p, start, args.m, args.steps, g)
        table["start"] = [str(x) for x in start]
        table["seed"] = args.seed
        if args.format == "csv":
            _write(args, _csv(["levels", "n_B", "sigma", "exact_ratio", "empirical_ratio", "deviation"],
                              [(" ".join(map(str, r["levels"])), r["n_B"], r["sigma"], r["exact_ratio"],
                                f"{r['empirical_ratio']:.12g}", f"{r['deviation']:.12g}") for r in table["rows"]]))
        else:
            _write(args, _json(table))
        return 0
    if args.action == "counts":
        out = wt.crossing_counts(p, _start(args, p), args.m, args.n, args.window, g)
        _write(args, _json(out))
        check = out["shift_check"]
        return 0 if check is None or check.ok else 1
    spec = wt.WitnessSpec(p.family, args.witness_depth, require_consistent=False)
    start = _point(args.point) if args.point else wt.witness_point(spec, g)
    out = wt.orbit_support_check(p, start, -args.window, args.window, _ints(args.depths), g)
    out["start"] = [str(x) for x in start]
    _write(args, _json(out))
    return 0


def cmd_render(args) -> int:
    if args.figure == "figure1":
        _write(args, render.figure1(args.step, args.geometry))
    else:
        _write(args, render.figure2(2))
    return 0


# parser -----------------------------------------------------------------------


def _family_args(p, scale=True):
    p.add_argument("--family", required=True, help="family JSON text or path: {n0, offsets, taus, tail}")
    if scale:
        p.add_argument("--scale", default=None, help="total scale lambda (rational)")


def _witness_args(p):
    p.add_argument("--depth", type=int, required=True, help="witness depth M")
    p.add_argument("--position", type=int, default=None)
    p.add_argument("--central-choice", type=int, default=2, choices=(1, 2, 3))
    p.add_argument("--allow-inconsistent", action="store_true",
                   help="build a finite representative even if some coordinate is eventually always 3")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-depth", type=int, default=None, help="deepest tower (default: CHACON_MAX_DEPTH or 12)")
    common.add_argument("-o", "--output", default=None, help="write to this file atomically instead of stdout")

    ap = argparse.ArgumentParser(prog="chacon-lab", description="Exact experiments with the infinite Chacon map.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tower", parents=[common], help="h_n / L_n table or a level table")
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--levels", type=int, default=None, help="print the level table of tower n")
    p.set_defaults(func=cmd_tower)

    p = sub.add_parser("orbit", parents=[common], help="orbit of a point tuple")
    p.add_argument("--point", required=True, help="comma-separated triadic rationals, e.g. 0,4/3")
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--backward", action="store_true")
    p.add_argument("--depth", type=int, default=None, help="also print tower levels at this depth")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("crossings", parents=[common], help="n-crossings in a window")
    p.add_argument("--point", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--j-min", type=int, default=0)
    p.add_argument("--j-max", type=int, default=1000)
    p.set_defaults(func=cmd_crossings)

    p = sub.add_parser("verify", help="run a lemma or invariant checker")
    vs = p.add_subparsers(dest="lemma", required=True)
    q = vs.add_parser("lemma22", parents=[common])
    q.add_argument("--d", type=int, default=2)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--g1", default=None, help="coordinates moved by T, e.g. 1 (default: all partitions)")
    q.add_argument("--resolution", type=int, default=None)
    q.add_argument("--centres", action="store_true")
    q = vs.add_parser("lemma23", parents=[common])
    q.add_argument("--d", type=int, default=2)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--ell", type=int, required=True)
    q.add_argument("--resolution", type=int, default=None)
    for name in ("lemma24", "lemma25"):
        q = vs.add_parser(name, parents=[common])
        q.add_argument("--d", type=int, default=None, help="informational; the point fixes d")
        q.add_argument("--n", type=int, required=True)
        q.add_argument("--point", required=True)
        q.add_argument("--window", type=int, default=1000)
        q.add_argument("--j-min", type=int, default=0)
        q.add_argument("--j-max", type=int, default=None)
    q = vs.add_parser("lemma26", parents=[common])
    q.add_argument("--point", required=True)
    q.add_argument("--n-max", type=int, required=True)
    q.add_argument("--window", type=int, default=None)
    q = vs.add_parser("seen", parents=[common])
    _family_args(q, scale=False)
    _witness_args(q)
    q.add_argument("--j-min", type=int, default=-20)
    q.add_argument("--j-max", type=int, default=20)
    for name in ("graph-identity", "additivity"):
        q = vs.add_parser(name, parents=[common])
        _family_args(q)
        q.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("diagonal", help="diagonal refinement and families")
    ds = p.add_subparsers(dest="action", required=True)
    q = ds.add_parser("refine", parents=[common])
    q.add_argument("--depth", type=int, required=True)
    q.add_argument("--offsets", required=True)
    q.add_argument("--tau", required=True)
    q.add_argument("--allow-forbidden", action="store_true")
    q = ds.add_parser("check", parents=[common])
    _family_args(q, scale=False)
    q.add_argument("--up-to", type=int, required=True)
    q = ds.add_parser("render", parents=[common], help="3x3 transition grid (SVG)")
    q.add_argument("--depth", type=int, default=1)
    q.add_argument("--offsets", default="0,0")
    p.set_defaults(func=cmd_diagonal)

    p = sub.add_parser("measure", help="evaluate diagonal measures")
    mss = p.add_subparsers(dest="action", required=True)
    q = mss.add_parser("eval", parents=[common])
    q.add_argument("--family", default=None)
    q.add_argument("--scale", default=None)
    q.add_argument("--product", default=None, help='JSON {"partition": [[1],[2]], "factors": [family, ...]}')
    q.add_argument("--box", required=True, help="n:l1,l2,...")
    q = mss.add_parser("halfcube", parents=[common])
    _family_args(q)
    q.add_argument("--n-max", type=int, required=True)
    q.add_argument("--format", choices=("json", "csv"), default="csv")
    q = mss.add_parser("classify", parents=[common])
    _family_args(q)
    q = mss.add_parser("marginal", parents=[common])
    _family_args(q)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--coordinate", type=int, default=1)
    q = mss.add_parser("factorize", parents=[common])
    q.add_argument("--tensor", required=True, help="CSV rows l1,...,ld,num,exp or l1,...,ld,p/q")
    q.add_argument("--tolerance", default="0")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("witness", help="points seen by a family")
    wss = p.add_subparsers(dest="action", required=True)
    for name in ("make", "check"):
        q = wss.add_parser(name, parents=[common])
        _family_args(q, scale=False)
        _witness_args(q)
        if name == "check":
            q.add_argument("--j-min", type=int, default=-20)
            q.add_argument("--j-max", type=int, default=20)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("experiment", help="orbit statistics")
    es = p.add_subparsers(dest="action", required=True)
    q = es.add_parser("hopf", parents=[common])
    _family_args(q)
    q.add_argument("--m", type=int, default=1)
    q.add_argument("--steps", type=int, default=1000)
    q.add_argument("--point", default=None, help="start tuple (default: random box of D_n, see --start-depth)")
    q.add_argument("--start-depth", type=int, default=4)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--format", choices=("json", "csv"), default="json")
    q = es.add_parser("counts", parents=[common])
    _family_args(q)
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--point", default=None)
    q.add_argument("--start-depth", type=int, default=4)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--window", type=int, default=None)
    q = es.add_parser("support", parents=[common])
    _family_args(q)
    q.add_argument("--point", default=None, help="start tuple (default: the family's witness)")
    q.add_argument("--witness-depth", type=int, default=6)
    q.add_argument("--window", type=int, default=1814)
    q.add_argument("--depths", default="2,3,4")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("render", help="SVG figures")
    rs = p.add_subparsers(dest="figure", required=True)
    q = rs.add_parser("figure1", parents=[common])
    q.add_argument("--step", type=int, default=2)
    rs.add_parser("figure2", parents=[common])
    p.set_defaults(func=cmd_render)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        base = default_geometry()
        args.geometry = base if args.max_depth is None else TowerGeometry(args.max_depth, base.backend)
        if args.command == "measure" and args.action == "eval" and not (args.family or args.product):
            raise UsageError("measure eval needs --family or --product")
        return args.func(args)
    except (UsageError, ValueError, KeyError, ChaconError, OSError) as exc:
        print(f"chacon-lab: error: {exc}", file=sys.stderr)
        return 2
    except AssertionError as exc:
        print(f"chacon-lab: verification failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
