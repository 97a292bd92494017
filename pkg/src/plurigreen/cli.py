"""Command line interface: ``plurigreen <subcommand> ...``.

Exit codes: 0 ok, 2 input error, 3 soundness violation, 4 infeasible bounds.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, replace

import numpy as np

from . import compactify as cp
from .bounds import caratheodory_bound, green_interval
from .config import SEED_ENV, RunConfig, SearchBudget, default_seed, load_config
from .disks import kobayashi_bound
from .geometry import MobiusMap, ProductMap
from .hyperconvex import classify_pole, continuity_scan, exhaustion_check, ratio_test
from .intervals import InfeasibleError, SoundnessError, encode_real
from .io import BUILTIN, InputError, dumps, encode_point, load_domain, load_path, load_sequences, parse_complex, parse_point, rows_to_csv
from .metrics import HermitianMetric, azukawa, royden, samples_to_csv, sigma_estimates
from .suites import SUITES, run_suite

EXIT_OK, EXIT_INPUT, EXIT_SOUNDNESS, EXIT_INFEASIBLE = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def _common(p: argparse.ArgumentParser, domain: bool = True) -> None:
    if domain:
        p.add_argument("--domain", default="ball2", help="builtin name (%s) or JSON file" % ", ".join(BUILTIN))
    p.add_argument("--seed", type=int, default=None, help=f"RNG seed (default: ${SEED_ENV} or built-in)")
    p.add_argument("--config", help="JSON file overriding run configuration")
    p.add_argument("--format", choices=("json", "csv"), default=None)
    p.add_argument("--output", "-o", help="write the primary output here instead of stdout")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--degree", type=int, default=None)
    p.add_argument("--no-disks", action="store_true", help="skip the analytic disk search")


def build_config(args) -> RunConfig:
    cfg = RunConfig(seed=default_seed())
    if getattr(args, "config", None):
        try:
            cfg = load_config(args.config, cfg)
        except (OSError, json.JSONDecodeError, TypeError, ValueError) as exc:
            raise InputError(f"bad config file: {exc}") from exc
    over = {}
    if args.seed is not None:
        over["seed"] = args.seed
    if args.format is not None:
        over["format"] = args.format
    if args.output is not None:
        over["output"] = args.output
    if args.workers is not None:
        over["workers"] = args.workers
    budget = cfg.budget
    if args.restarts is not None:
        budget = replace(budget, restarts=args.restarts)
    if args.degree is not None:
        budget = replace(budget, degree=args.degree)
    if getattr(args, "no_disks", False):
        budget = replace(budget, disk_search=False)
    try:
        return replace(cfg, budget=budget, **over)
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def _emit(text: str, cfg: RunConfig) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _point(text, domain):
    p = parse_point(text)
    if p.size != domain.dim:
        raise InputError(f"point {text!r} has {p.size} coordinates, domain has {domain.dim}")
    return p


def _inside(domain, *pts):
    for p in pts:
        if domain.margin(p) <= 0:
            raise InputError(f"point {np.round(p, 12).tolist()} lies outside the domain")


def _interval_record(kind, iv, z, w) -> dict:
    rec = iv.to_json()
    rec.update({"quantity": kind, "z": encode_point(z), "w": encode_point(w)})
    return rec


# -- subcommands ------------------------------------------------------------


def cmd_green(args, cfg):
    D = load_domain(args.domain)
    z, w = _point(args.z, D), _point(args.w, D)
    _inside(D, z, w)
    iv = green_interval(D, z, w, cfg, disks=cfg.budget.disk_search)
    _emit(dumps(_interval_record("green", iv, z, w)), cfg)


def cmd_kobayashi(args, cfg):
    D = load_domain(args.domain)
    z, w = _point(args.z, D), _point(args.w, D)
    _inside(D, z, w)
    iv = kobayashi_bound(D, z, w, cfg.budget, cfg.seed)
    _emit(dumps(_interval_record("kobayashi", iv, z, w)), cfg)


def cmd_caratheodory(args, cfg):
    D = load_domain(args.domain)
    z, w = _point(args.z, D), _point(args.w, D)
    _inside(D, z, w)
    iv = caratheodory_bound(D, z, w, cfg)
    _emit(dumps(_interval_record("caratheodory", iv, z, w)), cfg)


def cmd_azukawa(args, cfg):
    D = load_domain(args.domain)
    w, v = _point(args.w, D), _point(args.v, D)
    _inside(D, w)
    a = azukawa(D, w, v, cfg)
    rec = {
        "quantity": "azukawa",
        "w": encode_point(w),
        "v": encode_point(v),
        "lo": encode_real(a.lo),
        "hi": encode_real(a.hi),
        "intercept": encode_real(a.intercept),
        "provenance": a.provenance,
        "radii": list(a.radii),
    }
    _emit(dumps(rec), cfg)


def cmd_royden(args, cfg):
    D = load_domain(args.domain)
    w, v = _point(args.w, D), _point(args.v, D)
    _inside(D, w)
    iv = royden(D, w, v, cfg)
    rec = iv.to_json()
    rec.update({"quantity": "royden", "w": encode_point(w), "v": encode_point(v)})
    _emit(dumps(rec), cfg)


def cmd_sigma(args, cfg):
    D = load_domain(args.domain)
    w = _point(args.w, D)
    _inside(D, w)
    H = HermitianMetric(args.metric, D.dim if args.metric != "euclidean" else None)
    est = sigma_estimates(D, w, H, cfg, with_royden=args.royden)
    if cfg.format == "csv":
        _emit(samples_to_csv(est.samples), cfg)
        return
    rec = {
        "quantity": "sigma",
        "w": encode_point(w),
        "metric": args.metric,
        "sigma_i": [encode_real(x) for x in est.sigma_i],
        "sigma_s": [encode_real(x) for x in est.sigma_s],
        "directions": est.directions,
        "provenance": "estimate",
        "caveat": est.caveat,
    }
    _emit(dumps(rec), cfg)


def cmd_classify_pole(args, cfg):
    D = load_domain(args.domain)
    w = _point(args.w, D)
    _inside(D, w)
    fit = classify_pole(D, w, cfg)
    _emit(dumps(fit.to_json()), cfg)


def cmd_ratio_test(args, cfg):
    D = load_domain(args.domain)
    w0 = _point(args.w0, D)
    _inside(D, w0)
    eps = cfg.eps if args.eps is None else args.eps
    r = ratio_test(D, w0, args.excluded, cfg, eps=eps)
    _emit(dumps({"delta": r.delta, "deviation": r.deviation, "eps": r.eps, "excluded_radius": r.excluded_radius, "table": r.table, "provenance": "estimate"}), cfg)


def cmd_exhaustion(args, cfg):
    D = load_domain(args.domain)
    w = _point(args.w, D)
    _inside(D, w)
    levels = [float(x) for x in args.levels.split(",")]
    if any(not a < 0 for a in levels):
        raise InputError("levels must be negative")
    rep = exhaustion_check(D, w, levels, cfg)
    rec = {
        "levels": [{"level": l.level, "margin_hi": l.margin_hi, "margin_lo": l.margin_lo} for l in rep.levels],
        "b": rep.b,
        "b_violations": rep.b_violations,
        "b_min_slack": rep.b_min_slack,
        "all_positive": rep.all_positive,
    }
    _emit(dumps(rec), cfg)


def cmd_continuity_scan(args, cfg):
    D = load_domain(args.domain)
    pairs, limit = load_path(args.path)
    for z, w in pairs + [limit]:
        if z.size != D.dim or w.size != D.dim:
            raise InputError("path points do not match the domain dimension")
        _inside(D, z, w)
    rep = continuity_scan(D, pairs, limit, cfg)
    _emit(dumps(rep.to_json()), cfg)


def cmd_compactify(args, cfg):
    D = load_domain(args.domain)
    V = cp.norming_form(D, args.resolution)
    if args.sequences:
        seqs = load_sequences(args.sequences)
    else:
        angles = [float(a) for a in args.angles.split(",")]
        seqs = [{"tag": f"angle={a:g}", "points": cp.radial_sequence(a, args.depth, D.dim), "angle": a} for a in angles]
    traces = []
    tails = []
    for s in seqs:
        angle = s.get("angle") if V.kind == "disk" else None
        rep = cp.boundary_trace(D, s["points"], V, angle)
        traces.append({"tag": s["tag"], **rep.to_json()})
        tails.append(cp.phi_V(D, s["points"][-1], V))
    Dm = cp.distance_matrix(tails)
    out = {
        "domain": D.to_dict(),
        "resolution": args.resolution,
        "mass": V.mass,
        "norming_constants": V.constants,
        "c_V": {s["tag"]: cp.c_V(D, s["points"][-1]) for s in seqs},
        "traces": traces,
        "tail_distances": Dm,
        "partitions": {str(e): cp.clusters(Dm, e) for e in cp.EPS_SCHEDULE},
    }
    if args.mobius is not None:
        a = parse_complex(args.mobius)
        F = MobiusMap(D, 0, a) if D.dim == 1 else ProductMap(D, (a, a))
        pts = [p for s in seqs for p in s["points"][len(s["points"]) // 2 :]]
        out["invariance"] = cp.invariance_test(D, F, pts, V).to_json()
    if args.matrix:
        with open(args.matrix, "w") as fh:
            fh.write(rows_to_csv([s["tag"] for s in seqs], [list(r) for r in Dm]))
    _emit(dumps(out), cfg)


def cmd_scan(args, cfg):
    D = load_domain(args.domain)
    w = _point(args.w, D)
    _inside(D, w)
    base = np.zeros(D.dim, dtype=complex) if args.base is None else _point(args.base, D)
    xs = np.linspace(args.xmin, args.xmax, args.nx) if args.nx > 0 else np.zeros(0)
    ys = np.linspace(args.ymin, args.ymax, args.ny) if args.ny > 0 else np.zeros(0)
    header = ["x", "y", "status", "lo", "hi", "lo_provenance", "hi_provenance"]
    rows = []
    for y in ys:
        for x in xs:
            z = base.copy()
            z[args.coord] = complex(x, y)
            if D.margin(z) <= 0:
                rows.append([float(x), float(y), "outside", "", "", "", ""])
                continue
            iv = green_interval(D, z, w, cfg, disks=cfg.budget.disk_search)
            status = "pole" if np.array_equal(z, w) else "ok"
            rows.append([float(x), float(y), status, encode_real(iv.lo), encode_real(iv.hi), iv.lo_tag, iv.hi_tag])
    _emit(rows_to_csv(header, rows), cfg)


def cmd_verify(args, cfg):
    names = list(SUITES) if args.suite == "all" else [args.suite]
    for n in names:
        if n not in SUITES:
            raise InputError(f"unknown suite {n!r}; choose from {', '.join(SUITES)} or all")
    results = [run_suite(n, cfg) for n in names]
    summary = {"seed": cfg.seed, "passed": all(r["passed"] for r in results), "suites": results}
    _emit(dumps(summary), cfg)
    return EXIT_OK if summary["passed"] else 1


def cmd_describe(args, cfg):
    out = {
        "config": asdict(cfg),
        "defaults": {"config": asdict(RunConfig()), "budget": asdict(SearchBudget())},
        "seed_env": SEED_ENV,
        "builtin_domains": {k: v().to_dict() for k, v in BUILTIN.items()},
        "suites": list(SUITES),
        "exit_codes": {"ok": 0, "input error": 2, "soundness violation": 3, "infeasible": 4},
        "complex_format": "re+imi, comma separated coordinates, e.g. 0.5+0.1i,0",
    }
    _emit(dumps(out), cfg)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="plurigreen", description="Certified bounds for pluricomplex Green functions and related invariants.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, fn, helptext in (
        ("green", cmd_green, "interval for g(z, w)"),
        ("kobayashi", cmd_kobayashi, "upper bound for the Kobayashi function"),
        ("caratheodory", cmd_caratheodory, "lower bound for the Caratheodory function"),
    ):
        s = sub.add_parser(name, help=helptext)
        _common(s)
        s.add_argument("--z", required=True)
        s.add_argument("--w", required=True)
        s.set_defaults(func=fn)

    for name, fn in (("azukawa", cmd_azukawa), ("royden", cmd_royden)):
        s = sub.add_parser(name, help=f"{name} function at (w, v)")
        _common(s)
        s.add_argument("--w", required=True)
        s.add_argument("--v", required=True)
        s.set_defaults(func=fn)

    s = sub.add_parser("sigma", help="directional capacities sigma_i, sigma_s")
    _common(s)
    s.add_argument("--w", required=True)
    s.add_argument("--metric", choices=("euclidean", "bergman_ball", "bergman_polydisk"), default="euclidean")
    s.add_argument("--royden", action="store_true", help="also record Royden upper bounds per direction")
    s.set_defaults(func=cmd_sigma)

    s = sub.add_parser("classify-pole", help="strict pole classification at w")
    _common(s)
    s.add_argument("--w", required=True)
    s.set_defaults(func=cmd_classify_pole)

    s = sub.add_parser("ratio-test", help="ratio g(z, w0)/g(z, w) near w0")
    _common(s)
    s.add_argument("--w0", required=True)
    s.add_argument("--excluded", type=float, default=0.3)
    s.add_argument("--eps", type=float, default=None)
    s.set_defaults(func=cmd_ratio_test)

    s = sub.add_parser("exhaustion", help="boundary clearance of sublevel sets of g(., w)")
    _common(s)
    s.add_argument("--w", required=True)
    s.add_argument("--levels", default="-1")
    s.set_defaults(func=cmd_exhaustion)

    s = sub.add_parser("continuity-scan", help="intervals along a path of (z, w) pairs")
    _common(s)
    s.add_argument("--path", required=True, help='JSON {"path": [[z, w], ...], "limit": [z0, w0]}')
    s.set_defaults(func=cmd_continuity_scan)

    s = sub.add_parser("compactify", help="normalized Green embeddings of boundary sequences")
    _common(s)
    s.set_defaults(domain="disk")
    s.add_argument("--resolution", type=int, default=128)
    s.add_argument("--sequences", help="JSON sequence file")
    s.add_argument("--angles", default="0,1.5707963267948966,3.141592653589793")
    s.add_argument("--depth", type=int, default=10)
    s.add_argument("--mobius", default=None, help="also run the invariance test under this Moebius parameter")
    s.add_argument("--matrix", help="write the tail distance matrix as CSV")
    s.set_defaults(func=cmd_compactify)

    s = sub.add_parser("scan", help="CSV of intervals over a grid in one coordinate plane")
    _common(s)
    s.set_defaults(format="csv")
    s.add_argument("--w", required=True)
    s.add_argument("--coord", type=int, default=0)
    s.add_argument("--base", default=None, help="values of the other coordinates")
    s.add_argument("--xmin", type=float, default=-1.0)
    s.add_argument("--xmax", type=float, default=1.0)
    s.add_argument("--ymin", type=float, default=-1.0)
    s.add_argument("--ymax", type=float, default=1.0)
    s.add_argument("--nx", type=int, default=33)
    s.add_argument("--ny", type=int, default=33)
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("verify", help="run a verification suite")
    _common(s, domain=False)
    s.add_argument("suite", help=f"one of {', '.join(SUITES)}, or all")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("describe", help="print defaults and builtin domains")
    _common(s, domain=False)
    s.set_defaults(func=cmd_describe)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = build_config(args)
        if getattr(args, "coord", 0) not in (0, 1):
            raise InputError("--coord must be 0 or 1")
        code = args.func(args, cfg)
        return EXIT_OK if code is None else code
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SoundnessError as exc:
        print(f"soundness violation: {exc}", file=sys.stderr)
        return EXIT_SOUNDNESS
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, KeyError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
