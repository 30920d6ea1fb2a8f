"""Command-line front end.

Subcommands: whitney, seminorm, bbm-sweep, poincare, ahlfors, content,
extend-check, dichotomy, report.  Exit codes: 0 = all verdicts as expected,
2 = a verdict mismatched its expectation, 1 = error (bad config, unknown
domain/function, resolution failure, IO).
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Optional

from .domains import DomainError, get_domain
from .experiments import (ConfigError, ExperimentConfig, ExperimentReport,
                          emit_csv, emit_svg, run)
from .functions import get_function
from .grid import ResolutionError, sample
from .seminorm import ParameterError, gagliardo
from .whitney import (check_coverage, check_disjoint, check_distance_window,
                      check_pinch_5q, overlap_bound, partition_of_unity,
                      reflect_centers, whitney_cover)

KIND_COMMANDS = {"bbm-sweep": "bbm-sweep", "poincare": "poincare",
                 "ahlfors": "ahlfors", "content": "content-trend",
                 "extend-check": "extend-check", "dichotomy": "dichotomy"}


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--domain", default="disk", help="catalog domain name")
    sp.add_argument("--fn", action="append", default=None,
                    help="function name (repeatable)")
    sp.add_argument("--p", type=float, action="append", default=None,
                    help="integrability exponent (repeatable)")
    sp.add_argument("--q", type=float, default=None,
                    help="inner exponent for the Poincare inequality")
    sp.add_argument("--s", type=float, action="append", default=None,
                    help="smoothness exponent in (0,1) (repeatable)")
    sp.add_argument("--h", type=float, default=2.0 ** -5,
                    help="grid spacing")
    sp.add_argument("--seed", type=int, default=0, help="RNG seed")
    sp.add_argument("--out", default=None, help="output directory")
    sp.add_argument("--budget", type=int, default=16384,
                    help="Monte Carlo sample budget per ball")
    sp.add_argument("--workers", type=int, default=1,
                    help="quadrature worker threads")
    sp.add_argument("--c", type=float, default=None,
                    help="regularity threshold (ahlfors)")
    sp.add_argument("--expect", choices=("pass", "fail"), default=None,
                    help="expected ahlfors verdict")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fracdom",
        description="fractional-smoothness toolkit on rough planar domains")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("whitney", "seminorm", "bbm-sweep", "poincare", "ahlfors",
                 "content", "extend-check", "dichotomy", "report"):
        sp = sub.add_parser(name)
        _add_common(sp)
        if name == "report":
            sp.add_argument("path", nargs="?", default=None,
                            help="report JSON (default <out>/report.json)")
        if name == "dichotomy":
            sp.add_argument("--rows", action="append", default=None,
                            help="subset of dichotomy rows (repeatable)")
    return ap


def _outdir(args) -> Optional[str]:
    if args.out is None:
        return None
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _emit(report: ExperimentReport, out: Optional[str]) -> None:
    if out is None:
        return
    report.to_json(os.path.join(out, "report.json"))
    emit_csv(report, os.path.join(out, "report.csv"))
    emit_svg(report, os.path.join(out, "report.svg"))


def _cmd_whitney(args) -> int:
    dom = get_domain(args.domain)
    max_level = max(2, round(-math.log2(args.h)) + 3)
    cover = whitney_cover(dom, max_level=max_level)
    reflect_centers(cover, dom)
    pou = partition_of_unity(cover)
    summary = {
        "domain": args.domain, "cubes": len(cover),
        "unresolved": len(cover.unresolved),
        "unresolved_volume": cover.unresolved_volume,
        "disjoint": check_disjoint(cover),
        "distance_window": check_distance_window(cover, dom),
        "pinch_5q": check_pinch_5q(cover, dom),
        "coverage": check_coverage(cover, dom),
        "overlap_bound": overlap_bound(cover),
    }
    out = _outdir(args)
    if out is not None:
        with open(os.path.join(out, f"whitney_{dom.name}.json"), "w") as fh:
            fh.write(cover.to_json())
        with open(os.path.join(out, "whitney_summary.json"), "w") as fh:
            fh.write(json.dumps(summary, sort_keys=True, indent=1,
                                default=float) + "\n")
    ok = (summary["disjoint"] and summary["distance_window"]["pass"]
          and summary["coverage"]["pass"])
    print(f"whitney {dom.name}: cubes={len(cover)} "
          f"unresolved={len(cover.unresolved)} "
          f"overlap<={summary['overlap_bound']} "
          f"construction={'ok' if ok else 'MISMATCH'}")
    return 0 if ok else 2


def _cmd_seminorm(args) -> int:
    dom = get_domain(args.domain)
    fn = (args.fn or ["x1"])[0]
    p = (args.p or [2.0])[0]
    s = (args.s or [0.5])[0]
    gf = sample(dom, get_function(fn), args.h)
    est = gagliardo(gf, s, p, workers=args.workers)
    doc = {"domain": args.domain, "function": fn, "p": p, "s": s,
           "h": args.h, "value": est.value, "err_est": est.err_est,
           "excluded_volume": est.excluded_volume,
           "panels": est.panels_used}
    out = _outdir(args)
    if out is not None:
        with open(os.path.join(out, "seminorm.json"), "w") as fh:
            fh.write(json.dumps(doc, sort_keys=True, indent=1) + "\n")
    print(f"gagliardo[{fn}, {dom.name}, s={s:g}, p={p:g}] = "
          f"{est.value:.6g} +- {est.err_est:.2g}")
    return 0


def _config_from_args(args, kind: str) -> ExperimentConfig:
    kw = dict(kind=kind, domain=args.domain, h=args.h, seed=args.seed,
              budget=args.budget, workers=args.workers, out=args.out,
              q=args.q, expect=args.expect)
    if args.fn:
        kw["functions"] = tuple(args.fn)
    if args.p:
        kw["p_values"] = tuple(args.p)
    if args.s:
        kw["s_values"] = tuple(args.s)
    if args.c is not None:
        kw["c"] = args.c
    if kind == "dichotomy" and getattr(args, "rows", None):
        kw["rows"] = tuple(args.rows)
    if kind == "content-trend" and not args.s:
        kw["s_values"] = (0.8,)
    if kind == "extend-check" and not args.s:
        kw["s_values"] = (0.8, 0.9, 0.95)
    if kind == "bbm-sweep" and not args.s:
        kw["s_values"] = (0.8, 0.9, 0.95)
    return ExperimentConfig(**kw).validate()


def _summarize(report: ExperimentReport) -> None:
    for rec in report.records:
        verdict = rec.get("verdict", "done")
        exp = rec.get("expected")
        tag = rec.get("domain", report.config.get("domain", ""))
        fn = rec.get("function", "")
        margin = rec.get("margin")
        msg = f"{report.kind} {tag} {fn}".strip()
        msg += f": {verdict}"
        if margin is not None:
            msg += f" (margin {margin:+.3g})"
        if exp is not None and exp != verdict:
            msg += f" [expected {exp}]"
        print(msg)


def _cmd_experiment(args, kind: str) -> int:
    cfg = _config_from_args(args, kind)
    report = run(cfg)
    _emit(report, _outdir(args))
    _summarize(report)
    return 0 if report.all_expected() else 2


def _cmd_report(args) -> int:
    path = args.path
    if path is None:
        if args.out is None:
            raise ConfigError("field 'out': report needs a path or --out")
        path = os.path.join(args.out, "report.json")
    report = ExperimentReport.from_json(path)
    base = os.path.dirname(os.path.abspath(path))
    emit_csv(report, os.path.join(base, "report.csv"))
    emit_svg(report, os.path.join(base, "report.svg"))
    _summarize(report)
    return 0 if report.all_expected() else 2


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "whitney":
            return _cmd_whitney(args)
        if args.command == "seminorm":
            return _cmd_seminorm(args)
        if args.command == "report":
            return _cmd_report(args)
        return _cmd_experiment(args, KIND_COMMANDS[args.command])
    except (ConfigError, DomainError, ParameterError, ResolutionError,
            ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
