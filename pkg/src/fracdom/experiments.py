"""Config-driven experiment runner: BBM sweeps, Poincare checks, Ahlfors
classification, extension-bound stability, boundary-content trends, and the
four-row characterization dichotomy table.

Configs are flat JSON dicts; reports serialize deterministically (sorted
keys, wall time excluded from the bytes), so a fixed config and seed yield
byte-identical CSV/JSON/SVG artifacts across runs and thread counts.
"""
from __future__ import annotations

import dataclasses
import json
import math
import os
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .domains import DomainError, get_domain
from .functions import get_function
from .grid import sample
from .measure import ahlfors_check, boundary_hypothesis_check
from .norms import (bbm_constant, bbm_sweep, hajlasz_bbm_bound,
                    poincare_check, scaled_energy_direct)
from .seminorm import w1p_seminorm
from .extension import fractional_bound_check
from .svg import line_chart

__all__ = ["ExperimentConfig", "ExperimentReport", "ConfigError", "KINDS",
           "load_config", "run", "dichotomy_table", "emit_csv", "emit_svg",
           "poincare_check"]

KINDS = ("bbm-sweep", "poincare", "ahlfors", "extend-check", "dichotomy",
         "content-trend")

# s grids for the dichotomy columns: the growth witness needs every point
# inside the grid-resolvable regime 1/(1-s) < p*log(1/h); the extension
# stability column matches the operator-bound sweep
DICHOTOMY_S_BBM = (0.7, 0.8, 0.9)
DICHOTOMY_S_EXT = (0.8, 0.9, 0.95)
DICHOTOMY_WITNESSES = ("cusppow:0.6", "cusppow:0.7", "cusppow:0.8")
DICHOTOMY_ROWS = ("disk", "cusp-interior:2", "cusp-exterior:2", "slit-disk")
STABLE_SPREAD = 2.0         # extension ratios may vary by < this factor
FLOAT_TOL = 1e-9            # relative roundoff floor for exact-sum margins


class ConfigError(ValueError):
    """Invalid experiment configuration; message names the field."""


@dataclass
class ExperimentConfig:
    kind: str
    domain: str = "disk"
    functions: Tuple[str, ...] = ("x1",)
    p_values: Tuple[float, ...] = (2.0,)
    q: Optional[float] = None
    s_values: Tuple[float, ...] = (0.5, 0.75, 0.9)
    h: float = 2.0 ** -5
    budget: int = 16384
    seed: int = 0
    out: Optional[str] = None
    workers: int = 1
    c: float = 1.0                    # ahlfors regularity threshold
    expect: Optional[str] = None      # ahlfors: "pass" | "fail"
    rows: Tuple[str, ...] = ()        # dichotomy: subset of DICHOTOMY_ROWS

    def validate(self) -> "ExperimentConfig":
        if self.kind not in KINDS:
            raise ConfigError(f"field 'kind': unknown experiment {self.kind!r}"
                              f" (choose from {', '.join(KINDS)})")
        if not self.h > 0:
            raise ConfigError(f"field 'h': grid spacing must be > 0, got {self.h}")
        for s in self.s_values:
            if not 0.0 < s < 1.0:
                raise ConfigError(f"field 's': values must lie in (0,1), got {s}")
        for p in self.p_values:
            if p < 1.0:
                raise ConfigError(f"field 'p': values must be >= 1, got {p}")
        if self.q is not None and self.q < 1.0:
            raise ConfigError(f"field 'q': must be >= 1, got {self.q}")
        if self.budget < 16:
            raise ConfigError(f"field 'budget': must be >= 16, got {self.budget}")
        if self.workers < 1:
            raise ConfigError(f"field 'workers': must be >= 1, got {self.workers}")
        if self.expect not in (None, "pass", "fail"):
            raise ConfigError(f"field 'expect': must be pass or fail, got {self.expect!r}")
        try:
            get_domain(self.domain)
        except DomainError as exc:
            raise ConfigError(f"field 'domain': {exc}") from exc
        for fn in self.functions:
            try:
                get_function(fn)
            except ValueError as exc:
                raise ConfigError(f"field 'functions': {exc}") from exc
        for row in self.rows:
            if row not in DICHOTOMY_ROWS:
                raise ConfigError(f"field 'rows': unknown dichotomy row {row!r}")
        return self

    def to_dict(self) -> dict:
        # Execution details (parallelism, output paths) do not change the
        # mathematics, so they are left out of the report's config echo to
        # keep report bytes identical across worker counts and destinations.
        d = dataclasses.asdict(self)
        return {k: (list(v) if isinstance(v, tuple) else v)
                for k, v in d.items() if k not in ("workers", "out")}


_KEY_ALIASES = {"fn": "functions", "function": "functions", "p": "p_values",
                "s": "s_values", "domains": "rows"}
_TUPLE_FIELDS = {"functions": str, "p_values": float, "s_values": float,
                 "rows": str}


def load_config(source) -> ExperimentConfig:
    """Build a config from a JSON file path, JSON text, or a dict."""
    if isinstance(source, dict):
        raw = dict(source)
    else:
        text = source
        if isinstance(source, (str, os.PathLike)) and os.path.exists(source):
            with open(source) as fh:
                text = fh.read()
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"config is not valid JSON (line {exc.lineno}, column "
                f"{exc.colno}): {exc.msg}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config must be a flat JSON object")
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    kw = {}
    for key, val in raw.items():
        name = _KEY_ALIASES.get(key, key)
        if name not in known:
            raise ConfigError(f"field {key!r}: not a config field")
        if name in _TUPLE_FIELDS:
            conv = _TUPLE_FIELDS[name]
            items = val if isinstance(val, (list, tuple)) else [val]
            try:
                val = tuple(conv(v) for v in items)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"field {key!r}: {exc}") from exc
        kw[name] = val
    if "kind" not in kw:
        raise ConfigError("field 'kind': missing")
    try:
        cfg = ExperimentConfig(**kw)
    except TypeError as exc:
        raise ConfigError(f"config rejected: {exc}") from exc
    return cfg.validate()


def _jsonable(obj):
    """Coerce numpy scalars that slip into records to plain Python types."""
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    raise TypeError(f"Object of type {type(obj).__name__} "
                    f"is not JSON serializable")


@dataclass
class ExperimentReport:
    kind: str
    config: dict
    records: list
    version: str = __version__
    wall_time: float = 0.0            # informational; not serialized

    def to_json(self, path=None) -> str:
        payload = {"kind": self.kind, "config": self.config,
                   "records": self.records, "version": self.version}
        text = json.dumps(payload, sort_keys=True, indent=1,
                          default=_jsonable) + "\n"
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_json(cls, source) -> "ExperimentReport":
        text = source
        if isinstance(source, (str, os.PathLike)) and os.path.exists(source):
            with open(source) as fh:
                text = fh.read()
        doc = json.loads(text)
        return cls(doc["kind"], doc["config"], doc["records"],
                   doc.get("version", "?"))

    def all_expected(self) -> bool:
        """True when every record's verdict matches its stated expectation."""
        for rec in self.records:
            exp = rec.get("expected")
            if exp is not None and rec.get("verdict") != exp:
                return False
        return True


# ----------------------------------------------------------------------
# runners
# ----------------------------------------------------------------------

def _run_bbm(cfg: ExperimentConfig) -> list:
    dom = get_domain(cfg.domain)
    records = []
    for fn in cfg.functions:
        gf = sample(dom, get_function(fn), cfg.h)
        for p in cfg.p_values:
            sw = bbm_sweep(gf, p, cfg.s_values, workers=cfg.workers, label=fn)
            margins = [sw.scaled[i + 1] - sw.scaled[i]
                       - (sw.eval_errs[i + 1] + sw.eval_errs[i])
                       for i in range(len(sw.scaled) - 1)]
            records.append({
                "domain": cfg.domain, "function": fn, "p": p,
                "s_values": list(sw.s_values), "scaled": list(sw.scaled),
                "errs": list(sw.errs), "eval_errs": list(sw.eval_errs),
                "reference": sw.reference, "reference_err": sw.reference_err,
                "max_ratio": sw.max_ratio,
                "verdict": "growing" if sw.monotone_growth else "not-growing",
                "margin": min(margins) if margins else 0.0,
            })
    return records


def _run_poincare(cfg: ExperimentConfig) -> list:
    dom = get_domain(cfg.domain)
    records = []
    for fn in cfg.functions:
        for p in cfg.p_values:
            q = cfg.q if cfg.q is not None else p
            for s in cfg.s_values:
                rec = poincare_check(dom, fn, p, q, s, h=cfg.h,
                                     workers=cfg.workers)
                d = dataclasses.asdict(rec)
                d["ball_center"] = (list(rec.ball_center)
                                    if rec.ball_center else None)
                d["verdict"] = "holds" if rec.holds else "fails"
                d["expected"] = "holds"
                records.append(d)
    return records


def _run_ahlfors(cfg: ExperimentConfig) -> list:
    dom = get_domain(cfg.domain)
    rep = ahlfors_check(dom, c=cfg.c, budget=cfg.budget, seed=cfg.seed)
    return [{
        "domain": cfg.domain, "c": cfg.c, "inf_ratio": rep.inf_ratio,
        "r_decades": list(rep.r_decades),
        "witness_x": list(rep.witness_x) if rep.witness_x else None,
        "witness_r": rep.witness_r,
        "witness_trend": list(rep.witness_trend),
        "verdict": rep.verdict,
        "margin": rep.inf_ratio - cfg.c,
        "expected": cfg.expect or "pass",
        "samples": rep.ratios,
    }]


def _run_extend(cfg: ExperimentConfig) -> list:
    dom = get_domain(cfg.domain)
    records = []
    for fn in cfg.functions:
        gf = sample(dom, get_function(fn), cfg.h)
        for p in cfg.p_values:
            cases = []
            for s in cfg.s_values:
                br = fractional_bound_check(gf, s, p, workers=cfg.workers)
                cases.append({"s": s, "lhs": br.lhs, "rhs": br.rhs,
                              "ratio": br.ratio, "lhs_err": br.lhs_err,
                              "rhs_err": br.rhs_err})
            ratios = [c["ratio"] for c in cases]
            finite = [r for r in ratios if math.isfinite(r) and r > 0]
            spread = (max(finite) / min(finite)) if finite else 1.0
            records.append({
                "domain": cfg.domain, "function": fn, "p": p,
                "cases": cases, "spread": spread,
                "verdict": "stable" if spread < STABLE_SPREAD else "unstable",
                "margin": STABLE_SPREAD - spread,
                "expected": "stable",
            })
    return records


def _run_content(cfg: ExperimentConfig) -> list:
    dom = get_domain(cfg.domain)
    records = []
    for p in cfg.p_values:
        for s in cfg.s_values:
            if s * p <= 1.0:
                continue
            tr = boundary_hypothesis_check(dom, s, p)
            records.append({
                "domain": cfg.domain, "s": s, "p": p, "lam": tr.lam,
                "deltas": list(tr.deltas), "values": list(tr.values),
                "slope": tr.slope, "expected_slope": tr.expected_slope,
                "verdict": ("consistent" if tr.consistent_with_zero
                            else "inconsistent"),
                "margin": tr.slope - 0.5 * tr.expected_slope,
                "expected": "consistent",
            })
    if not records:
        raise ConfigError("field 's': content-trend needs some s*p > 1")
    return records


# ----------------------------------------------------------------------
# dichotomy table
# ----------------------------------------------------------------------

def _growth_witness(dom, p: float, h: float) -> dict:
    """Best growth witness among the cusp-concentrated profiles: the exact
    discrete scaled energies must increase strictly across the s grid."""
    best = None
    for name in DICHOTOMY_WITNESSES:
        gf = sample(dom, get_function(name), h)
        vals = scaled_energy_direct(gf, p, DICHOTOMY_S_BBM)
        ref = w1p_seminorm(gf, p)
        reference = bbm_constant(gf.dim, p) * ref.value ** p
        tol = FLOAT_TOL * max(abs(v) for v in vals)
        margins = [vals[i + 1] - vals[i] - tol for i in range(len(vals) - 1)]
        cand = {"function": name, "s_values": list(DICHOTOMY_S_BBM),
                "scaled": list(vals), "margin": min(margins),
                "last_ratio": vals[-1] / reference if reference > 0 else math.inf,
                "growing": all(m > 0 for m in margins)}
        if best is None or (cand["growing"], cand["margin"]) > (
                best["growing"], best["margin"]):
            best = cand
    return best


def _bounded_check(dom, fn: str, p: float, h: float, workers: int) -> dict:
    """Certified sub-cap check: exact scaled energies stay below the BBM
    reference K(n,p)*|f|^p_{W^{1,p}} with margin beyond the reference error."""
    gf = sample(dom, get_function(fn), h)
    vals = scaled_energy_direct(gf, p, DICHOTOMY_S_BBM)
    ref = w1p_seminorm(gf, p)
    reference = bbm_constant(gf.dim, p) * ref.value ** p
    ref_err = bbm_constant(gf.dim, p) * ((ref.value + ref.err_est) ** p
                                         - ref.value ** p)
    ratio = max(vals) / reference if reference > 0 else math.inf
    margin = 1.0 - ratio - ref_err / reference if reference > 0 else -math.inf
    return {"function": fn, "s_values": list(DICHOTOMY_S_BBM),
            "scaled": list(vals), "reference": reference,
            "reference_err": ref_err, "max_ratio": ratio, "margin": margin,
            "bounded": margin > 0}


def _extension_stability(dom, fn: str, p: float, h: float,
                         workers: int) -> dict:
    gf = sample(dom, get_function(fn), h)
    cases = []
    for s in DICHOTOMY_S_EXT:
        br = fractional_bound_check(gf, s, p, workers=workers)
        cases.append({"s": s, "ratio": br.ratio, "lhs": br.lhs, "rhs": br.rhs})
    ratios = [c["ratio"] for c in cases]
    spread = max(ratios) / min(ratios) if min(ratios) > 0 else math.inf
    return {"function": fn, "cases": cases, "spread": spread,
            "margin": STABLE_SPREAD - spread,
            "stable": spread < STABLE_SPREAD}


def dichotomy_table(cfg: ExperimentConfig) -> ExperimentReport:
    """Four catalog rows pairing the measure-density verdict with the BBM
    and extension-bound behavior the characterization predicts for them."""
    cfg.validate()
    t0 = time.perf_counter()
    rows = cfg.rows or DICHOTOMY_ROWS
    records = []
    for name in rows:
        dom = get_domain(name)
        row: dict = {"domain": name}
        c_thresh = 1.0 if name == "disk" else 0.7
        rep = ahlfors_check(dom, c=c_thresh, budget=cfg.budget, seed=cfg.seed)
        row["ahlfors"] = {
            "c": c_thresh, "inf_ratio": rep.inf_ratio, "verdict": rep.verdict,
            "witness_x": list(rep.witness_x) if rep.witness_x else None,
            "witness_trend": list(rep.witness_trend),
            "margin": rep.inf_ratio - c_thresh,
        }
        if name == "disk":
            row["bbm"] = _bounded_check(dom, "x1", 2.0, cfg.h, cfg.workers)
            row["bbm"]["verdict"] = ("bounded" if row["bbm"]["bounded"]
                                     else "unbounded")
            row["extension"] = _extension_stability(dom, "x1", 2.0, cfg.h,
                                                    cfg.workers)
            row["extension"]["verdict"] = ("stable" if row["extension"]["stable"]
                                           else "unstable")
            expected = {"ahlfors": "pass", "bbm": "bounded",
                        "extension": "stable"}
        elif name == "cusp-interior:2":
            row["bbm"] = _growth_witness(dom, 4.0, cfg.h)
            row["bbm"]["p"] = 4.0
            row["bbm"]["verdict"] = ("growing" if row["bbm"]["growing"]
                                     else "not-growing")
            expected = {"ahlfors": "pass", "bbm": "growing"}
        elif name == "cusp-exterior:2":
            gf = sample(dom, get_function("x1"), cfg.h)
            hb = hajlasz_bbm_bound(gf, max(DICHOTOMY_S_BBM), 2.0,
                                   workers=cfg.workers)
            row["hajlasz"] = {"s": max(DICHOTOMY_S_BBM), "p": 2.0,
                              "lhs": hb.lhs, "rhs": hb.rhs,
                              "margin": hb.margin,
                              "verdict": ("hajlasz-holds" if hb.holds
                                          else "hajlasz-fails")}
            expected = {"ahlfors": "fail", "hajlasz": "hajlasz-holds"}
        else:  # slit-disk
            row["bbm"] = _bounded_check(dom, "x1", 2.0, cfg.h, cfg.workers)
            row["bbm"]["verdict"] = ("bounded" if row["bbm"]["bounded"]
                                     else "unbounded")
            row["extension"] = _extension_stability(dom, "x1", 2.0, cfg.h,
                                                    cfg.workers)
            row["extension"]["verdict"] = ("stable" if row["extension"]["stable"]
                                           else "unstable")
            expected = {"ahlfors": "pass", "extension": "stable"}
        row["expected_columns"] = expected
        ok = all(row[col]["verdict"] == want for col, want in expected.items())
        row["verdict"] = "as-expected" if ok else "mismatch"
        row["expected"] = "as-expected"
        records.append(row)
    rep = ExperimentReport("dichotomy", cfg.to_dict(), records,
                           wall_time=time.perf_counter() - t0)
    return rep


_RUNNERS = {"bbm-sweep": _run_bbm, "poincare": _run_poincare,
            "ahlfors": _run_ahlfors, "extend-check": _run_extend,
            "content-trend": _run_content}


def run(cfg: ExperimentConfig) -> ExperimentReport:
    """Execute the configured experiment and return its report."""
    cfg.validate()
    if cfg.kind == "dichotomy":
        return dichotomy_table(cfg)
    t0 = time.perf_counter()
    records = _RUNNERS[cfg.kind](cfg)
    return ExperimentReport(cfg.kind, cfg.to_dict(), records,
                            wall_time=time.perf_counter() - t0)


# ----------------------------------------------------------------------
# artifact emission
# ----------------------------------------------------------------------

def _g(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _write_rows(path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_g(v) for v in row) + "\n")


def emit_csv(report: ExperimentReport, path) -> None:
    """Write the report's tabular view; columns depend on the kind."""
    kind, recs = report.kind, report.records
    if kind == "bbm-sweep":
        rows = [(r["domain"], r["function"], r["p"], s, v, e, ev,
                 r["reference"], v / r["reference"] if r["reference"] > 0
                 else math.inf)
                for r in recs
                for s, v, e, ev in zip(r["s_values"], r["scaled"], r["errs"],
                                       r["eval_errs"])]
        _write_rows(path, ("domain", "function", "p", "s", "scaled_seminorm",
                           "err", "eval_err", "reference", "ratio"), rows)
    elif kind == "poincare":
        rows = [(r["domain"], r["function"], r["p"], r["q"], r["s"],
                 r["lhs"], r["lhs_err"], r["rhs"], r["rhs_err"],
                 r["constant"], r["margin"], r["verdict"]) for r in recs]
        _write_rows(path, ("domain", "function", "p", "q", "s", "lhs",
                           "lhs_err", "rhs", "rhs_err", "constant", "margin",
                           "verdict"), rows)
    elif kind == "ahlfors":
        rows = []
        for r in recs:
            for smp in r["samples"]:
                rows.append((r["domain"],) + tuple(smp["x"])
                            + (smp["r"], smp["ratio"], smp["ci"]))
        dim = len(recs[0]["samples"][0]["x"]) if recs and recs[0]["samples"] else 2
        _write_rows(path, ("domain",) + tuple(f"x{k+1}" for k in range(dim))
                    + ("r", "ratio", "ci"), rows)
    elif kind == "extend-check":
        rows = [(r["domain"], r["function"], r["p"], c["s"], c["lhs"],
                 c["rhs"], c["ratio"], c["lhs_err"], c["rhs_err"],
                 r["spread"], r["verdict"])
                for r in recs for c in r["cases"]]
        _write_rows(path, ("domain", "function", "p", "s", "lhs", "rhs",
                           "ratio", "lhs_err", "rhs_err", "spread",
                           "verdict"), rows)
    elif kind == "content-trend":
        rows = [(r["domain"], r["s"], r["p"], r["lam"], d, v, r["slope"],
                 r["expected_slope"], r["verdict"])
                for r in recs for d, v in zip(r["deltas"], r["values"])]
        _write_rows(path, ("domain", "s", "p", "lam", "delta", "value",
                           "slope", "expected_slope", "verdict"), rows)
    elif kind == "dichotomy":
        rows = []
        for r in recs:
            ahl = r["ahlfors"]
            bbm = r.get("bbm") or r.get("hajlasz") or {}
            ext = r.get("extension")
            bbm_metric = bbm.get("max_ratio", bbm.get("margin", ""))
            rows.append((r["domain"], ahl["verdict"], ahl["inf_ratio"],
                         bbm.get("verdict", "-"), bbm_metric,
                         ext["verdict"] if ext else "-",
                         ext["spread"] if ext else "",
                         r["verdict"]))
        _write_rows(path, ("domain", "ahlfors", "inf_ratio", "bbm",
                           "bbm_metric", "extension", "spread",
                           "row_verdict"), rows)
    else:
        raise ConfigError(f"field 'kind': no CSV emitter for {kind!r}")


def emit_svg(report: ExperimentReport, path) -> None:
    """Write the report's line-chart view."""
    kind, recs = report.kind, report.records
    series = []
    title, xlabel, ylabel = kind, "", ""
    if kind == "bbm-sweep":
        for r in recs:
            series.append({"label": f"{r['function']} p={_g(r['p'])}",
                           "x": r["s_values"], "y": r["scaled"],
                           "err": r["errs"]})
            series.append({"label": "reference",
                           "x": [r["s_values"][0], r["s_values"][-1]],
                           "y": [r["reference"]] * 2,
                           "err": [r["reference_err"]] * 2})
        title = f"(1-s) x Gagliardo energy: {report.config.get('domain', '')}"
        xlabel, ylabel = "s", "(1-s) [f]^p"
    elif kind == "poincare":
        idx = list(range(len(recs)))
        series = [{"label": "lhs", "x": idx, "y": [r["lhs"] for r in recs],
                   "err": [r["lhs_err"] for r in recs]},
                  {"label": "rhs", "x": idx, "y": [r["rhs"] for r in recs],
                   "err": [r["rhs_err"] for r in recs]}]
        title = "Poincare inequality cases"
        xlabel, ylabel = "case index", "value"
    elif kind == "ahlfors":
        for r in recs:
            per_r: dict = {}
            for smp in r["samples"]:
                per_r.setdefault(smp["r"], []).append(smp["ratio"])
            rs = sorted(per_r, reverse=True)
            series.append({"label": "min ratio", "x": rs,
                           "y": [min(per_r[x]) for x in rs]})
            series.append({"label": f"c={_g(r['c'])}", "x": rs,
                           "y": [r["c"]] * len(rs)})
            if r["witness_x"] is not None and r["witness_trend"]:
                series.append({"label": "witness", "x": list(r["r_decades"]),
                               "y": list(r["witness_trend"])})
        title = f"measure density: {report.config.get('domain', '')}"
        xlabel, ylabel = "radius r", "|B(x,r) n domain| / r^n"
    elif kind == "extend-check":
        for r in recs:
            series.append({"label": f"{r['function']} p={_g(r['p'])}",
                           "x": [c["s"] for c in r["cases"]],
                           "y": [c["ratio"] for c in r["cases"]]})
        title = f"extension energy ratio: {report.config.get('domain', '')}"
        xlabel, ylabel = "s", "[Ef]^p / [f]^p"
    elif kind == "content-trend":
        for r in recs:
            series.append({"label": f"s={_g(r['s'])} lam={r['lam']:.3g}",
                           "x": [math.log10(d) for d in r["deltas"]],
                           "y": [math.log10(max(v, 1e-300))
                                 for v in r["values"]]})
        title = f"boundary content: {report.config.get('domain', '')}"
        xlabel, ylabel = "log10 delta", "log10 content"
    elif kind == "dichotomy":
        for r in recs:
            col = r.get("bbm")
            if col and "scaled" in col:
                ref = col.get("reference")
                y = ([v / ref for v in col["scaled"]]
                     if ref else col["scaled"])
                series.append({"label": r["domain"], "x": col["s_values"],
                               "y": y})
        if series:
            xs = series[0]["x"]
            series.append({"label": "BBM cap", "x": [xs[0], xs[-1]],
                           "y": [1.0, 1.0]})
        title = "dichotomy: scaled energy vs BBM cap"
        xlabel, ylabel = "s", "(1-s)[f]^p / K|f|^p_W1p"
    else:
        raise ConfigError(f"field 'kind': no SVG emitter for {kind!r}")
    line_chart(series, title=title, xlabel=xlabel, ylabel=ylabel, path=path)
