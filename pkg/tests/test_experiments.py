"""Experiment configs, runners, reports, and artifact emission."""
import glob
import json
import math
import os
import xml.dom.minidom

import pytest

from fracdom.experiments import (ConfigError, ExperimentConfig,
                                 ExperimentReport, KINDS, dichotomy_table,
                                 emit_csv, emit_svg, load_config, run)
from fracdom.svg import line_chart

CONFIG_DIR = os.path.join(os.path.dirname(__file__), "..", "configs")


# ----------------------------------------------------------------------
# config loading and validation
# ----------------------------------------------------------------------

def test_config_aliases_and_scalar_coercion():
    cfg = load_config({"kind": "poincare", "fn": "x1", "p": 2, "s": [0.5],
                       "domain": "disk"})
    assert cfg.functions == ("x1",)
    assert cfg.p_values == (2.0,)
    assert cfg.s_values == (0.5,)


def test_config_errors_name_the_field():
    bad = [
        ({"kind": "nope"}, "kind"),
        ({"kind": "poincare", "s": [1.5]}, "s"),
        ({"kind": "poincare", "h": -1.0}, "h"),
        ({"kind": "poincare", "wat": 3}, "wat"),
        ({"kind": "poincare", "p": [0.5]}, "p"),
        ({"kind": "dichotomy", "rows": ["triangle"]}, "rows"),
        ({"s": [0.5]}, "kind"),
    ]
    for doc, field in bad:
        with pytest.raises(ConfigError) as exc:
            load_config(doc)
        assert field in str(exc.value)


def test_config_from_json_text_and_bad_json():
    cfg = load_config('{"kind": "ahlfors", "domain": "square", "c": 0.7}')
    assert cfg.kind == "ahlfors" and cfg.c == 0.7
    with pytest.raises(ConfigError) as exc:
        load_config('{"kind": "ahlfors",\n  "domain": }')
    assert "line" in str(exc.value)


def test_checked_in_configs_all_valid():
    paths = sorted(glob.glob(os.path.join(CONFIG_DIR, "*.json")))
    assert len(paths) >= 8
    for path in paths:
        cfg = load_config(path)
        assert cfg.kind in KINDS


def test_config_echo_omits_execution_details():
    cfg = ExperimentConfig(kind="ahlfors", workers=4, out="/tmp/x")
    d = cfg.to_dict()
    assert "workers" not in d and "out" not in d
    assert d["kind"] == "ahlfors"


# ----------------------------------------------------------------------
# report object
# ----------------------------------------------------------------------

def test_report_roundtrip_and_expectations():
    recs = [{"verdict": "pass", "expected": "pass", "margin": 0.1},
            {"verdict": "stable"}]
    rep = ExperimentReport("ahlfors", {"kind": "ahlfors"}, recs)
    text = rep.to_json()
    back = ExperimentReport.from_json(text)
    assert back.kind == rep.kind
    assert back.records == recs
    assert rep.all_expected()
    recs[0]["expected"] = "fail"
    assert not ExperimentReport("ahlfors", {}, recs).all_expected()


def test_report_json_excludes_wall_time(tmp_path):
    rep = ExperimentReport("poincare", {}, [], wall_time=3.14)
    path = tmp_path / "report.json"
    rep.to_json(path)
    doc = json.loads(path.read_text())
    assert "wall_time" not in doc
    assert doc["version"]


# ----------------------------------------------------------------------
# runners (small grids; values against closed forms where available)
# ----------------------------------------------------------------------

def test_bbm_sweep_interval_closed_form():
    # (1-s) * int int |x-y|^(1-2s) over the unit interval equals
    # 2(1-s) / ((2-2s)(3-2s)): 0.5 at s=0.5 and 2/3 at s=0.75.
    cfg = ExperimentConfig(kind="bbm-sweep", domain="interval",
                           functions=("x1",), p_values=(2.0,),
                           s_values=(0.5, 0.75), h=2.0 ** -6)
    rep = run(cfg)
    rec = rep.records[0]
    assert abs(rec["scaled"][0] - 0.5) < 5e-3
    assert abs(rec["scaled"][1] - 2.0 / 3.0) < 5e-3
    assert rec["verdict"] == "growing"
    assert rec["margin"] > 0


def test_poincare_interval_holds():
    cfg = ExperimentConfig(kind="poincare", domain="interval",
                           functions=("x1",), p_values=(2.0,), q=2.0,
                           s_values=(0.75,), h=2.0 ** -6)
    rep = run(cfg)
    rec = rep.records[0]
    # var(x) on (0,1) = 1/12; the fractional side is >> that.
    assert abs(rec["lhs"] - 1.0 / 12.0) < 2e-3
    assert rec["rhs"] > rec["lhs"]
    assert rec["verdict"] == "holds"
    assert rep.all_expected()


def test_ahlfors_expectation_mismatch_detected():
    cfg = ExperimentConfig(kind="ahlfors", domain="disk", c=1.0,
                           budget=2048, seed=0, expect="fail")
    rep = run(cfg)
    assert rep.records[0]["verdict"] == "pass"
    assert not rep.all_expected()


def test_content_trend_requires_supercritical_sp():
    cfg = ExperimentConfig(kind="content-trend", domain="slit-disk",
                           p_values=(2.0,), s_values=(0.4,))
    with pytest.raises(ConfigError):
        run(cfg)


def test_content_trend_slit_disk_consistent():
    cfg = ExperimentConfig(kind="content-trend", domain="slit-disk",
                           p_values=(2.0,), s_values=(0.8,))
    rep = run(cfg)
    rec = rep.records[0]
    assert rec["verdict"] == "consistent"
    assert rec["lam"] == pytest.approx(1.3)
    assert rep.all_expected()


def test_extend_check_square_stable():
    cfg = ExperimentConfig(kind="extend-check", domain="square",
                           functions=("x1",), p_values=(2.0,),
                           s_values=(0.8, 0.9), h=2.0 ** -4)
    rep = run(cfg)
    rec = rep.records[0]
    assert rec["verdict"] == "stable"
    assert 1.0 <= rec["spread"] < 2.0


def test_dichotomy_single_row_smoke():
    cfg = ExperimentConfig(kind="dichotomy", rows=("cusp-exterior:2",),
                           budget=4096, h=2.0 ** -4, seed=0)
    rep = dichotomy_table(cfg)
    row = rep.records[0]
    assert row["ahlfors"]["verdict"] == "fail"
    assert row["hajlasz"]["verdict"] == "hajlasz-holds"
    assert row["verdict"] == "as-expected"
    assert rep.all_expected()


# ----------------------------------------------------------------------
# determinism
# ----------------------------------------------------------------------

def test_report_bytes_identical_across_runs_and_workers():
    base = dict(kind="bbm-sweep", domain="interval", functions=("x1",),
                p_values=(2.0,), s_values=(0.5, 0.75), h=2.0 ** -5)
    texts = [run(ExperimentConfig(**base, workers=w)).to_json()
             for w in (1, 1, 2)]
    assert texts[0] == texts[1] == texts[2]


def test_artifact_bytes_identical(tmp_path):
    cfg = ExperimentConfig(kind="content-trend", domain="slit-disk",
                           p_values=(2.0,), s_values=(0.8,))
    rep = run(cfg)
    blobs = []
    for tag in ("a", "b"):
        csv = tmp_path / f"{tag}.csv"
        svg = tmp_path / f"{tag}.svg"
        emit_csv(rep, csv)
        emit_svg(rep, svg)
        blobs.append((csv.read_bytes(), svg.read_bytes()))
    assert blobs[0] == blobs[1]


# ----------------------------------------------------------------------
# artifact formats
# ----------------------------------------------------------------------

def test_csv_headers_by_kind(tmp_path):
    cfg = ExperimentConfig(kind="bbm-sweep", domain="interval",
                           functions=("x1",), p_values=(2.0,),
                           s_values=(0.5,), h=2.0 ** -5)
    rep = run(cfg)
    path = tmp_path / "r.csv"
    emit_csv(rep, path)
    lines = path.read_text().splitlines()
    assert lines[0].split(",") == ["domain", "function", "p", "s",
                                   "scaled_seminorm", "err", "eval_err",
                                   "reference", "ratio"]
    row = lines[1].split(",")
    assert row[0] == "interval" and row[1] == "x1"
    assert abs(float(row[4]) - 0.5) < 5e-3


def test_svg_emission_parses(tmp_path):
    cfg = ExperimentConfig(kind="poincare", domain="interval",
                           functions=("x1",), p_values=(2.0,), q=2.0,
                           s_values=(0.75,), h=2.0 ** -5)
    rep = run(cfg)
    path = tmp_path / "r.svg"
    emit_svg(rep, path)
    xml.dom.minidom.parseString(path.read_text())


# ----------------------------------------------------------------------
# chart helper
# ----------------------------------------------------------------------

def test_line_chart_escapes_markup():
    text = line_chart([{"label": "a<b", "x": [0, 1], "y": [1, 2],
                        "err": [0.1, 0.1]}],
                      title="T & t", xlabel="x<y", ylabel="q&r")
    xml.dom.minidom.parseString(text)
    assert "a<b" not in text.split("<svg", 1)[1]


def test_line_chart_degenerate_inputs():
    flat = line_chart([{"label": "c", "x": [0, 1, 2], "y": [3.0, 3.0, 3.0]}])
    xml.dom.minidom.parseString(flat)
    empty = line_chart([])
    xml.dom.minidom.parseString(empty)
    skip = line_chart([{"label": "n", "x": [0, 1, 2],
                        "y": [1.0, math.nan, 2.0]}])
    xml.dom.minidom.parseString(skip)
