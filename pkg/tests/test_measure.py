"""Tests for ball measures, Ahlfors regularity sampling, and dyadic content.

Frozen closed-form oracles:
  * |B((0,0), 1/2) cap disk| = pi/4                       (ball inside)
  * |B((1,0), 1) cap disk|   = 2 pi/3 - sqrt(3)/2         (two-unit-circle lens)
                             = 1.2283696986087567
  * |B((1,0), 1) cap annulus| = lens above minus the bite the hole takes:
      lens(r=1, R=1/2, d=1) = 1/4 acos(1/4) + acos(7/8) - sqrt(15)/8
      value = 0.8776030649037128
  * disk density infimum over r <= diam/2: attained at (boundary, r=1),
    ratio = lens / 1^2 = 1.2283696986087567.
"""
import json
import math

import numpy as np
import pytest

from fracdom.domains import get_domain
from fracdom.measure import (ContentEstimate, ParameterError, RegularityReport,
                             _farthest_point_subset, ahlfors_check,
                             ball_measure, boundary_hypothesis_check,
                             hausdorff_content)

LENS_UNIT = 2.0 * math.pi / 3.0 - math.sqrt(3.0) / 2.0          # 1.2283696986
BITE = (0.25 * math.acos(0.25) + math.acos(0.875)
        - math.sqrt(15.0) / 8.0)                                 # 0.3507666337
LENS_ANNULUS = LENS_UNIT - BITE                                  # 0.8776030649


# ----------------------------------------------------------------------
# ball_measure
# ----------------------------------------------------------------------

def test_ball_measure_interior_disk():
    area, ci = ball_measure(get_domain("disk"), (0.0, 0.0), 0.5)
    assert abs(area - math.pi / 4.0) <= ci
    assert ci < 0.01


def test_ball_measure_boundary_lens():
    area, ci = ball_measure(get_domain("disk"), (1.0, 0.0), 1.0)
    assert abs(area - LENS_UNIT) <= ci
    assert ci < 0.02


def test_ball_measure_annulus_bite():
    area, ci = ball_measure(get_domain("annulus"), (1.0, 0.0), 1.0)
    assert abs(area - LENS_ANNULUS) <= ci


def test_ball_measure_far_ball_exact_zero():
    area, ci = ball_measure(get_domain("disk"), (5.0, 0.0), 0.25)
    assert area == 0.0 and ci == 0.0


def test_ball_measure_interval():
    # 1D: |B(0.5, 0.25) cap (0,1)| = 0.5;  |B(0, 0.25) cap (0,1)| = 0.25
    dom = get_domain("interval")
    a, ci = ball_measure(dom, (0.5,), 0.25)
    assert abs(a - 0.5) <= max(ci, 1e-3)
    a, ci = ball_measure(dom, (0.0,), 0.25)
    assert abs(a - 0.25) <= max(ci, 1e-3)


def test_ball_measure_validation_and_determinism():
    dom = get_domain("disk")
    with pytest.raises(ParameterError):
        ball_measure(dom, (0.0, 0.0), 0.0)
    a1 = ball_measure(dom, (1.0, 0.0), 1.0, seed=3)
    a2 = ball_measure(dom, (1.0, 0.0), 1.0, seed=3)
    assert a1 == a2
    a3 = ball_measure(dom, (1.0, 0.0), 1.0, seed=4)
    assert a1 != a3


# ----------------------------------------------------------------------
# ahlfors_check
# ----------------------------------------------------------------------

def test_disk_passes_with_lens_infimum():
    rep = ahlfors_check(get_domain("disk"), c=1.0)
    assert rep.verdict == "pass"
    # density infimum attained at the boundary at the top radius r = diam/2
    assert rep.witness_r == 1.0
    assert abs(rep.inf_ratio - LENS_UNIT) <= 0.05 * LENS_UNIT
    wx = np.asarray(rep.witness_x)
    assert abs(np.linalg.norm(wx) - 1.0) < 0.05


@pytest.mark.parametrize("name", ["square", "annulus", "slit-disk",
                                  "cusp-interior:2"])
def test_regular_catalog_passes_at_calibrated_threshold(name):
    rep = ahlfors_check(get_domain(name), c=0.7)
    assert rep.verdict == "pass", (name, rep.inf_ratio, rep.verdict)


@pytest.mark.parametrize("lam", [1.5, 2.0])
def test_exterior_cusp_fails_with_tip_witness(lam):
    rep = ahlfors_check(get_domain(f"cusp-exterior:{lam:g}"), c=1.0)
    assert rep.verdict == "fail"
    # witness at the cusp tip (origin), at the smallest radius
    assert np.linalg.norm(rep.witness_x) < 0.05
    assert rep.witness_r == min(rep.r_decades)
    # ratio decreasing across both decade steps
    t = rep.witness_trend
    assert t[0] > t[1] > t[2]
    # scale law at the tip: ratio ~ r^(lam-1), so the final ratio is tiny
    assert t[2] < 0.3 * t[0]


def test_square_infimum_near_corner_quarter_ball():
    # quarter-ball corner density pi/4 is the square's true infimum
    rep = ahlfors_check(get_domain("square"), c=0.7)
    assert abs(rep.inf_ratio - math.pi / 4.0) <= 0.05


def test_ahlfors_radius_validation():
    dom = get_domain("disk")
    with pytest.raises(ParameterError):
        ahlfors_check(dom, r_decades=[1.5])      # > diam/2 = 1
    with pytest.raises(ParameterError):
        ahlfors_check(dom, r_decades=[0.5, -0.1])


def test_ahlfors_deterministic_and_json_roundtrip(tmp_path):
    rep1 = ahlfors_check(get_domain("disk"), seed=5, x_samples=8, budget=2048)
    rep2 = ahlfors_check(get_domain("disk"), seed=5, x_samples=8, budget=2048)
    assert rep1.to_json() == rep2.to_json()
    path = tmp_path / "report.json"
    rep1.to_json(path)
    payload = json.loads(path.read_text())
    assert payload["domain"] == "disk"
    assert payload["verdict"] == rep1.verdict
    assert payload["witness"]["x"] == list(rep1.witness_x)
    assert len(payload["samples"]) == len(rep1.ratios)


def test_ahlfors_interval_1d():
    rep = ahlfors_check(get_domain("interval"), c=0.9, x_samples=8,
                        budget=4096)
    assert rep.verdict == "pass"
    # 1D density ratio is 1 at endpoints, 2 deep inside
    assert 0.9 <= rep.inf_ratio <= 1.1


# ----------------------------------------------------------------------
# farthest-point subsampling
# ----------------------------------------------------------------------

def test_farthest_point_subset_hits_extremes():
    ang = np.linspace(0.0, 2.0 * math.pi, 512, endpoint=False)
    cloud = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    two = _farthest_point_subset(cloud, 2)
    assert np.linalg.norm(two[0] - two[1]) > 1.9       # near-antipodal pair
    sub = _farthest_point_subset(cloud, 8)
    assert len(sub) == 8
    # max-min spread: every pair at least a quarter-circle chord apart
    d = np.linalg.norm(sub[:, None] - sub[None, :], axis=2)
    np.fill_diagonal(d, np.inf)
    assert d.min() > 2.0 * math.sin(math.pi / 8.0) - 0.1


# ----------------------------------------------------------------------
# hausdorff_content
# ----------------------------------------------------------------------

def test_content_single_point_one_cell():
    est = hausdorff_content(np.array([[0.3, 0.4]]), lam=1.0, delta=0.25)
    assert est.cover_count == 1
    side = 2.0 ** math.floor(math.log2(0.25 / math.sqrt(2.0)))
    assert est.value == pytest.approx(side * math.sqrt(2.0))


def test_content_segment_stable_at_its_dimension():
    pts = np.linspace(0.0, 1.0, 4097)[:, None]       # unit segment, n = 1
    vals = [hausdorff_content(pts, lam=1.0, delta=d).value
            for d in (2.0 ** -3, 2.0 ** -5, 2.0 ** -7)]
    for v in vals:
        assert 0.9 <= v <= 2.1          # ~length, stable across delta
    assert max(vals) / min(vals) < 1.6


def test_content_circle_above_its_dimension_decays():
    ang = np.linspace(0.0, 2.0 * math.pi, 8192, endpoint=False)
    cloud = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    deltas = [2.0 ** -3, 2.0 ** -5, 2.0 ** -7]
    vals = [hausdorff_content(cloud, lam=1.25, delta=d).value for d in deltas]
    # value ~ delta^{1/4}: two decades of delta shrink it well below start
    assert vals[2] < 0.7 * vals[0]
    # while at lam = 1 the perimeter estimate stays put
    per = [hausdorff_content(cloud, lam=1.0, delta=d).value for d in deltas]
    assert max(per) / min(per) < 1.6


def test_content_at_full_dimension_bounded_by_box_volume():
    rng = np.random.default_rng(0)
    pts = rng.random((20000, 2))
    for d in (0.25, 0.0625):
        est = hausdorff_content(pts, lam=2.0, delta=d)
        # count * (side sqrt(2))^2 <= 2 * (covered area) <= c * box volume
        assert est.value <= 4.0


def test_content_monotone_at_full_dimension():
    rng = np.random.default_rng(1)
    pts = rng.random((20000, 2))
    v_coarse = hausdorff_content(pts, lam=2.0, delta=0.25).value
    v_fine = hausdorff_content(pts, lam=2.0, delta=0.03125).value
    assert v_fine <= v_coarse + 1e-12


def test_content_validation():
    pts = np.zeros((3, 2))
    with pytest.raises(ParameterError):
        hausdorff_content(pts, lam=1.0, delta=0.0)
    with pytest.raises(ParameterError):
        hausdorff_content(pts, lam=-0.5, delta=0.1)
    est = hausdorff_content(np.zeros((0, 2)), lam=1.0, delta=0.1)
    assert est.value == 0.0 and est.cover_count == 0


# ----------------------------------------------------------------------
# boundary_hypothesis_check
# ----------------------------------------------------------------------

@pytest.mark.parametrize("name", ["disk", "square"])
def test_boundary_content_trend_consistent(name):
    trend = boundary_hypothesis_check(get_domain(name), s=0.75, p=2.0)
    assert trend.lam == pytest.approx(1.25)
    assert trend.expected_slope == pytest.approx(0.25)
    assert trend.consistent_with_zero
    assert trend.slope >= 0.125


def test_boundary_content_needs_sp_above_one():
    with pytest.raises(ParameterError):
        boundary_hypothesis_check(get_domain("disk"), s=0.5, p=2.0)


def test_content_trend_csv(tmp_path):
    trend = boundary_hypothesis_check(get_domain("disk"), s=0.75, p=2.0)
    path = tmp_path / "trend.csv"
    trend.to_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "delta,value"
    assert len(lines) == 1 + len(trend.deltas)
    first = lines[1].split(",")
    assert float(first[0]) == max(trend.deltas)
