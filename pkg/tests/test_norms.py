"""Tests for BBM, slicing, Hajlasz, and Poincare functionals.

Frozen oracles: K(1,p)=2/p, K(2,2)=pi/2, K(3,2)=2pi/3; 1D f=x scaled
seminorm (1-s)*2/((p-sp)(p-sp+1)); Poincare 1D case lhs=1/12, rhs=2/3.
"""
import math

import numpy as np
import pytest

from fracdom.domains import Ball, get_domain, restricted_domain
from fracdom.grid import sample
from fracdom.norms import (BbmSweep, bbm_constant, bbm_sweep,
                           hajlasz_bbm_bound, hajlasz_gradient_violation,
                           poincare_check, slicing_seminorm)
from fracdom.seminorm import ParameterError, gagliardo


def test_bbm_constant_closed_forms():
    for p in (1.5, 2.0, 3.0):
        assert abs(bbm_constant(1, p) - 2.0 / p) < 1e-15
    assert abs(bbm_constant(2, 2.0) - math.pi / 2.0) < 1e-12
    assert abs(bbm_constant(3, 2.0) - 2.0 * math.pi / 3.0) < 1e-12
    # K(n,2) = |S^(n-1)| / (2n)
    for n, surf in ((1, 2.0), (2, 2 * math.pi), (3, 4 * math.pi)):
        assert abs(bbm_constant(n, 2.0) - surf / (2 * n)) < 1e-12


def test_bbm_constant_preconditions():
    with pytest.raises(ParameterError):
        bbm_constant(4, 2.0)
    with pytest.raises(ParameterError):
        bbm_constant(2, 1.0)


def test_bbm_sweep_1d_closed_form():
    gf = sample(get_domain("interval"), "x1", 2.0 ** -7)
    sw = bbm_sweep(gf, 2.0, (0.5, 0.75, 0.9))
    assert abs(sw.reference - 1.0) < 1e-6          # K(1,2) * ||f'||^2 = 1
    for s, v, e in zip(sw.s_values, sw.scaled, sw.errs):
        a = 2.0 - 2.0 * s
        closed = (1.0 - s) * 2.0 / (a * (a + 1.0))
        assert abs(v - closed) <= e + 1e-4, s
    assert sw.monotone_growth      # 0.5 -> 0.667 -> 0.833, limit 1
    assert sw.max_ratio < 1.0


def test_bbm_sweep_const_all_zero():
    gf = sample(get_domain("interval"), "const", 2.0 ** -6)
    sw = bbm_sweep(gf, 2.0, (0.5, 0.9))
    assert sw.scaled == (0.0, 0.0)
    assert sw.reference == 0.0 and sw.max_ratio == 0.0


def test_bbm_sweep_requires_increasing_grid():
    gf = sample(get_domain("interval"), "x1", 2.0 ** -5)
    with pytest.raises(ParameterError):
        bbm_sweep(gf, 2.0, (0.9, 0.5))


def test_bbm_sweep_csv(tmp_path):
    gf = sample(get_domain("interval"), "x1", 2.0 ** -6)
    sw = bbm_sweep(gf, 2.0, (0.5, 0.75))
    out = tmp_path / "sweep.csv"
    sw.to_csv(out)
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "s,scaled_seminorm,err,reference,ratio"
    assert len(lines) == 3
    assert lines[1].startswith("0.5,")


def test_slicing_matches_direct_on_disk():
    gf = sample(get_domain("disk"), "x1", 2.0 ** -4)
    sl = slicing_seminorm(gf, 0.5, 2.0)
    ga = gagliardo(gf, 0.5, 2.0)
    assert abs(sl.value - ga.value) <= sl.err_est + ga.err_est


def test_slicing_matches_direct_on_square_p3():
    gf = sample(get_domain("square"), "x1", 2.0 ** -5)
    sl = slicing_seminorm(gf, 0.75, 3.0)
    ga = gagliardo(gf, 0.75, 3.0)
    assert abs(sl.value - ga.value) <= sl.err_est + ga.err_est
    # frozen continuum value for f = x1 on the unit square
    assert abs(ga.value - 1.937201) < 0.01


def test_slicing_const_zero():
    gf = sample(get_domain("disk"), "const:2", 2.0 ** -4)
    assert slicing_seminorm(gf, 0.5, 2.0).value == 0.0


def test_slicing_rotation_invariance():
    a = slicing_seminorm(sample(get_domain("disk"), "x1", 2.0 ** -4), 0.5, 2.0)
    b = slicing_seminorm(sample(get_domain("disk"), "coord:2", 2.0 ** -4), 0.5, 2.0)
    assert abs(a.value - b.value) <= 1e-9 * a.value


def test_slicing_requires_2d():
    gf = sample(get_domain("interval"), "x1", 2.0 ** -5)
    with pytest.raises(ParameterError):
        slicing_seminorm(gf, 0.5, 2.0)


def test_hajlasz_gradient_valid_on_catalog():
    for dom, fn in (("disk", "x1"), ("square", "coord:2"),
                    ("cusp-exterior:2", "x1")):
        gf = sample(get_domain(dom), fn, 2.0 ** -5)
        assert hajlasz_gradient_violation(gf, 10_000, seed=11) <= 1e-12, dom


def test_hajlasz_bound_holds():
    gf = sample(get_domain("disk"), "x1", 2.0 ** -4)
    hb = hajlasz_bbm_bound(gf, 0.5, 2.0)
    assert hb.holds and hb.lhs <= hb.rhs
    # explicit constant: 2^p * sigma(S^1) * (2 diam)^(p(1-s)) / p
    assert abs(hb.constant - 4.0 * 2 * math.pi * 4.0 / 2.0) < 1e-9


def test_hajlasz_bounded_on_exterior_cusp_sweep():
    gf = sample(get_domain("cusp-exterior:2"), "x1", 2.0 ** -5)
    for s in (0.5, 0.75, 0.9):
        hb = hajlasz_bbm_bound(gf, s, 2.0)
        assert hb.holds, s


def test_hajlasz_missing_g_errors():
    gf = sample(get_domain("square"), "bump", 2.0 ** -4)
    assert gf.hajlasz_g is None
    with pytest.raises(ParameterError):
        hajlasz_bbm_bound(gf, 0.5, 2.0)


def test_poincare_1d_pinned_case():
    rec = poincare_check(get_domain("interval"), "x1", 2.0, 2.0, 0.75,
                         h=2.0 ** -7)
    assert abs(rec.lhs - 1.0 / 12.0) < 2e-4
    assert abs(rec.rhs - 2.0 / 3.0) < 5e-3
    assert abs(rec.constant - 0.25) < 1e-12
    assert rec.holds and rec.margin > 0


def test_poincare_const_trivial():
    rec = poincare_check(get_domain("interval"), "const", 2.0, 2.0, 0.75,
                         h=2.0 ** -6)
    assert rec.lhs == 0.0 and rec.rhs == 0.0 and rec.holds


def test_poincare_disk_with_ball():
    rec = poincare_check(get_domain("disk"), "x1", 2.0, 2.0, 0.5,
                         ball=Ball((1.0, 0.0), 0.5), h=2.0 ** -6)
    assert rec.holds
    assert rec.ball_diam == 1.0


def test_poincare_preconditions():
    dom = get_domain("interval")
    with pytest.raises(ParameterError):          # pole: n - q + sq <= 0
        poincare_check(dom, "x1", 2.0, 2.0, 0.4, h=2.0 ** -5)
    with pytest.raises(ParameterError):          # p > q
        poincare_check(dom, "x1", 3.0, 2.0, 0.75, h=2.0 ** -5)


def test_poincare_p_less_than_q():
    rec = poincare_check(get_domain("interval"), "x1", 1.0, 2.0, 0.75,
                         h=2.0 ** -6)
    assert rec.holds and rec.rhs > 0


def test_restricted_domain_membership():
    dom = get_domain("disk")
    rdom = restricted_domain(dom, Ball((1.0, 0.0), 0.5))
    pts = np.array([[0.9, 0.0], [0.0, 0.0], [1.2, 0.0], [0.9, 0.4]])
    got = rdom.inside(pts)
    assert list(got) == [True, False, False, True]
    gf = sample(rdom, "x1", 2.0 ** -6)
    # the lens B((1,0),.5) cap disk has positive mass below the half-ball
    assert 0 < gf.volume < 0.5 * math.pi * 0.25
