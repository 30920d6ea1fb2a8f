import numpy as np
import pytest

from fracdom.domains import (DomainError, get_domain, ball_domain, box_domain,
                             ImplicitDomain, SLIT_HALFWIDTH, CATALOG)


def mc_area(dom, n=200_000, seed=5):
    lo = np.asarray(dom.bbox.lo)
    wid = dom.bbox.widths
    rng = np.random.default_rng(seed)
    cand = lo + rng.random((n, dom.dim)) * wid
    return dom.inside(cand).mean() * float(np.prod(wid))


def test_catalog_names_parse():
    for name in CATALOG:
        d = get_domain(name)
        assert d.dim in (1, 2)
    with pytest.raises(DomainError):
        get_domain("dodecahedron")


def test_membership_basics():
    disk = get_domain("disk")
    assert disk.inside([[0.0, 0.0]])[0]
    assert not disk.inside([[1.0, 0.0]])[0]          # open set
    sq = get_domain("square")
    assert sq.inside([[0.5, 0.5]])[0]
    assert not sq.inside([[0.0, 0.5]])[0]
    ann = get_domain("annulus")
    assert not ann.inside([[0.0, 0.0]])[0]
    assert ann.inside([[0.75, 0.0]])[0]


def test_exact_areas():
    assert get_domain("interval").area_exact == 1.0
    assert get_domain("square").area_exact == 1.0
    assert get_domain("disk").area_exact == pytest.approx(np.pi)
    assert get_domain("annulus").area_exact == pytest.approx(0.75 * np.pi)
    w = SLIT_HALFWIDTH
    cut = w * np.sqrt(1 - w * w) + np.arcsin(w)
    assert get_domain("slit-disk").area_exact == pytest.approx(np.pi - cut)
    assert get_domain("cusp-exterior:2").area_exact == pytest.approx(2.0 / 3.0)
    assert get_domain("cusp-exterior:1.5").area_exact == pytest.approx(0.8)
    assert get_domain("cusp-interior:2").area_exact is None


def test_mc_area_matches_exact():
    for name in ("disk", "annulus", "slit-disk", "cusp-exterior:2"):
        d = get_domain(name)
        assert mc_area(d) == pytest.approx(d.area_exact, rel=5e-3)


def test_square_distance_exact():
    sq = get_domain("square")
    pts = np.array([[0.5, 0.5], [0.1, 0.4], [-0.3, 0.4], [1.2, 1.3], [0.5, -0.1]])
    want = np.array([0.5, 0.1, 0.3, np.hypot(0.2, 0.3), 0.1])
    np.testing.assert_allclose(sq.boundary_distance(pts), want, atol=1e-14)


def test_disk_distance_and_projection():
    disk = get_domain("disk")
    pts = np.array([[0.3, 0.0], [0.0, 0.99], [2.0, 0.0]])
    np.testing.assert_allclose(disk.boundary_distance(pts), [0.7, 0.01, 1.0], atol=1e-14)
    proj = disk.project_boundary(np.array([[3.0, 4.0]]))
    np.testing.assert_allclose(proj, [[0.6, 0.8]], atol=1e-14)


def test_slit_disk_sees_the_slit():
    sd = get_domain("slit-disk")
    w = SLIT_HALFWIDTH
    assert not sd.inside([[0.0, 0.5]])[0]            # on the slit
    assert sd.inside([[2 * w, 0.5]])[0]              # just beside it
    # distance from a point beside the slit is to the slit, not the rim
    d = sd.boundary_distance(np.array([[0.1, 0.5]]))
    assert d[0] == pytest.approx(0.1 - w, abs=1e-14)


def test_cusp_exterior_pinches():
    cu = get_domain("cusp-exterior:2")
    assert cu.inside([[0.5, 0.2]])[0]                # 0.2 < 0.25
    assert not cu.inside([[0.5, 0.3]])[0]
    assert not cu.inside([[-0.1, 0.0]])[0]           # nothing left of the tip


def test_cusp_interior_removes_horn():
    ci = get_domain("cusp-interior:2")
    assert not ci.inside([[0.5, 0.0]])[0]            # on the horn axis
    assert ci.inside([[0.5, 0.5]])[0]
    assert ci.inside([[-0.5, 0.0]])[0]               # left half untouched


def test_generic_cloud_distance_close_to_exact():
    # strip the closed form off the disk and exercise the cloud fallback
    exact = get_domain("disk")
    generic = ImplicitDomain("disk-generic", 2, exact.inside_fn, exact.bbox,
                             exact.diam_upper, exact.area_exact, None, None)
    pts = exact.interior_samples(64, seed=9)
    d_cloud = generic.boundary_distance(pts)
    d_true = exact.boundary_distance(pts)
    # cloud estimate can only overshoot, by at most the cloud spacing
    assert np.all(d_cloud >= d_true - 1e-12)
    assert np.max(d_cloud - d_true) < 0.02


def test_cloud_points_lie_on_boundary():
    ci = get_domain("cusp-interior:2")
    cloud = ci.boundary_cloud(1024)
    # within 1e-9, each cloud point has inside and outside neighbours
    rng = np.random.default_rng(2)
    dirs = rng.normal(size=(32, 2))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    hits_in = np.zeros(len(cloud), dtype=bool)
    hits_out = np.zeros(len(cloud), dtype=bool)
    for v in dirs:
        m = ci.inside(cloud + 1e-6 * v)
        hits_in |= m
        hits_out |= ~m
    assert hits_in.mean() > 0.99
    assert hits_out.mean() > 0.99


def test_box_and_ball_helpers():
    b = box_domain((0, 0, 0), (1, 2, 3))
    assert b.area_exact == pytest.approx(6.0)
    assert b.inside([[0.5, 1.0, 2.9]])[0]
    assert b.boundary_distance(np.array([[0.5, 1.0, 1.5]]))[0] == pytest.approx(0.5)
    s = ball_domain((1.0, 1.0), 2.0)
    assert s.inside([[1.0, 2.9]])[0]
    assert s.boundary_distance(np.array([[1.0, 1.0]]))[0] == pytest.approx(2.0)
