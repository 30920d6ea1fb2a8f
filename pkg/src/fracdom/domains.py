"""Implicit domain catalog.

Domains are membership predicates over R^n plus a bounding box and a
certified upper bound on the diameter.  Boundary geometry is recovered
numerically: a seeded point cloud on the boundary (bisection between
inside/outside probe pairs) backs a distance-to-boundary estimator, and
catalog entries override it with closed forms where one exists.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

BISECT_ITERS = 40          # ~1e-12 relative localization of a crossing
DEFAULT_CLOUD = 8192       # boundary sample cloud size


@dataclass(frozen=True)
class Box:
    """Axis-aligned box, lo/hi given per axis."""
    lo: tuple
    hi: tuple

    @property
    def dim(self):
        return len(self.lo)

    @property
    def center(self):
        return (np.asarray(self.lo) + np.asarray(self.hi)) / 2.0

    @property
    def widths(self):
        return np.asarray(self.hi) - np.asarray(self.lo)

    def contains(self, pts):
        pts = np.atleast_2d(pts)
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return np.all((pts >= lo) & (pts <= hi), axis=1)

    @property
    def diam(self):
        return float(np.linalg.norm(self.widths))


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    @property
    def dim(self):
        return len(self.center)

    def contains(self, pts):
        pts = np.atleast_2d(pts)
        return np.sum((pts - np.asarray(self.center)) ** 2, axis=1) <= self.radius**2


class DomainError(ValueError):
    pass


@dataclass
class ImplicitDomain:
    """Open set given by a vectorized membership predicate.

    inside(pts) maps an (m, dim) array to an (m,) bool array.  area_exact
    is the Lebesgue measure when a closed form is known, else None.
    """
    name: str
    dim: int
    inside_fn: Callable[[np.ndarray], np.ndarray]
    bbox: Box
    diam_upper: float
    area_exact: Optional[float] = None
    # closed-form distance to the boundary (unsigned); falls back to cloud
    bdist_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    # closed-form projection onto closure(Omega); falls back to cloud
    project_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    _cloud: Optional[np.ndarray] = field(default=None, repr=False)
    _cloud_gap: Optional[float] = field(default=None, repr=False)

    def inside(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if pts.shape[1] != self.dim:
            raise DomainError(f"points have dim {pts.shape[1]}, domain {self.name} has dim {self.dim}")
        return self.inside_fn(pts)

    # ------------------------------------------------------------------
    # boundary machinery
    # ------------------------------------------------------------------
    def boundary_cloud(self, m: int = DEFAULT_CLOUD, seed: int = 7) -> np.ndarray:
        """Deterministic point cloud on the boundary.

        Pairs one inside sample with one outside sample and bisects the
        connecting segment.  Cached after the first call.
        """
        if self._cloud is not None and len(self._cloud) >= m:
            return self._cloud[:m]
        rng = np.random.default_rng([seed, 0xB0D])
        lo = np.asarray(self.bbox.lo)
        wid = self.bbox.widths
        pad = 0.25 * float(np.max(wid))
        ins = _rejection_sample(self, m, rng)
        # outside anchors: ring of the padded bbox
        out = lo - pad + rng.random((m, self.dim)) * (wid + 2 * pad)
        bad = self.inside(out)
        tries = 0
        while np.any(bad):
            out[bad] = lo - pad + rng.random((int(bad.sum()), self.dim)) * (wid + 2 * pad)
            bad = self.inside(out)
            tries += 1
            if tries > 200:
                raise DomainError(f"cannot sample outside points for {self.name}")
        pts = _bisect_to_boundary(self, ins, out)
        self._cloud = pts
        return pts

    def boundary_distance(self, pts) -> np.ndarray:
        """Unsigned distance to the boundary of the domain.

        Closed form when available; otherwise min over the boundary cloud,
        refined by bisecting the segment toward the nearest cloud point.
        The result never undershoots the true distance and overshoots by
        at most distance_slack().
        """
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.bdist_fn is not None:
            return self.bdist_fn(pts)
        _, d = self._cloud_project(pts)
        return d

    def project_boundary(self, pts) -> np.ndarray:
        """Nearest boundary point (approximate in the generic case)."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.project_fn is not None:
            return self.project_fn(pts)
        z, _ = self._cloud_project(pts)
        return z

    def _cloud_project(self, pts):
        """Cloud-based boundary projection: nearest cloud point, refined by
        bisecting the crossing on the segment from the query past it."""
        cloud = self.boundary_cloud()
        idx = _argmin_dist_chunked(pts, cloud)
        near = cloud[idx]
        ends = pts + 1.05 * (near - pts)     # extend past the crossing
        cross = self.inside(pts) != self.inside(ends)
        z = near.copy()
        if np.any(cross):
            a, b = pts[cross].copy(), ends[cross].copy()
            side_a = self.inside(a)
            for _ in range(BISECT_ITERS):
                mid = 0.5 * (a + b)
                same = self.inside(mid) == side_a
                a[same] = mid[same]
                b[~same] = mid[~same]
            zc = 0.5 * (a + b)
            # keep the crossing only where it beats the raw cloud point
            better = np.linalg.norm(pts[cross] - zc, axis=1) \
                < np.linalg.norm(pts[cross] - near[cross], axis=1)
            zc[~better] = near[cross][~better]
            z[cross] = zc
        return z, np.linalg.norm(pts - z, axis=1)

    def distance_slack(self) -> float:
        """Upper bound on boundary_distance overshoot (0 for closed forms)."""
        if self.bdist_fn is not None:
            return 0.0
        if self._cloud_gap is None:
            cloud = self.boundary_cloud()
            nn = _nearest_neighbor_dist(cloud)
            self._cloud_gap = 2.0 * float(nn.max())
        return self._cloud_gap

    def interior_samples(self, m: int, seed: int = 11) -> np.ndarray:
        rng = np.random.default_rng([seed, 0x1A])
        return _rejection_sample(self, m, rng)


def _rejection_sample(dom: ImplicitDomain, m: int, rng) -> np.ndarray:
    lo = np.asarray(dom.bbox.lo)
    wid = dom.bbox.widths
    out = np.empty((0, dom.dim))
    tries = 0
    while len(out) < m:
        cand = lo + rng.random((4 * m, dom.dim)) * wid
        keep = cand[dom.inside(cand)]
        out = np.vstack([out, keep])
        tries += 1
        if tries > 400:
            raise DomainError(f"interior of {dom.name} too thin for rejection sampling")
    return out[:m]


def _bisect_to_boundary(dom: ImplicitDomain, ins: np.ndarray, out: np.ndarray) -> np.ndarray:
    a, b = ins.copy(), out.copy()   # invariant: a inside, b outside
    for _ in range(BISECT_ITERS):
        mid = 0.5 * (a + b)
        im = dom.inside(mid)
        a[im] = mid[im]
        b[~im] = mid[~im]
    return 0.5 * (a + b)


def _min_dist_chunked(pts, cloud, chunk=512):
    d = np.empty(len(pts))
    for i in range(0, len(pts), chunk):
        blk = pts[i:i + chunk]
        d[i:i + chunk] = np.sqrt(
            ((blk[:, None, :] - cloud[None, :, :]) ** 2).sum(-1)).min(axis=1)
    return d


def _argmin_dist_chunked(pts, cloud, chunk=512):
    idx = np.empty(len(pts), dtype=np.int64)
    for i in range(0, len(pts), chunk):
        blk = pts[i:i + chunk]
        idx[i:i + chunk] = (
            ((blk[:, None, :] - cloud[None, :, :]) ** 2).sum(-1)).argmin(axis=1)
    return idx


def _nearest_neighbor_dist(cloud, chunk=512):
    nn = np.empty(len(cloud))
    for i in range(0, len(cloud), chunk):
        blk = cloud[i:i + chunk]
        d2 = ((blk[:, None, :] - cloud[None, :, :]) ** 2).sum(-1)
        rows = np.arange(len(blk))
        d2[rows, i + rows] = np.inf     # exclude self
        nn[i:i + chunk] = np.sqrt(d2.min(axis=1))
    return nn


# ----------------------------------------------------------------------
# catalog
# ----------------------------------------------------------------------

def _interval():
    def ins(p):
        return (p[:, 0] > 0.0) & (p[:, 0] < 1.0)
    def bd(p):
        x = p[:, 0]
        return np.minimum(np.abs(x), np.abs(1.0 - x))
    def proj(p):
        return np.where(p[:, [0]] < 0.5, 0.0, 1.0)
    return ImplicitDomain("interval", 1, ins, Box((0.0,), (1.0,)), 1.0, 1.0, bd, proj)


def _disk():
    def ins(p):
        return (p ** 2).sum(1) < 1.0
    def bd(p):
        return np.abs(1.0 - np.sqrt((p ** 2).sum(1)))
    def proj(p):
        r = np.sqrt((p ** 2).sum(1, keepdims=True))
        u = np.divide(p, r, out=np.zeros_like(p), where=r > 0)
        u[(r == 0).ravel()] = (1.0, 0.0)    # center: deterministic ray
        return u
    return ImplicitDomain("disk", 2, ins, Box((-1.0, -1.0), (1.0, 1.0)), 2.0, np.pi, bd, proj)


def _square():
    def ins(p):
        return np.all((p > 0.0) & (p < 1.0), axis=1)
    def bd(p):
        # exact unsigned distance to the boundary of (0,1)^2
        q = np.maximum(np.maximum(-p, p - 1.0), 0.0)   # per-axis outside excess
        outside = np.sqrt((q ** 2).sum(1))
        inner = np.minimum(p, 1.0 - p).min(axis=1)
        return np.where(outside > 0, outside, np.maximum(inner, 0.0))
    def proj(p):
        return np.clip(p, 0.0, 1.0)
    return ImplicitDomain("square", 2, ins, Box((0.0, 0.0), (1.0, 1.0)),
                          float(np.sqrt(2.0)), 1.0, bd, proj)


def _annulus(r0=0.5, r1=1.0):
    def ins(p):
        r2 = (p ** 2).sum(1)
        return (r2 > r0 * r0) & (r2 < r1 * r1)
    def bd(p):
        r = np.sqrt((p ** 2).sum(1))
        return np.minimum(np.abs(r - r0), np.abs(r1 - r))
    def proj(p):
        r = np.sqrt((p ** 2).sum(1, keepdims=True))
        u = np.divide(p, r, out=np.zeros_like(p), where=r > 0)
        u[(r == 0).ravel()] = (1.0, 0.0)    # center: deterministic ray
        tgt = np.where(np.abs(r - r0) < np.abs(r1 - r), r0, r1)
        return u * tgt
    return ImplicitDomain("annulus", 2, ins, Box((-r1, -r1), (r1, r1)),
                          2.0 * r1, np.pi * (r1**2 - r0**2), bd, proj)


SLIT_HALFWIDTH = 0.01   # physical slit so grids and line probes can see it


def _slit_disk(w=SLIT_HALFWIDTH):
    # unit disk minus the closed strip |x| <= w, 0 <= y <= 1
    def ins(p):
        in_disk = (p ** 2).sum(1) < 1.0
        in_slit = (np.abs(p[:, 0]) <= w) & (p[:, 1] >= 0.0) & (p[:, 1] <= 1.0)
        return in_disk & ~in_slit
    def bd(p):
        r = np.sqrt((p ** 2).sum(1))
        d_circle = np.abs(1.0 - r)
        # distance to the slit rectangle [-w,w] x [0,1]
        dx = np.maximum(np.abs(p[:, 0]) - w, 0.0)
        dy = np.maximum(np.maximum(-p[:, 1], p[:, 1] - 1.0), 0.0)
        d_slit = np.sqrt(dx ** 2 + dy ** 2)
        return np.minimum(d_circle, d_slit)
    # removed area: cross-section of the strip with the disk
    cut = 2.0 * (w * np.sqrt(1 - w * w) / 2.0 + np.arcsin(w) / 2.0)  # int_{-w}^{w} sqrt(1-x^2) dx
    return ImplicitDomain("slit-disk", 2, ins, Box((-1.0, -1.0), (1.0, 1.0)),
                          2.0, np.pi - cut, bd, None)


def _nearest_curve_param(q: np.ndarray, lam: float, t_hi: float = 1.0):
    """Parameter of the nearest point on {(t, t^lam): 0 <= t <= t_hi}.

    Queries q are (m, 2) with q[:, 1] >= 0.  Dense bracketing grid followed
    by vectorized ternary refinement; deterministic.
    """
    a, b = q[:, 0], q[:, 1]
    out = np.empty(len(q))
    for s0 in range(0, len(q), 8192):
        sl = slice(s0, min(s0 + 8192, len(q)))
        t = np.linspace(0.0, t_hi, 257)
        d2 = (t[None, :] - a[sl, None]) ** 2 + (t[None, :] ** lam - b[sl, None]) ** 2
        k = np.argmin(d2, axis=1)
        lo = np.maximum(k - 1, 0) * (t_hi / 256.0)
        hi = np.minimum(k + 1, 256) * (t_hi / 256.0)
        for _ in range(100):
            m1 = lo + (hi - lo) / 3.0
            m2 = hi - (hi - lo) / 3.0
            f1 = (m1 - a[sl]) ** 2 + (m1 ** lam - b[sl]) ** 2
            f2 = (m2 - a[sl]) ** 2 + (m2 ** lam - b[sl]) ** 2
            take = f1 < f2
            hi = np.where(take, m2, hi)
            lo = np.where(take, lo, m1)
        out[sl] = 0.5 * (lo + hi)
    return out


def _cusp_exterior(lam: float):
    # power horn {0 < x < 1, |y| < x^lam}; outward-pointing cusp at the origin
    if lam < 1.0:
        raise DomainError("cusp exponent must be >= 1")
    def ins(p):
        x, y = p[:, 0], p[:, 1]
        # clip before the power so negative x never reaches ** (nan warnings)
        return (x > 0.0) & (x < 1.0) & (np.abs(y) < np.clip(x, 0.0, 1.0) ** lam)
    def proj(p):
        x, y = p[:, 0], p[:, 1]
        sy = np.where(y >= 0.0, 1.0, -1.0)
        t = _nearest_curve_param(np.stack([x, np.abs(y)], 1), lam)
        side = np.stack([t, sy * t ** lam], axis=1)         # horn-side branch
        lid = np.stack([np.ones_like(x), np.clip(y, -1.0, 1.0)], axis=1)
        closer = ((side - p) ** 2).sum(1) <= ((lid - p) ** 2).sum(1)
        return np.where(closer[:, None], side, lid)
    area = 2.0 / (lam + 1.0)   # int_0^1 2 x^lam dx
    return ImplicitDomain(f"cusp-exterior:{lam:g}", 2, ins,
                          Box((0.0, -1.0), (1.0, 1.0)), 2.0, area, None, proj)


def _cusp_interior(lam: float):
    # unit disk minus the closed horn {x >= 0, |y| <= x^lam}: the removed
    # spike pinches to zero width at the origin, inside the disk
    if lam < 1.0:
        raise DomainError("cusp exponent must be >= 1")
    def ins(p):
        x, y = p[:, 0], p[:, 1]
        in_disk = (x * x + y * y) < 1.0
        in_horn = (x >= 0.0) & (np.abs(y) <= np.clip(x, 0.0, 1.0) ** lam)
        return in_disk & ~in_horn
    return ImplicitDomain(f"cusp-interior:{lam:g}", 2, ins,
                          Box((-1.0, -1.0), (1.0, 1.0)), 2.0, None, None, None)


def box_domain(lo, hi, name="box"):
    """Open axis-aligned box as an ImplicitDomain (any dim)."""
    lo_t, hi_t = tuple(map(float, lo)), tuple(map(float, hi))
    n = len(lo_t)
    loa, hia = np.asarray(lo_t), np.asarray(hi_t)
    def ins(p):
        return np.all((p > loa) & (p < hia), axis=1)
    def bd(p):
        q = np.maximum(np.maximum(loa - p, p - hia), 0.0)
        outside = np.sqrt((q ** 2).sum(1))
        inner = np.minimum(p - loa, hia - p).min(axis=1)
        return np.where(outside > 0, outside, np.maximum(inner, 0.0))
    def proj(p):
        return np.clip(p, loa, hia)
    vol = float(np.prod(hia - loa))
    return ImplicitDomain(name, n, ins, Box(lo_t, hi_t),
                          float(np.linalg.norm(hia - loa)), vol, bd, proj)


def ball_domain(center, radius, name="ball"):
    c = np.asarray(center, dtype=float)
    n = len(c)
    def ins(p):
        return ((p - c) ** 2).sum(1) < radius**2
    def bd(p):
        return np.abs(radius - np.sqrt(((p - c) ** 2).sum(1)))
    def proj(p):
        v = p - c
        r = np.sqrt((v ** 2).sum(1, keepdims=True))
        r = np.where(r == 0, radius, r)
        return c + v / r * radius
    vol = np.pi * radius**2 if n == 2 else (2.0 * radius if n == 1 else 4.0 / 3.0 * np.pi * radius**3)
    return ImplicitDomain(name, n, ins,
                          Box(tuple(c - radius), tuple(c + radius)),
                          2.0 * radius, vol, bd, proj)


def restricted_domain(domain: ImplicitDomain, ball: Ball) -> ImplicitDomain:
    """The open intersection Omega cap B as a new implicit domain.

    The distance estimate min(dist to bd Omega, dist to the sphere) is a
    lower bound for the true boundary distance (the intersection boundary
    is a subset of the union of the two), which is the safe direction for
    every consumer (cut-cell detection, pruning, near-field fast paths).
    """
    c = np.asarray(ball.center, dtype=float)
    r = float(ball.radius)
    lo = np.maximum(domain.bbox.lo, c - r)
    hi = np.minimum(domain.bbox.hi, c + r)
    if np.any(lo >= hi):
        raise DomainError("ball does not meet the domain bounding box")

    def ins(p):
        return domain.inside(p) & (((p - c) ** 2).sum(1) < r * r)

    def bd(p):
        shell = np.abs(r - np.sqrt(((p - c) ** 2).sum(1)))
        return np.minimum(domain.boundary_distance(p), shell)

    return ImplicitDomain(f"{domain.name}|ball", domain.dim, ins,
                          Box(tuple(lo), tuple(hi)),
                          min(domain.diam_upper, 2.0 * r), None, bd, None)


def get_domain(name: str) -> ImplicitDomain:
    """Parse a catalog name: disk, square, interval, annulus, slit-disk,
    cusp-interior:<lam>, cusp-exterior:<lam>."""
    base, _, arg = name.partition(":")
    if base == "interval":
        return _interval()
    if base == "disk":
        return _disk()
    if base == "square":
        return _square()
    if base == "annulus":
        return _annulus()
    if base == "slit-disk":
        return _slit_disk()
    if base == "cusp-exterior":
        return _cusp_exterior(float(arg or 2.0))
    if base == "cusp-interior":
        return _cusp_interior(float(arg or 2.0))
    raise DomainError(f"unknown domain {name!r}")


CATALOG = ("interval", "disk", "square", "annulus", "slit-disk",
           "cusp-interior:2", "cusp-exterior:1.5", "cusp-exterior:2")
