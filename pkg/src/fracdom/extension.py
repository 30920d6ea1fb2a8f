"""Whitney-average extension operators and their bound checks.

Two operators extend a grid function from a domain to an ambient ball
through a Whitney cover of the exterior:

* extend_E: outside the closure, Ef = sum_Q f_{B_Q*} phi_Q, where
  f_{B_Q*} is the volume-weighted node average over the reflected ball
  B(x_Q*, diam Q) cap Omega and {phi_Q} is the partition of unity of
  the cover.  Inside the domain Ef = f.  Exterior values are convex
  combinations of in-domain averages, so inf f <= Ef <= sup f.
* extend_E2: same partition, but each cube average is the mean of an
  ambient function e1 (typically extend_E output, or any callable on
  the ambient ball) over the stretched cube with diam = diam(Q)^(1/s).
  Stretched-cube probe points falling outside the ambient ball are
  clipped away with a warning.

Evaluation regions: "inside" (exact node value on lattice points,
multilinear interpolation elsewhere), "outside" (partition support),
"unresolved" (the thin layer near the boundary not reached by resolved
cubes; nearest-node fallback, excluded from every integral and charged
to error budgets instead).

Bound checks sample the extended function on an ambient lattice whose
spacing is an odd multiple of the base spacing and whose anchor is a
lattice translate of the base anchor, so ambient nodes that land in the
domain coincide with base nodes bit-exactly.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .domains import Ball, ImplicitDomain, ball_domain
from .grid import SUBGRID, GridFunction, ResolutionError
from .seminorm import ParameterError, gagliardo, lp_norm, w1p_seminorm
from .whitney import (DyadicCube, PartitionOfUnity, WhitneyCover,
                      default_root, partition_of_unity, reflect_centers,
                      stretched_cube, whitney_cover)

E2_PROBES = 4            # per-axis midpoint probes for stretched-cube means
NODE_MATCH_TOL = 1e-9    # |x - node| <= tol*h counts as exact node hit


# ----------------------------------------------------------------------
# averaging
# ----------------------------------------------------------------------

def cube_average(f: GridFunction, region: Union[Ball, DyadicCube]) -> float:
    """Volume-weighted mean of f over region cap Omega (node quadrature).

    Raises ResolutionError when the region holds no grid node: the cover
    is too fine for this grid and must be refined, not enlarged.
    """
    if isinstance(region, Ball):
        rows = f.nodes_in_ball(region.center, region.radius)
        what = f"ball(center={tuple(region.center)}, r={region.radius:.4g})"
    elif isinstance(region, DyadicCube):
        rows = f.nodes_in_ball(region.center, 0.5 * region.diam)
        rows = rows[region.contains(f.nodes[rows])]
        what = f"cube(level={region.level}, index={region.index})"
    else:
        raise ParameterError(f"region must be Ball or DyadicCube, got {type(region)}")
    if len(rows) == 0:
        raise ResolutionError(
            f"no grid node of {f.domain.name} (h={f.h:g}) inside {what}; "
            "refine the grid or coarsen the cover")
    w = f.weights[rows]
    # anchored mean: constants come out bit-exact, which downstream checks
    # (lhs = 0 for constant functions) rely on
    v0 = float(f.values[rows[0]])
    return v0 + float((w * (f.values[rows] - v0)).sum() / w.sum())


# ----------------------------------------------------------------------
# extended function
# ----------------------------------------------------------------------

@dataclass
class ExtendedFunction:
    """A grid function together with its Whitney-average extension."""
    base: GridFunction
    cover: WhitneyCover
    pou: PartitionOfUnity
    mode: str                       # "E" | "E2"
    cache: np.ndarray               # (n_cubes,) per-cube average
    ambient: Ball
    s: Optional[float] = None       # stretch exponent when mode == "E2"
    _diams: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.mode not in ("E", "E2"):
            raise ParameterError(f"mode must be 'E' or 'E2', got {self.mode!r}")
        if len(self.cache) != len(self.cover):
            raise ParameterError("one cached average per cube required")

    # -- evaluation ----------------------------------------------------
    def _eval_inside(self, pts: np.ndarray) -> np.ndarray:
        f = self.base
        cells = np.rint((pts - f.origin) / f.h - 0.5).astype(np.int64)
        rows = f.lookup_cells(cells)
        ok = rows >= 0
        exact = np.zeros(len(pts), dtype=bool)
        if ok.any():
            d = np.abs(pts[ok] - f.nodes[rows[ok]]).max(axis=1)
            exact[np.where(ok)[0][d <= NODE_MATCH_TOL * f.h]] = True
        out = np.empty(len(pts))
        out[exact] = f.values[rows[exact]]
        rest = ~exact
        if rest.any():
            out[rest] = f.interpolate(pts[rest])
        return out

    def _nearest_node_value(self, pts: np.ndarray) -> np.ndarray:
        f = self.base
        out = np.empty(len(pts))
        for s0 in range(0, len(pts), 1024):
            sl = slice(s0, min(s0 + 1024, len(pts)))
            d2 = ((pts[sl, None, :] - f.nodes[None, :, :]) ** 2).sum(-1)
            out[sl] = f.values[d2.argmin(axis=1)]
        return out

    def _eval_regions(self, pts) -> tuple[np.ndarray, np.ndarray]:
        """Values and region tags ('inside'|'outside'|'unresolved')."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        m = len(pts)
        values = np.empty(m)
        tags = np.full(m, "unresolved", dtype="<U10")
        ins = self.base.domain.inside(pts)
        if ins.any():
            values[ins] = self._eval_inside(pts[ins])
            tags[ins] = "inside"
        ext = ~ins
        if ext.any():
            sub = pts[ext]
            vals, rows, ids, total = self.pou.evaluate(sub)
            # anchored convex blend: subtract one participating average per
            # point, renormalise by the realised weight sum, and add it back.
            # Mathematically identical to sum(phi_i * avg_i), but constant
            # averages reproduce the constant bit-exactly.
            anchor = np.zeros(len(sub))
            anchor[rows] = self.cache[ids]
            num = np.bincount(rows, weights=vals * (self.cache[ids] - anchor[rows]),
                              minlength=len(sub))
            den = np.bincount(rows, weights=vals, minlength=len(sub))
            covered = total > 0.0
            combo = anchor + np.divide(num, den, out=np.zeros_like(num),
                                       where=covered)
            idx = np.where(ext)[0]
            values[idx[covered]] = combo[covered]
            tags[idx[covered]] = "outside"
            bad = idx[~covered]
            if len(bad):
                values[bad] = self._nearest_node_value(pts[bad])
        return values, tags

    def __call__(self, pts) -> np.ndarray:
        return self._eval_regions(pts)[0]

    def region_tags(self, pts) -> np.ndarray:
        return self._eval_regions(pts)[1]

    # -- export ----------------------------------------------------------
    def to_csv(self, h: float) -> str:
        """CSV grid over the ambient ball: coordinates, value, region tag."""
        if h <= 0:
            raise ParameterError("spacing h must be positive")
        c = np.asarray(self.ambient.center, dtype=float)
        r = self.ambient.radius
        n = len(c)
        counts = int(math.ceil(2.0 * r / h))
        axes = [np.arange(counts)] * n
        cells = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, n)
        centers = (c - r) + (cells + 0.5) * h
        keep = self.ambient.contains(centers)
        centers = centers[keep]
        values, tags = self._eval_regions(centers)
        cols = [f"x{a+1}" for a in range(n)] + ["value", "region"]
        lines = [",".join(cols)]
        for x, v, t in zip(centers, values, tags):
            lines.append(",".join([f"{a:.12g}" for a in x] + [f"{v:.12g}", t]))
        return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# operator construction
# ----------------------------------------------------------------------

def ambient_cover(domain: ImplicitDomain, h: float,
                  root: Optional[Ball] = None) -> WhitneyCover:
    """Whitney cover of the exterior, resolution-matched to grid spacing h.

    The maximum level is chosen so the smallest cube side is at least 4h,
    which keeps every averaging ball B(x_Q*, diam Q) populated with grid
    nodes.
    """
    if h <= 0:
        raise ParameterError("spacing h must be positive")
    root = root or default_root(domain)
    frame = 2.0 * root.radius
    max_level = max(1, min(12, int(math.floor(math.log2(frame / (4.0 * h))))))
    cover = whitney_cover(domain, root=root, max_level=max_level)
    return reflect_centers(cover, domain)


def extend_E(f: GridFunction, cover: Optional[WhitneyCover] = None
             ) -> ExtendedFunction:
    """First Whitney-average extension: cube averages over reflected balls."""
    if cover is None:
        cover = ambient_cover(f.domain, f.h)
    if cover.reflected_centers is None:
        reflect_centers(cover, f.domain)
    cache = np.empty(len(cover))
    for i, q in enumerate(cover.cubes):
        ball = Ball(tuple(cover.reflected_centers[i]), q.diam)
        try:
            cache[i] = cube_average(f, ball)
        except ResolutionError as exc:
            raise ResolutionError(
                f"averaging ball of cube level={q.level} index={q.index} "
                f"is empty at h={f.h:g}: {exc}") from None
    return ExtendedFunction(f, cover, partition_of_unity(cover), "E",
                            cache, cover.root_box)


def extend_E2(f: GridFunction,
              e1: Union[ExtendedFunction, Callable, None] = None,
              s: float = 0.9,
              cover: Optional[WhitneyCover] = None) -> ExtendedFunction:
    """Second extension: means of e1 over stretched cubes diam(Q)^(1/s).

    e1 must be defined on the whole ambient ball; by default the first
    extension of f is built and used.  Any callable on point arrays works,
    so manufactured analytic extensions can be injected.
    """
    if not 0.0 < s < 1.0:
        raise ParameterError(f"stretch exponent must lie in (0,1), got {s}")
    if isinstance(e1, ExtendedFunction):
        cover = cover or e1.cover
    if e1 is None:
        e1 = extend_E(f, cover)
        cover = e1.cover
    if cover is None:
        cover = ambient_cover(f.domain, f.h)
    if cover.reflected_centers is None:
        reflect_centers(cover, f.domain)
    ball = cover.root_box
    offs = (np.stack(np.meshgrid(*[np.arange(E2_PROBES)] * cover.dim,
                                 indexing="ij"), -1)
            .reshape(-1, cover.dim) + 0.5) / E2_PROBES
    cache = np.empty(len(cover))
    clipped = 0
    for i, q in enumerate(cover.cubes):
        qs = stretched_cube(q, s)
        pts = np.asarray(qs.lo) + offs * qs.side
        keep = ball.contains(pts)
        if not keep.all():
            clipped += 1
            if not keep.any():
                # fully escaped: fall back to the ball-projected center
                ctr = np.asarray(ball.center, dtype=float)
                v = qs.center - ctr
                pts = (ctr + v / np.linalg.norm(v) * 0.999 * ball.radius)[None, :]
                keep = np.array([True])
        v = np.asarray(e1(pts[keep]), dtype=float).ravel()
        cache[i] = float(v[0]) + float(np.mean(v - v[0]))
    if clipped:
        warnings.warn(
            f"{clipped} stretched cube(s) clipped to the ambient ball",
            RuntimeWarning, stacklevel=2)
    return ExtendedFunction(f, cover, partition_of_unity(cover), "E2",
                            cache, ball, s=s)


# ----------------------------------------------------------------------
# ambient sampling
# ----------------------------------------------------------------------

def ambient_grid(ext: ExtendedFunction, factor: int = 3) -> GridFunction:
    """Sample the extension on a ball-wide lattice aligned with the base.

    `factor` must be odd so that ambient nodes falling inside the domain
    coincide bit-exactly with base grid nodes.  Unresolved-layer nodes are
    dropped and their volume charged to the grid's excluded_volume, which
    every downstream quadrature treats as an error contribution.
    """
    if factor < 1 or factor % 2 == 0:
        raise ParameterError(f"alignment needs an odd factor, got {factor}")
    f = ext.base
    h2 = factor * f.h
    n = f.dim
    c = np.asarray(ext.ambient.center, dtype=float)
    r = ext.ambient.radius
    bdom = ball_domain(tuple(c), r, name=f"ambient({f.domain.name})")
    # anchor: translate the base origin down by whole ambient cells
    shift = np.ceil((f.origin - (c - r)) / h2 - 1e-12).astype(np.int64)
    origin = f.origin - shift * h2
    counts = np.ceil(((c + r) - origin) / h2 - 1e-12).astype(np.int64)
    cells = np.stack(np.meshgrid(*[np.arange(k) for k in counts],
                                 indexing="ij"), -1).reshape(-1, n)
    centers = origin + (cells + 0.5) * h2
    ins = bdom.inside(centers)
    bd = bdom.boundary_distance(centers)
    half_diag = 0.5 * h2 * math.sqrt(n)
    weights = np.where(ins, float(h2 ** n), 0.0)
    cut = bd < half_diag
    rows = np.where(cut)[0]
    if len(rows):
        offs = (np.stack(np.meshgrid(*[np.arange(SUBGRID)] * n,
                                     indexing="ij"), -1)
                .reshape(-1, n) + 0.5) / SUBGRID
        sub = centers[rows][:, None, :] - 0.5 * h2 + offs[None, :, :] * h2
        frac = bdom.inside(sub.reshape(-1, n)).reshape(len(rows), -1).mean(1)
        weights[rows] = frac * h2 ** n
    excluded = float(weights[~ins].sum())

    keep = ins
    values, tags = ext._eval_regions(centers[keep])
    resolved = tags != "unresolved"
    dropped = float(weights[keep][~resolved].sum())
    sel = np.where(keep)[0][resolved]
    return GridFunction(bdom, h2, centers[sel], values[resolved],
                        weights[sel], cells[sel], origin,
                        excluded + dropped)


# ----------------------------------------------------------------------
# bound checks
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class BoundReport:
    """lhs <= C * rhs surrogate: both sides plus their ratio and errors."""
    lhs: float
    rhs: float
    ratio: float
    lhs_err: float
    rhs_err: float
    p: float
    s: Optional[float] = None

    def astuple(self):
        return (self.lhs, self.rhs, self.ratio)


def _ratio(lhs: float, rhs: float) -> float:
    if rhs > 0.0:
        return lhs / rhs
    return 0.0 if lhs == 0.0 else math.inf


def fractional_bound_check(f: GridFunction, s: float, p: float,
                           ext: Optional[ExtendedFunction] = None,
                           factor: int = 3, workers: int = 1) -> BoundReport:
    """Gagliardo energy of Ef over the ambient ball vs that of f over the
    domain; their ratio is the fractional-norm boundedness surrogate."""
    if ext is None:
        ext = extend_E(f)
    amb = ambient_grid(ext, factor=factor)
    lhs = gagliardo(amb, s, p, workers=workers)
    rhs = gagliardo(f, s, p, workers=workers)
    return BoundReport(lhs.value, rhs.value, _ratio(lhs.value, rhs.value),
                       lhs.err_est, rhs.err_est, p, s)


def gradient_bound_check(f: GridFunction, s: float, p: float,
                         e1: Union[ExtendedFunction, Callable, None] = None,
                         factor: int = 3) -> BoundReport:
    """L^p norm of grad(E2 f) outside the closure vs grad(f) inside.

    The gradient is taken by central differences at exterior ambient nodes
    whose full stencil stays in the resolved exterior; the volume of the
    skipped exterior layer enters lhs_err.
    """
    ext2 = extend_E2(f, e1, s)
    amb = ambient_grid(ext2, factor=factor)
    tags = ext2.region_tags(amb.nodes)
    outside = tags == "outside"
    ok = outside.copy()
    diffs = np.zeros((len(amb.nodes), amb.dim))
    for a in range(amb.dim):
        e = np.zeros(amb.dim, dtype=np.int64)
        e[a] = 1
        up = amb.lookup_cells(amb.cells + e)
        dn = amb.lookup_cells(amb.cells - e)
        good = (up >= 0) & (dn >= 0)
        ok &= good
        ok[good] &= outside[up[good]] & outside[dn[good]]
        diffs[good, a] = (amb.values[up[good]] - amb.values[dn[good]]) / (2 * amb.h)
    gnorm_p = (diffs[ok] ** 2).sum(axis=1) ** (p / 2.0)
    lhs_pow = float((gnorm_p * amb.weights[ok]).sum())
    skipped_vol = float(amb.weights[outside & ~ok].sum()) + amb.excluded_volume
    peak = float(gnorm_p.max()) if len(gnorm_p) else 0.0
    lhs = lhs_pow ** (1.0 / p)
    lhs_err = (skipped_vol * peak) ** (1.0 / p)
    rhs = w1p_seminorm(f, p)
    return BoundReport(lhs, rhs.value, _ratio(lhs, rhs.value),
                       lhs_err, rhs.err_est, p, s)


def lp_bound_check(f: GridFunction, p: float,
                   ext: Optional[ExtendedFunction] = None,
                   factor: int = 3) -> BoundReport:
    """L^p norm of Ef over the ambient ball vs that of f over the domain."""
    if ext is None:
        ext = extend_E(f)
    amb = ambient_grid(ext, factor=factor)
    lhs = lp_norm(amb, p)
    rhs = lp_norm(f, p)
    return BoundReport(lhs.value, rhs.value, _ratio(lhs.value, rhs.value),
                       lhs.err_est, rhs.err_est, p)
