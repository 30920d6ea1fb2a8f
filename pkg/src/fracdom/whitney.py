"""Whitney cube covers of open sets, with a Lipschitz partition of unity.

The cover tiles an open set U by dyadic cubes whose side is comparable to
their distance from the complement.  Two modes:

* region="complement": U = R^n \\ closure(Omega), truncated to cubes that
  meet the root ball.  This is the cover the extension operators use.
* region="interior":  U = Omega itself.

Acceptance rule (classic Stein construction): a candidate cube Q is kept
iff its side is at most root_radius/8 and

    dist(center(Q), complement of U) >= (min_ratio + 1/2) * diam(Q),

which guarantees dist(Q, complement) >= min_ratio * diam(Q); rejected
cubes subdivide.  With min_ratio = 1 every kept cube satisfies

    diam(Q) <= dist(Q, complement) < 3.5 * diam(Q)   (window cubes),

and the side cap makes diam(Q) < 1 whenever the root ball has radius 4.
Cells still unresolved at max_level form a boundary collar that is
reported (count and volume), never silently dropped.

Distances are evaluated in one vectorized call per dyadic level, so the
construction is deterministic and cheap even when the domain's boundary
distance comes from a point cloud.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .domains import Ball, DomainError, ImplicitDomain

MIN_RATIO = 1.0          # dist(Q, complement) >= MIN_RATIO * diam(Q)
SIDE_CAP_FRACTION = 8.0  # largest cube side = root_radius / 8


class CoverError(ValueError):
    pass


@dataclass(frozen=True)
class DyadicCube:
    """Closed dyadic cube: side = frame_side * 2^-level, lo = origin + index*side.

    level = -1 marks a synthetic (non-dyadic) cube, e.g. from stretched_cube.
    """
    level: int
    index: tuple
    lo: tuple
    side: float

    @property
    def dim(self):
        return len(self.lo)

    @property
    def hi(self):
        return tuple(l + self.side for l in self.lo)

    @property
    def center(self):
        return np.asarray(self.lo) + 0.5 * self.side

    @property
    def diam(self):
        return self.side * float(np.sqrt(self.dim))

    def dilate(self, factor: float) -> "DyadicCube":
        """Cube with the same center and side scaled by factor (closed)."""
        new_side = factor * self.side
        lo = tuple(self.center - 0.5 * new_side)
        return DyadicCube(-1, (), lo, new_side)

    def contains(self, pts) -> np.ndarray:
        pts = np.atleast_2d(pts)
        lo = np.asarray(self.lo)
        return np.all((pts >= lo) & (pts <= lo + self.side), axis=1)

    def point_distance(self, x) -> float:
        """Euclidean distance from a point to this (closed) cube."""
        x = np.asarray(x, dtype=float)
        lo = np.asarray(self.lo)
        d = np.maximum(np.maximum(lo - x, x - (lo + self.side)), 0.0)
        return float(np.linalg.norm(d))

    def sample(self, m: int, rng) -> np.ndarray:
        return np.asarray(self.lo) + rng.random((m, self.dim)) * self.side


def stretched_cube(q: DyadicCube, s: float) -> DyadicCube:
    """Cube with the same center and diam = diam(q)^(1/s) (not dyadic)."""
    if not 0.0 < s < 1.0:
        raise ValueError(f"stretch exponent must lie in (0,1), got {s}")
    new_diam = q.diam ** (1.0 / s)
    new_side = new_diam / float(np.sqrt(q.dim))
    lo = tuple(q.center - 0.5 * new_side)
    return DyadicCube(-1, (), lo, new_side)


@dataclass
class WhitneyCover:
    cubes: List[DyadicCube]
    root_box: Ball
    frame_origin: np.ndarray
    frame_side: float
    dim: int
    region: str
    min_ratio: float
    max_level: int
    unresolved: List[DyadicCube]
    domain_name: str
    reflected_centers: Optional[np.ndarray] = None   # (N, dim), filled by reflect_centers
    _level_tables: dict = field(default_factory=dict, repr=False)

    # ------------------------------------------------------------------
    def __len__(self):
        return len(self.cubes)

    @property
    def levels(self):
        return sorted({q.level for q in self.cubes})

    def side_at(self, level: int) -> float:
        return self.frame_side / (1 << level)

    @property
    def unresolved_volume(self) -> float:
        return sum(q.side**q.dim for q in self.unresolved)

    # -- lattice lookup -------------------------------------------------
    def _table(self, level: int):
        """Sorted linear keys of cube indices at a level, plus cube positions."""
        if level not in self._level_tables:
            idx = [i for i, q in enumerate(self.cubes) if q.level == level]
            n_cells = 1 << level
            keys = np.array([_linear_key(self.cubes[i].index, n_cells) for i in idx],
                            dtype=np.int64)
            order = np.argsort(keys)
            self._level_tables[level] = (keys[order], np.asarray(idx)[order])
        return self._level_tables[level]

    def locate(self, pts) -> np.ndarray:
        """Index of the cover cube containing each point, or -1."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        out = np.full(len(pts), -1, dtype=np.int64)
        for level in self.levels:
            side = self.side_at(level)
            cell = np.floor((pts - self.frame_origin) / side).astype(np.int64)
            n_cells = 1 << level
            ok = np.all((cell >= 0) & (cell < n_cells), axis=1) & (out < 0)
            if not ok.any():
                continue
            keys, pos = self._table(level)
            k = _linear_key_arr(cell[ok], n_cells)
            j = np.searchsorted(keys, k)
            hit = (j < len(keys)) & (keys[np.minimum(j, len(keys) - 1)] == k)
            tgt = np.where(ok)[0][hit]
            out[tgt] = pos[j[hit]]
        return out

    def count_dilated(self, pts, factor: float) -> np.ndarray:
        """For each point, the number of cover cubes Q with x in factor*Q."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        counts = np.zeros(len(pts), dtype=np.int64)
        # |x - c_R|_inf <= factor*side/2 reaches cells up to (factor+1)/2 away
        reach = int(np.ceil((factor + 1.0) / 2.0))
        offsets = list(itertools.product(range(-reach, reach + 1), repeat=self.dim))
        for level in self.levels:
            side = self.side_at(level)
            base = np.floor((pts - self.frame_origin) / side).astype(np.int64)
            n_cells = 1 << level
            keys, pos = self._table(level)
            if len(keys) == 0:
                continue
            centers_local = (pts - self.frame_origin) / side  # in cell units
            for off in offsets:
                cell = base + np.asarray(off, dtype=np.int64)
                ok = np.all((cell >= 0) & (cell < n_cells), axis=1)
                if not ok.any():
                    continue
                k = _linear_key_arr(cell[ok], n_cells)
                j = np.searchsorted(keys, k)
                hit = (j < len(keys)) & (keys[np.minimum(j, len(keys) - 1)] == k)
                if not hit.any():
                    continue
                rows = np.where(ok)[0][hit]
                # membership in factor*Q: |x - c|_inf <= factor*side/2
                cctr = cell[ok][hit] + 0.5
                inside = np.all(np.abs(centers_local[rows] - cctr) <= factor / 2.0, axis=1)
                counts[rows[inside]] += 1
        return counts

    # -- serialization ---------------------------------------------------
    def to_json(self) -> str:
        cubes = []
        for i, q in enumerate(self.cubes):
            rec = {"level": q.level, "index": list(q.index),
                   "lo": [float(v) for v in q.lo], "side": q.side}
            if self.reflected_centers is not None:
                rec["xstar"] = [float(v) for v in self.reflected_centers[i]]
            cubes.append(rec)
        doc = {
            "domain": self.domain_name,
            "region": self.region,
            "root_center": [float(v) for v in self.root_box.center],
            "root_radius": self.root_box.radius,
            "frame_origin": [float(v) for v in self.frame_origin],
            "frame_side": self.frame_side,
            "min_ratio": self.min_ratio,
            "max_level": self.max_level,
            "n_cubes": len(self.cubes),
            "n_unresolved": len(self.unresolved),
            "unresolved_volume": self.unresolved_volume,
            "cubes": cubes,
        }
        return json.dumps(doc, sort_keys=True, indent=1)


def _linear_key(index, n_cells: int) -> int:
    k = 0
    for c in index:
        k = k * n_cells + int(c)
    return k


def _linear_key_arr(idx: np.ndarray, n_cells: int) -> np.ndarray:
    k = np.zeros(len(idx), dtype=np.int64)
    for a in range(idx.shape[1]):
        k = k * n_cells + idx[:, a]
    return k


# ----------------------------------------------------------------------
# construction
# ----------------------------------------------------------------------

def default_root(domain: ImplicitDomain) -> Ball:
    """Ball centered at the bbox center with radius 4*max(1, circumradius)."""
    c = domain.bbox.center
    rho = 0.5 * domain.bbox.diam
    return Ball(tuple(c), 4.0 * max(1.0, rho))


def _complement_distance(domain: ImplicitDomain, region: str, pts: np.ndarray) -> np.ndarray:
    """dist(x, complement of U) for the decomposed open set U."""
    ins = domain.inside(pts)
    bd = domain.boundary_distance(pts)
    if region == "complement":      # U = R^n \ closure(Omega)
        return np.where(ins, 0.0, bd)
    if region == "interior":        # U = Omega
        return np.where(ins, bd, 0.0)
    raise ValueError(f"unknown region {region!r}")


def whitney_cover(domain: ImplicitDomain, root: Optional[Ball] = None,
                  max_level: int = 10, region: str = "complement",
                  min_ratio: float = MIN_RATIO) -> WhitneyCover:
    """Whitney decomposition by dyadic subdivision of a frame cube.

    The frame is the axis-aligned cube circumscribing the root ball; level-k
    cubes have side frame_side * 2^-k.  Cubes that cannot contain points of
    the decomposed set are pruned; cubes finer than max_level that are still
    undecided are returned in `unresolved`.
    """
    if root is None:
        root = default_root(domain)
    n = domain.dim
    if len(root.center) != n:
        raise CoverError("root ball dimension does not match domain")
    # the root must strictly contain the domain's bounding box
    corners = np.array(list(itertools.product(*zip(domain.bbox.lo, domain.bbox.hi))))
    if not root.contains(corners).all():
        raise CoverError("root ball does not contain the domain bounding box")

    origin = np.asarray(root.center, dtype=float) - root.radius
    frame_side = 2.0 * root.radius
    side_cap = root.radius / SIDE_CAP_FRACTION
    accept_factor = (min_ratio + 0.5) * float(np.sqrt(n))   # * side

    cubes: List[DyadicCube] = []
    unresolved: List[DyadicCube] = []
    active = np.zeros((1, n), dtype=np.int64)               # level-0 index
    for level in range(0, max_level + 1):
        if len(active) == 0:
            break
        side = frame_side / (1 << level)
        centers = origin + (active + 0.5) * side
        half_diag = 0.5 * side * float(np.sqrt(n))
        # retention: cube must meet the root ball (exact point-to-cube test)
        gap = np.maximum(np.abs(np.asarray(root.center) - centers) - 0.5 * side, 0.0)
        meets_root = np.linalg.norm(gap, axis=1) <= root.radius
        ins = domain.inside(centers)
        bd = domain.boundary_distance(centers)
        slack = domain.distance_slack()
        if region == "complement":
            dist_c = np.where(ins, 0.0, bd)
            empty = ins & (bd >= half_diag + slack)
        else:
            dist_c = np.where(ins, bd, 0.0)
            empty = (~ins) & (bd >= half_diag + slack)
        accept = meets_root & ~empty & (side <= side_cap) & \
            (dist_c >= accept_factor * side)
        subdivide = meets_root & ~empty & ~accept

        for i in np.where(accept)[0]:
            idx = tuple(int(v) for v in active[i])
            lo = tuple(origin + active[i] * side)
            cubes.append(DyadicCube(level, idx, lo, side))
        if level == max_level:
            for i in np.where(subdivide)[0]:
                idx = tuple(int(v) for v in active[i])
                lo = tuple(origin + active[i] * side)
                unresolved.append(DyadicCube(level, idx, lo, side))
            active = np.zeros((0, n), dtype=np.int64)
        else:
            parents = active[subdivide]
            if len(parents) == 0:
                active = np.zeros((0, n), dtype=np.int64)
                continue
            offs = np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int64)
            children = (2 * parents[:, None, :] + offs[None, :, :]).reshape(-1, n)
            # canonical order: lexicographic per level
            order = np.lexsort(children.T[::-1])
            active = children[order]

    if not cubes and not unresolved:
        raise CoverError(f"decomposed set is empty for domain {domain.name!r}")
    cubes.sort(key=lambda q: (q.level, q.index))
    unresolved.sort(key=lambda q: (q.level, q.index))
    return WhitneyCover(cubes, root, origin, frame_side, n, region,
                        min_ratio, max_level, unresolved, domain.name)


def reflect_centers(cover: WhitneyCover, domain: ImplicitDomain) -> WhitneyCover:
    """Attach to each cube a point x_Q* of closure(Omega) near it.

    x_Q* is the boundary projection of the cube center (for centers inside
    Omega, the center itself already lies in the closure).  Raises if any
    cube ends up with dist(x_Q*, Q) >= 15 diam(Q), which the construction
    geometry rules out for resolved covers.
    """
    centers = np.array([q.center for q in cover.cubes])
    if len(centers) == 0:
        cover.reflected_centers = np.zeros((0, cover.dim))
        return cover
    proj = domain.project_boundary(centers)
    ins = domain.inside(centers)
    xstar = np.where(ins[:, None], centers, proj)
    for i, q in enumerate(cover.cubes):
        d = q.point_distance(xstar[i])
        if not d < 15.0 * q.diam:
            raise CoverError(
                f"no reflected center within 15*diam for cube level={q.level} "
                f"index={q.index} (dist {d:.3g}, diam {q.diam:.3g}); refine the cover")
    cover.reflected_centers = xstar
    return cover


# ----------------------------------------------------------------------
# partition of unity
# ----------------------------------------------------------------------

class PartitionOfUnity:
    """Normalized tensor-product C^1 bumps subordinate to a Whitney cover.

    psi_Q is 1 on Q, falls to 0 at the boundary of 2Q along each axis with
    a cubic smoothstep ramp, and vanishes outside 2Q; phi_Q = psi_Q / sum.
    Each phi_Q is Lipschitz with constant at most lip_bound(Q) = K/diam(Q),
    with K = 3*n*(1 + 9*M) for M the measured support-overlap bound (cube
    sizes within a factor 9 can share support, so the normalizer's gradient
    is controlled by M neighbors of comparable size).
    """

    def __init__(self, cover: WhitneyCover):
        self.cover = cover
        self._centers = np.array([q.center for q in cover.cubes])
        self._sides = np.array([q.side for q in cover.cubes])
        # measured bound on the number of supports 2Q meeting a point:
        # probe the cube centers and corners themselves
        probes = np.vstack([self._centers,
                            self._centers + 0.45 * self._sides[:, None]])
        self.overlap_bound = int(self.support_counts(probes).max()) if len(cover) else 0
        self.K = 3.0 * cover.dim * (1.0 + 9.0 * self.overlap_bound)

    def _support_hits(self, pts: np.ndarray):
        """(point_row, cube_id) pairs with pts[row] in 2Q of cube_id."""
        cover = self.cover
        rows, ids = [], []
        for level in cover.levels:
            side = cover.side_at(level)
            base = np.floor((pts - cover.frame_origin) / side).astype(np.int64)
            n_cells = 1 << level
            keys, pos = cover._table(level)
            if len(keys) == 0:
                continue
            for off in itertools.product((-1, 0, 1), repeat=cover.dim):
                cell = base + np.asarray(off, dtype=np.int64)
                ok = np.all((cell >= 0) & (cell < n_cells), axis=1)
                if not ok.any():
                    continue
                k = _linear_key_arr(cell[ok], n_cells)
                j = np.searchsorted(keys, k)
                hit = (j < len(keys)) & (keys[np.minimum(j, len(keys) - 1)] == k)
                if not hit.any():
                    continue
                r = np.where(ok)[0][hit]
                q = pos[j[hit]]
                # keep only pairs with x in 2Q (psi support)
                inside = np.all(np.abs(pts[r] - self._centers[q]) <=
                                self._sides[q][:, None], axis=1)
                rows.append(r[inside])
                ids.append(q[inside])
        if rows:
            return np.concatenate(rows), np.concatenate(ids)
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)

    def support_counts(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        rows, _ = self._support_hits(pts)
        return np.bincount(rows, minlength=len(pts))

    def evaluate(self, pts):
        """All nonzero bump values at each point.

        Returns (values, rows, cube_ids, total): phi values in sparse triplet
        form plus the per-point normalizer sum(psi); total == 0 marks points
        outside the covered region.
        """
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        rows, ids = self._support_hits(pts)
        if len(rows) == 0:
            return (np.zeros(0), rows, ids, np.zeros(len(pts)))
        c = self._centers[ids]
        s = self._sides[ids]
        u = (np.abs(pts[rows] - c) - 0.5 * s[:, None]) / (0.5 * s[:, None])
        u = np.clip(u, 0.0, 1.0)
        psi = (1.0 - (3.0 * u * u - 2.0 * u * u * u)).prod(axis=1)
        total = np.bincount(rows, weights=psi, minlength=len(pts))
        vals = psi / np.where(total[rows] > 0, total[rows], 1.0)
        return vals, rows, ids, total

    def sum_at(self, pts) -> np.ndarray:
        """sum_Q phi_Q at each point: 1 on the covered set, 0 outside."""
        vals, rows, _, total = self.evaluate(pts)
        return np.bincount(rows, weights=vals,
                           minlength=len(np.atleast_2d(pts)))

    def phi(self, cube_id: int, pts) -> np.ndarray:
        """Single bump phi_Q evaluated at points (0 outside 2Q)."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        vals, rows, ids, total = self.evaluate(pts)
        out = np.zeros(len(pts))
        sel = ids == cube_id
        out[rows[sel]] = vals[sel]
        return out

    def lip_bound(self, cube_id: int) -> float:
        return self.K / self.cover.cubes[cube_id].diam


def partition_of_unity(cover: WhitneyCover) -> PartitionOfUnity:
    return PartitionOfUnity(cover)


# ----------------------------------------------------------------------
# property checks
# ----------------------------------------------------------------------

def check_disjoint(cover: WhitneyCover) -> bool:
    """Exact integer test: dyadic cubes overlap iff one contains the other."""
    seen = {(q.level, q.index) for q in cover.cubes}
    for q in cover.cubes:
        for up in range(1, q.level + 1):
            anc = (q.level - up, tuple(i >> up for i in q.index))
            if anc in seen:
                return False
    return True


def check_distance_window(cover: WhitneyCover, domain: ImplicitDomain) -> dict:
    """Construction guarantee: min_ratio <= dist(Q, complement)/diam(Q) <= 3.5
    for window cubes (top-size cubes have no upper bound).  dist(Q, .) is
    evaluated as dist at the nearest cube point to the complement, bounded
    below by dist(center) - diam/2."""
    centers = np.array([q.center for q in cover.cubes])
    diams = np.array([q.diam for q in cover.cubes])
    dist_c = _complement_distance(domain, cover.region, centers)
    lo = (dist_c - 0.5 * diams) / diams
    # frame side = 2R and cap side = R/8, so cap level is 4; cubes below it
    # were window-rejected at their parent, hence dist(center) < 3.5 diam,
    # and dist(Q, complement) <= dist(center) bounds the cube distance
    window = np.array([q.level > 4 for q in cover.cubes])
    ok_lo = bool(np.all(dist_c >= (cover.min_ratio + 0.5) * diams - 1e-12))
    ratio_hi = float(np.max(dist_c[window] / diams[window])) if window.any() else 0.0
    return {"pass": ok_lo, "min_ratio_seen": float(lo.min()) if len(lo) else np.inf,
            "max_window_ratio": ratio_hi}


def check_pinch_5q(cover: WhitneyCover, domain: ImplicitDomain,
                   samples_per_cube: int = 16, seed: int = 0) -> dict:
    """Sampled test of the two-sided pinch on dilated cubes:

        for x in 5Q:  2 diam(Q) < dist(x, complement of U) < 8 diam(Q).

    Returns measured ratio range and violation count.  No factor-2 dyadic
    construction can satisfy the lower bound for cubes adjacent to the
    complement (5Q then meets the complement, where dist = 0), so this
    check reports rather than asserts.
    """
    rng = np.random.default_rng(seed)
    viol = 0
    lo_seen, hi_seen = np.inf, 0.0
    witness = None
    for qi, q in enumerate(cover.cubes):
        pts = q.dilate(5.0).sample(samples_per_cube, rng)
        d = _complement_distance(domain, cover.region, pts)
        r = d / q.diam
        lo_seen = min(lo_seen, float(r.min()))
        hi_seen = max(hi_seen, float(r.max()))
        bad = (r <= 2.0) | (r >= 8.0)
        if bad.any():
            viol += int(bad.sum())
            if witness is None:
                witness = {"cube": qi, "point": pts[bad][0].tolist(),
                           "ratio": float(r[bad][0])}
    return {"pass": viol == 0, "violations": viol, "min_ratio": lo_seen,
            "max_ratio": hi_seen, "witness": witness,
            "samples_per_cube": samples_per_cube}


def check_coverage(cover: WhitneyCover, domain: ImplicitDomain,
                   n_samples: int = 4000, seed: int = 1) -> dict:
    """Sampled: points of the decomposed set within the root are either in
    a cover cube or in an unresolved boundary cell."""
    rng = np.random.default_rng(seed)
    c0 = np.asarray(cover.root_box.center)
    R = cover.root_box.radius
    pts = c0 - R + rng.random((4 * n_samples, cover.dim)) * (2 * R)
    pts = pts[np.linalg.norm(pts - c0, axis=1) < R][:n_samples]
    ins = domain.inside(pts)
    target = ~ins if cover.region == "complement" else ins
    if cover.region == "complement":
        # closure(Omega) includes the boundary; skip points within float fuzz
        target &= domain.boundary_distance(pts) > 1e-9
    pts = pts[target]
    covered = cover.locate(pts) >= 0
    unres = _in_cube_list(pts, cover.unresolved)
    ok = covered | unres
    return {"pass": bool(ok.all()), "n_checked": int(len(pts)),
            "covered_fraction": float(covered.mean()) if len(pts) else 1.0,
            "unresolved_fraction": float(unres.mean()) if len(pts) else 0.0}


def _in_cube_list(pts: np.ndarray, cubes: List[DyadicCube]) -> np.ndarray:
    hit = np.zeros(len(pts), dtype=bool)
    for q in cubes:
        hit |= q.contains(pts)
    return hit


def overlap_bound(cover: WhitneyCover, factor: float = 15.0,
                  n_samples: int = 1000, seed: int = 2) -> int:
    """Max over sample points of the number of cubes Q with x in factor*Q."""
    rng = np.random.default_rng(seed)
    c0 = np.asarray(cover.root_box.center)
    R = cover.root_box.radius
    pts = c0 - R + rng.random((n_samples, cover.dim)) * (2 * R)
    return int(cover.count_dilated(pts, factor).max())
