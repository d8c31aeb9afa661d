"""Maximal Poisson-disk sampling with spatially varying radii.

Two phases: classic dart throwing until the rejection budget is spent,
then targeted filling of the residual uncovered regions found through the
triangulation's gap census.  Every accepted pair of sites keeps
``|p_i - p_j| >= max(r_i, r_j)``; filling may shrink a fresh disk to the
distance of the nearest existing center so the invariant survives.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .density import radius_at
from .errors import (EmptyDomain, IterationCapExceeded, NonDecreasingSchedule,
                     RedundantSite, SamplerError)
from .gaps import EPS_GAP_FACTOR, _fan_triangulate, extract_all_primitives
from .triangulation import build

_BATCH = 2048
_PRIM_ATTEMPTS = 24          # draws per interior primitive per pass
_PIECE_ATTEMPTS = 48         # draws per boundary piece per pass
_BOUNDARY_TOL = 1e-9         # of r: cell vertex excess below this is covered


@dataclass(frozen=True)
class SamplerConfig:
    """Knobs for one sampling run.

    r_max defaults to 16 * r_min; eps_gap to 1e-12 * r_min^2.  seed fixes
    every stream; two runs with equal config and inputs are identical.
    """

    r_min: float
    r_max: Optional[float] = None
    k_reject: int = 300
    seed: int = 0
    max_fill_iterations: int = 50
    eps_gap: Optional[float] = None

    def __post_init__(self):
        if not (self.r_min > 0 and math.isfinite(self.r_min)):
            raise SamplerError(f"r_min must be positive, got {self.r_min!r}")
        if self.r_max is None:
            object.__setattr__(self, "r_max", 16.0 * self.r_min)
        if self.r_max < self.r_min:
            raise SamplerError("r_max < r_min")
        if self.eps_gap is None:
            object.__setattr__(self, "eps_gap",
                               EPS_GAP_FACTOR * self.r_min * self.r_min)
        if self.k_reject < 1:
            raise SamplerError("k_reject must be >= 1")


@dataclass
class SamplerStats:
    n_boundary: int = 0
    n_dart: int = 0
    n_fill: int = 0
    dart_candidates: int = 0
    fill_iterations: int = 0
    shrunk: int = 0
    dropped_primitives: int = 0
    maximal: bool = False
    wall_time_s: float = 0.0


@dataclass
class SampleSet:
    """Sites plus the triangulation and run bookkeeping."""

    sites: List[Tuple[float, float, float]]
    triangulation: object
    stats: SamplerStats
    config: SamplerConfig

    @property
    def points(self) -> np.ndarray:
        return np.asarray(self.sites, dtype=float).reshape(-1, 3)


def _stream(*key) -> np.random.Generator:
    """Deterministic generator for a structured key."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(key)))


class AccelGrid:
    """Uniform grid over the domain bbox, cell edge <= r_min / sqrt(2).

    Tracks cells known to lie entirely inside some accepted disk (instant
    rejection) and a per-cell site list for conflict queries.  On the
    periodic unit square all index arithmetic wraps.
    """

    def __init__(self, bbox, r_min: float, periodic: bool):
        x0, y0, x1, y1 = bbox
        self.x0, self.y0 = float(x0), float(y0)
        w, h = float(x1) - self.x0, float(y1) - self.y0
        if not (w > 0 and h > 0):
            raise EmptyDomain("grid over empty bbox")
        target = r_min / math.sqrt(2.0)
        self.nx = max(1, int(math.ceil(w / target)))
        self.ny = max(1, int(math.ceil(h / target)))
        self.csx = w / self.nx
        self.csy = h / self.ny
        self.w, self.h = w, h
        self.periodic = periodic
        self.cover = np.zeros((self.ny, self.nx), dtype=np.uint8)
        self.cells: dict = {}
        self.max_r = 0.0
        self.n_sites = 0

    def _idx(self, x, y):
        i = int((x - self.x0) / self.csx)
        j = int((y - self.y0) / self.csy)
        if self.periodic:
            return i % self.nx, j % self.ny
        return min(max(i, 0), self.nx - 1), min(max(j, 0), self.ny - 1)

    def cell_covered(self, x, y) -> bool:
        i, j = self._idx(x, y)
        return bool(self.cover[j, i])

    def insert(self, x, y, r):
        i, j = self._idx(x, y)
        self.cells.setdefault((i, j), []).append((x, y, r))
        if r > self.max_r:
            self.max_r = r
        self.n_sites += 1
        self._mark_covered(x, y, r)

    def _mark_covered(self, x, y, r):
        # cells whose four corners fall inside the disk
        i0 = int(math.floor((x - r - self.x0) / self.csx))
        i1 = int(math.ceil((x + r - self.x0) / self.csx))
        j0 = int(math.floor((y - r - self.y0) / self.csy))
        j1 = int(math.ceil((y + r - self.y0) / self.csy))
        if not self.periodic:
            i0, i1 = max(i0, 0), min(i1, self.nx)
            j0, j1 = max(j0, 0), min(j1, self.ny)
            if i0 >= i1 or j0 >= j1:
                return
        cx = self.x0 + np.arange(i0, i1 + 1) * self.csx - x
        cy = self.y0 + np.arange(j0, j1 + 1) * self.csy - y
        inside = (cx[None, :] ** 2 + cy[:, None] ** 2) <= r * r
        full = (inside[:-1, :-1] & inside[1:, :-1]
                & inside[:-1, 1:] & inside[1:, 1:])
        if not full.any():
            return
        jj, ii = np.nonzero(full)
        ii = (ii + i0) % self.nx if self.periodic else ii + i0
        jj = (jj + j0) % self.ny if self.periodic else jj + j0
        self.cover[jj, ii] = 1

    def _neighborhood(self, x, y, reach):
        """Site records with center within `reach` (plus one cell slack)."""
        i0 = int(math.floor((x - reach - self.x0) / self.csx))
        i1 = int(math.floor((x + reach - self.x0) / self.csx))
        j0 = int(math.floor((y - reach - self.y0) / self.csy))
        j1 = int(math.floor((y + reach - self.y0) / self.csy))
        if self.periodic:
            # never visit a cell twice when the reach wraps the whole torus
            i1 = min(i1, i0 + self.nx - 1)
            j1 = min(j1, j0 + self.ny - 1)
        else:
            i0, i1 = max(i0, 0), min(i1, self.nx - 1)
            j0, j1 = max(j0, 0), min(j1, self.ny - 1)
        cells = self.cells
        nx, ny = self.nx, self.ny
        for jj in range(j0, j1 + 1):
            jw = jj % ny if self.periodic else jj
            for ii in range(i0, i1 + 1):
                iw = ii % nx if self.periodic else ii
                lst = cells.get((iw, jw))
                if lst:
                    yield from lst

    def _d2(self, x, y, sx, sy):
        dx = x - sx
        dy = y - sy
        if self.periodic:
            dx -= self.w * round(dx / self.w)
            dy -= self.h * round(dy / self.h)
        return dx * dx + dy * dy

    def conflict(self, x, y, r) -> bool:
        """True when a site sits closer than max(r, its radius)."""
        reach = max(r, self.max_r)
        for (sx, sy, sr) in self._neighborhood(x, y, reach):
            lim = r if r > sr else sr
            if self._d2(x, y, sx, sy) < lim * lim:
                return True
        return False

    def covered_point(self, x, y) -> bool:
        """True when the point lies strictly inside some disk."""
        if self.cell_covered(x, y):
            return True
        for (sx, sy, sr) in self._neighborhood(x, y, self.max_r):
            if self._d2(x, y, sx, sy) < sr * sr:
                return True
        return False

    def nearest_center(self, x, y, within: float) -> float:
        """Distance to the nearest site center, inf if none within range."""
        best = math.inf
        for (sx, sy, _) in self._neighborhood(x, y, within):
            d2 = self._d2(x, y, sx, sy)
            if d2 < best:
                best = d2
        return math.sqrt(best) if math.isfinite(best) else math.inf


# ----------------------------------------------------------------------
# phase 1: dart throwing

def _triangle_cpdf(tris, density):
    a = np.asarray(tris, dtype=float).reshape(-1, 6)
    if a.size == 0:
        raise EmptyDomain("no candidate triangles")
    ax, ay, bx, by, cx, cy = (a[:, k] for k in range(6))
    areas = 0.5 * np.abs((bx - ax) * (cy - ay) - (cx - ax) * (by - ay))
    gx = (ax + bx + cx) / 3.0
    gy = (ay + by + cy) / 3.0
    w = areas * np.asarray(density(gx, gy), dtype=float)
    w[~np.isfinite(w)] = 0.0
    w[w < 0] = 0.0
    total = float(w.sum())
    if total <= 0:
        raise EmptyDomain("candidate weight is zero everywhere")
    return a, np.cumsum(w)


def _draw_in_triangles(tris, cum, rng, n):
    u = rng.random(n) * cum[-1]
    pick = np.searchsorted(cum, u, side="right")
    pick = np.minimum(pick, len(cum) - 1)
    t = tris[pick]
    s = np.sqrt(rng.random(n))
    v = rng.random(n)
    px = (1 - s) * t[:, 0] + s * (1 - v) * t[:, 2] + s * v * t[:, 4]
    py = (1 - s) * t[:, 1] + s * (1 - v) * t[:, 3] + s * v * t[:, 5]
    return px, py


def dart_throw(domain, density, config: SamplerConfig,
               grid: Optional[AccelGrid] = None,
               sites: Optional[list] = None,
               rng: Optional[np.random.Generator] = None,
               stats: Optional[SamplerStats] = None):
    """Rejection sampling until k_reject consecutive failures.

    Candidates are drawn area-times-density weighted over a triangle cover
    of the domain, so dense regions see proportionally more darts.
    Returns the (shared) site list.
    """
    if grid is None:
        grid = AccelGrid(domain.bbox(), config.r_min, domain.periodic)
    if sites is None:
        sites = []
    if rng is None:
        rng = _stream(config.seed, 1)
    if stats is None:
        stats = SamplerStats()
    h = max(8.0 * config.r_min, max(grid.w, grid.h) / 256.0)
    tris, cum = _triangle_cpdf(domain.triangles(h), density)
    consec = 0
    wrap = domain.periodic
    while consec < config.k_reject:
        px, py = _draw_in_triangles(tris, cum, rng, _BATCH)
        if wrap:
            px %= 1.0
            py %= 1.0
        rr = radius_at(density, px, py, config.r_min, config.r_max)
        for i in range(_BATCH):
            x = px[i]
            y = py[i]
            stats.dart_candidates += 1
            if grid.cell_covered(x, y) or grid.conflict(x, y, rr[i]):
                consec += 1
                if consec >= config.k_reject:
                    break
            else:
                r = float(rr[i])
                sites.append((float(x), float(y), r))
                grid.insert(float(x), float(y), r)
                stats.n_dart += 1
                consec = 0
    return sites


# ----------------------------------------------------------------------
# boundary of bounded domains

def _ring_walk(ring):
    """Per-segment data: endpoints, length, cumulative start offset."""
    segs = []
    off = 0.0
    n = len(ring)
    for i in range(n):
        x0, y0 = ring[i]
        x1, y1 = ring[(i + 1) % n]
        L = math.hypot(x1 - x0, y1 - y0)
        if L > 0:
            segs.append((x0, y0, x1, y1, L, off))
            off += L
    return segs, off


def _point_on_ring(segs, t):
    last = len(segs) - 1
    for k, (x0, y0, x1, y1, L, off) in enumerate(segs):
        if t <= off + L or k == last:
            u = min(max((t - off) / L, 0.0), 1.0)
            return x0 + u * (x1 - x0), y0 + u * (y1 - y0)


def _covered_intervals(seg, grid):
    """Sorted merged [t0, t1] sub-intervals of the segment (param 0..1)
    strictly inside some accepted disk."""
    x0, y0, x1, y1, L, _ = seg
    dx, dy = x1 - x0, y1 - y0
    mx, my = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
    reach = 0.5 * L + grid.max_r
    ivs = []
    for (sx, sy, sr) in grid._neighborhood(mx, my, reach):
        # |p(t) - s|^2 < r^2 with p(t) = p0 + t d
        fx, fy = x0 - sx, y0 - sy
        a = dx * dx + dy * dy
        b = 2.0 * (fx * dx + fy * dy)
        c = fx * fx + fy * fy - sr * sr
        disc = b * b - 4.0 * a * c
        if disc <= 0 or a == 0:
            continue
        sq = math.sqrt(disc)
        t0 = (-b - sq) / (2.0 * a)
        t1 = (-b + sq) / (2.0 * a)
        t0, t1 = max(t0, 0.0), min(t1, 1.0)
        if t0 < t1:
            ivs.append((t0, t1))
    ivs.sort()
    merged = []
    for t0, t1 in ivs:
        if merged and t0 <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], t1))
        else:
            merged.append((t0, t1))
    return merged


def _uncovered_on_ring(segs, grid, min_len):
    """(x, y) midpoints of maximal uncovered arcs longer than min_len."""
    out = []
    for seg in segs:
        L = seg[4]
        merged = _covered_intervals(seg, grid)
        holes = []
        prev = 0.0
        for t0, t1 in merged:
            if t0 > prev:
                holes.append((prev, t0))
            prev = max(prev, t1)
        if prev < 1.0:
            holes.append((prev, 1.0))
        for t0, t1 in holes:
            if (t1 - t0) * L > min_len:
                tm = 0.5 * (t0 + t1)
                out.append((seg[0] + tm * (seg[2] - seg[0]),
                            seg[1] + tm * (seg[3] - seg[1])))
    return out


def sample_boundary(domain, density, config: SamplerConfig,
                    grid: AccelGrid, sites: list,
                    stats: SamplerStats) -> int:
    """Maximal 1-D sampling of every boundary ring (bounded domains).

    Darts on arc length first, then each residual uncovered arc gets a
    point at its midpoint until the rings are fully covered.  These sites
    are the ones later mesh passes must not move.
    """
    n_before = len(sites)
    min_len = 1e-9 * config.r_min
    for ridx, ring in enumerate(domain.boundary_rings()):
        segs, total = _ring_walk(ring)
        if not segs:
            continue
        rng = _stream(config.seed, 2, ridx)
        consec = 0
        while consec < config.k_reject:
            t = rng.random() * total
            x, y = _point_on_ring(segs, t)
            r = float(radius_at(density, x, y, config.r_min, config.r_max))
            if grid.conflict(x, y, r):
                consec += 1
            else:
                sites.append((x, y, r))
                grid.insert(x, y, r)
                consec = 0
        # exact 1-D fill: cover every arc
        for _ in range(config.max_fill_iterations):
            holes = _uncovered_on_ring(segs, grid, min_len)
            placed = 0
            for (x, y) in holes:
                if grid.covered_point(x, y):
                    continue
                r = float(radius_at(density, x, y, config.r_min,
                                    config.r_max))
                d = grid.nearest_center(x, y, within=r)
                if d < r:
                    r = d
                    stats.shrunk += 1
                if r <= 0:
                    continue
                sites.append((x, y, r))
                grid.insert(x, y, r)
                placed += 1
            if placed == 0:
                break
    stats.n_boundary = len(sites) - n_before
    return stats.n_boundary


# ----------------------------------------------------------------------
# phase 2: gap filling

def _fan_cpdf(prim, density):
    v = prim.vertices
    tris = []
    for i in range(1, len(v) - 1):
        tris.append((v[0][0], v[0][1], v[i][0], v[i][1],
                     v[i + 1][0], v[i + 1][1]))
    try:
        return _triangle_cpdf(tris, density)
    except EmptyDomain:
        return None


def _accept_candidate(x, y, domain, density, config, grid, stats):
    """Uncovered-point test plus the radius shrink rule; None on reject."""
    if grid.covered_point(x, y):
        return None
    r = float(radius_at(density, x, y, config.r_min, config.r_max))
    d = grid.nearest_center(x, y, within=r)
    if d < r:
        r = d
        stats.shrunk += 1
    if r <= 0:
        return None
    return (x, y, r)


def _fill_igs(s, domain, density, config, grid, rng, stats):
    """Draw one insertion batch for a connected gap set.

    Every primitive of the set gets its own area-times-density draw and
    hosts at most one accepted sample per pass (its geometry is stale
    until the next census).  The stratified visit is load-bearing for
    the optimizer: pooling the whole set into one area-weighted draw
    leaves refilled cavities just irregular enough that quality passes
    stop converging.
    """
    accepted = []
    for prim in s.primitives:
        got = _try_fill_primitive(prim, domain, density, config, grid,
                                  rng, stats, _PRIM_ATTEMPTS)
        if got is not None:
            grid.insert(*got)
            accepted.append((got, prim.owner[0]))
    return accepted


def _try_fill_primitive(prim, domain, density, config, grid, rng, stats,
                        attempts, seed_point=None):
    """One accepted site inside the primitive, or None."""
    bounded = not domain.periodic
    if seed_point is not None:
        x, y = seed_point
        if (not bounded) or bool(domain.contains(x, y)):
            got = _accept_candidate(x, y, domain, density, config, grid,
                                    stats)
            if got is not None:
                return got
    cp = _fan_cpdf(prim, density)
    if cp is None:
        return None
    tris, cum = cp
    px, py = _draw_in_triangles(tris, cum, rng, attempts)
    if domain.periodic:
        px %= 1.0
        py %= 1.0
        inside = None
    else:
        inside = domain.contains(px, py)
    for i in range(attempts):
        if inside is not None and not inside[i]:
            continue
        got = _accept_candidate(float(px[i]), float(py[i]), domain, density,
                                config, grid, stats)
        if got is not None:
            return got
    return None


def _boundary_holes(tri, domain, config):
    """Per-site uncovered leftovers of a bounded domain.

    Coverage within a power cell is equivalent to coverage by that cell's
    own disk, so a site's patch of the domain is covered exactly when
    every vertex of (cell ∩ domain) lies within its disk.  A failing
    vertex is itself an uncovered point and is returned as a seed
    candidate next to the sampleable leftover polygon.

    Returns a list of (primitives, seed_point) pairs; empty means the
    whole domain is covered (to within 1e-9 of the local radius).
    """
    import shapely
    from shapely.geometry import Polygon

    dom = domain.shapely
    minx, miny, maxx, maxy = dom.bounds
    pad = 4.0 * max(maxx - minx, maxy - miny) + 1.0
    clip = (minx - pad, miny - pad, maxx + pad, maxy + pad)
    floor = 1e-14 * config.r_min * config.r_min
    out = []
    for sid in sorted(tri.sites):
        s = tri.sites[sid]
        if not s[4]:
            continue
        x, y, r = s[0], s[1], s[2]
        cell = tri.power_cell(sid, clip_box=clip)
        if len(cell) < 3:
            continue
        tol = _BOUNDARY_TOL * r
        # cheap pass: the raw cell already inside the disk covers its patch
        if all((vx - x) ** 2 + (vy - y) ** 2 <= (r + tol) ** 2
               for (vx, vy) in cell):
            continue
        patch = Polygon(cell).intersection(dom)
        if patch.is_empty:
            continue
        for geom in getattr(patch, "geoms", [patch]):
            if geom.geom_type != "Polygon" or geom.area <= 0:
                continue
            worst = None
            worst_ex = tol
            rings = [geom.exterior, *geom.interiors]
            for ring in rings:
                for (vx, vy) in ring.coords[:-1]:
                    ex = math.hypot(vx - x, vy - y) - r
                    if ex > worst_ex:
                        worst_ex = ex
                        worst = (vx, vy)
            if worst is None:
                continue
            gon = Polygon(_fine_inscribed(x, y, r))
            left = geom.difference(gon)
            prims = []
            for g in getattr(left, "geoms", [left]):
                if g.geom_type == "Polygon" and g.area > floor:
                    prims.extend(_fan_triangulate(g))
            out.append((prims, worst))
    return out


def _fine_inscribed(x, y, r, n=128):
    return [(x + r * math.cos(2.0 * math.pi * k / n),
             y + r * math.sin(2.0 * math.pi * k / n))
            for k in range(n)]


def fill_gaps(tri, domain, density, config: SamplerConfig,
              grid: AccelGrid, sites: list,
              stats: Optional[SamplerStats] = None) -> SamplerStats:
    """Drive the sampling to maximality.

    Each pass: census the uncovered regions, then draw one batch per
    connected gap set, at most one accepted candidate per primitive
    (per-set streams keep runs reproducible), and insert the batch.
    Bounded domains get an exact boundary-patch audit once the interior
    census is clean.  Stops when nothing remains; the safety cap raises
    IterationCapExceeded with gaps still present.
    """
    if stats is None:
        stats = SamplerStats()
    bounded = not domain.periodic
    dropped: list = []
    stalled = False
    for it in range(1, config.max_fill_iterations + 1):
        prims, igs = extract_all_primitives(tri, eps_gap=config.eps_gap,
                                            dropped_log=dropped)
        holes = []
        if bounded:
            # the census can list hull slivers whose uncovered part lies
            # outside the domain; the patch audit is the exact authority
            if not prims or stalled:
                holes = _boundary_holes(tri, domain, config)
                if not holes:
                    stats.maximal = True
                    break
        elif not prims:
            stats.maximal = True
            break
        stats.fill_iterations = it
        accepted = []
        for s in igs:
            rng = _stream(config.seed, 3, it, s.id)
            accepted.extend(
                _fill_igs(s, domain, density, config, grid, rng, stats))
        if holes:
            rng = _stream(config.seed, 4, it)
            for (hole_prims, seed_pt) in holes:
                got = None
                for k, prim in enumerate(hole_prims):
                    got = _try_fill_primitive(
                        prim, domain, density, config, grid, rng, stats,
                        _PIECE_ATTEMPTS, seed_point=seed_pt if k == 0 else None)
                    if got is not None:
                        break
                if got is None and not hole_prims:
                    got = _try_seed_only(seed_pt, domain, density, config,
                                         grid, stats)
                if got is not None:
                    grid.insert(*got)
                    accepted.append((got, None))
        for ((x, y, r), owner) in accepted:
            hint = None
            if owner is not None and 0 <= owner < len(tri.talive) \
                    and tri.talive[owner]:
                hint = owner
            try:
                tri.insert_site(x, y, r, hint=hint)
            except RedundantSite:
                continue
            sites.append((x, y, r))
            stats.n_fill += 1
        # an all-rejected pass retries with fresh draws; the cap bounds it
        stalled = not accepted
    else:
        stats.dropped_primitives += len(dropped)
        raise IterationCapExceeded(
            f"{config.max_fill_iterations} fill passes with gaps remaining")
    stats.dropped_primitives += len(dropped)
    return stats


def _try_seed_only(seed_pt, domain, density, config, grid, stats):
    x, y = seed_pt
    if not domain.periodic and not bool(domain.contains(x, y)):
        return None
    return _accept_candidate(x, y, domain, density, config, grid, stats)


# ----------------------------------------------------------------------
# orchestration

def _uncovered_probes(domain, grid, rng, n=4096):
    """Uncovered probe points, for the no-triangulation fallback."""
    x0, y0, x1, y1 = domain.bbox()
    out = []
    xs = x0 + rng.random(n) * (x1 - x0)
    ys = y0 + rng.random(n) * (y1 - y0)
    inside = domain.contains(xs, ys)
    for i in range(n):
        if inside[i] and not grid.covered_point(xs[i], ys[i]):
            out.append((float(xs[i]), float(ys[i])))
    return out


def maximal_sample(domain, density, config: SamplerConfig,
                   initial_sites: Optional[Sequence] = None) -> SampleSet:
    """Boundary (bounded domains), darts, then gap filling to maximality."""
    t0 = time.perf_counter()
    stats = SamplerStats()
    grid = AccelGrid(domain.bbox(), config.r_min, domain.periodic)
    sites: list = []
    if initial_sites:
        for (x, y, r) in initial_sites:
            sites.append((float(x), float(y), float(r)))
            grid.insert(float(x), float(y), float(r))
    if not domain.periodic:
        sample_boundary(domain, density, config, grid, sites, stats)
    dart_throw(domain, density, config, grid=grid, sites=sites,
               rng=_stream(config.seed, 1), stats=stats)
    stats.n_dart = len(sites) - stats.n_boundary \
        - (len(initial_sites) if initial_sites else 0)
    if len(sites) < 3:
        # too coarse for a triangulation: plug uncovered probes directly
        rng = _stream(config.seed, 5)
        for _ in range(config.max_fill_iterations):
            probes = _uncovered_probes(domain, grid, rng)
            if not probes:
                break
            for (x, y) in probes:
                got = _accept_candidate(x, y, domain, density, config, grid,
                                        stats)
                if got is not None:
                    sites.append(got)
                    grid.insert(*got)
                    stats.n_fill += 1
        stats.maximal = not _uncovered_probes(domain, grid, rng)
        stats.wall_time_s = time.perf_counter() - t0
        return SampleSet(sites=sites, triangulation=None, stats=stats,
                         config=config)
    tri = build(sites, periodic=domain.periodic)
    fill_gaps(tri, domain, density, config, grid, sites, stats)
    stats.wall_time_s = time.perf_counter() - t0
    return SampleSet(sites=sites, triangulation=tri, stats=stats,
                     config=config)


def progressive_sample(domain, density, config: SamplerConfig,
                       schedule: Sequence[float]) -> List[SampleSet]:
    """Nested maximal sets at strictly decreasing radii.

    Earlier sites persist verbatim as positions; their radii re-derive
    from the tighter clamp, which can only shrink them, so the conflict
    metric survives and each stage's set contains every earlier one.
    """
    sched = [float(r) for r in schedule]
    if not sched:
        raise NonDecreasingSchedule("empty schedule")
    if any(not (r > 0) for r in sched):
        raise NonDecreasingSchedule("radii must be positive")
    if any(b >= a for a, b in zip(sched, sched[1:])):
        raise NonDecreasingSchedule(
            f"schedule must strictly decrease: {sched}")
    ratio = config.r_max / config.r_min
    out = []
    prev: list = []
    for k, r in enumerate(sched):
        seed_k = int(np.random.SeedSequence((config.seed, 100 + k))
                     .generate_state(1)[0])
        cfg_k = SamplerConfig(r_min=r, r_max=r * ratio,
                              k_reject=config.k_reject, seed=seed_k,
                              max_fill_iterations=config.max_fill_iterations)
        init = [(x, y, float(radius_at(density, x, y, cfg_k.r_min,
                                       cfg_k.r_max)))
                for (x, y, _) in prev]
        ss = maximal_sample(domain, density, cfg_k, initial_sites=init)
        out.append(ss)
        prev = ss.sites
    return out
