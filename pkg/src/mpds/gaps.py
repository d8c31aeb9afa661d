"""Gap detection and decomposition over a regular triangulation.

A triangle whose power (squared distance from its power center to a vertex
disk, beyond that disk's radius) is positive witnesses an uncovered region.
This module finds those triangles, groups them into independently
sampleable sets, and carves each one's share of the uncovered region into
a small convex polygon suitable for area-weighted rejection sampling.

Extraction is a single per-edge rule applied to each gap triangle's three
directed edges.  For edge (p0, p1) with vertex disks r0, r1 and the two
incident power centers c_own (this triangle's) and c_nb (the neighbor's):

* both centers strictly on one side of the edge line: the center that
  crossed over its own triangle's edge cuts the region; emit the chord
  A-B with A on disk 0 toward that center and B on disk 1 toward it.
  The neighbor emits the same chord reversed, so the two polygons share
  the edge exactly.
* otherwise, disks overlapping the edge (|p0p1| <= r0+r1): emit the single
  disk-disk intersection point left of the directed edge.
* otherwise: emit the two points where the disks cut the edge segment,
  in edge order.

Each gap triangle therefore owns a convex polygon of 3..6 vertices, the
polygons of one gap tile it without overlap, and their union contains the
true uncovered region (chords always err toward the covered side).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .errors import (DegeneratePrimitive, InvalidPolygon, NotNeighbors,
                     StaleReference)
from .geometry import disk_disk_intersections
from .predicates import orient2d
from .triangulation import FRAME_SITE, RegularTriangulation

EPS_GAP_FACTOR = 1e-12      # of r_min^2; smaller powers count as covered
DEGENERATE_AREA_FACTOR = 1e-14   # of r_min^2; smaller primitives are dropped
BOUNDARY_CHORD_ANGLE = math.pi / 16   # max arc per chord when clipping cells


class EdgeClass(Enum):
    """How the gap region behaves across a shared gap-triangle edge."""

    BOUNDARY = "boundary"                 # overlapping disks isolate the sides
    INNER_OPPOSITE = "inner_opposite"     # centers straddle; region continues
    INNER_SAME_SIDE = "inner_same_side"   # chord edge; region continues


class Provenance(Enum):
    DISK_DISK = "disk_disk_intersection"
    DISK_EDGE = "disk_edge_intersection"
    POWER_CENTER = "power_center"
    AUX_SPLIT = "auxiliary_split"


@dataclass(frozen=True)
class GapTriangle:
    triangle: tuple      # (id, birth version)
    power_center: tuple
    power: float


@dataclass
class GapPrimitive:
    """Convex ccw polygon owned by one gap triangle; the sampleable unit."""

    owner: tuple                      # (triangle id, birth version)
    vertices: list
    provenance: list

    def area(self) -> float:
        v = self.vertices
        n = len(v)
        s = 0.0
        for i in range(n):
            x0, y0 = v[i]
            x1, y1 = v[(i + 1) % n]
            s += x0 * y1 - x1 * y0
        return 0.5 * s


@dataclass
class IndependentGapSet:
    id: int
    triangles: list
    primitives: list = field(default_factory=list)
    total_area: float = 0.0


def min_radius(tri: RegularTriangulation) -> float:
    rs = [s[2] for s in tri.sites.values() if s[4]]
    return min(rs) if rs else 1.0


def default_eps_gap(tri: RegularTriangulation) -> float:
    r = min_radius(tri)
    return EPS_GAP_FACTOR * r * r


def detect_gaps(tri: RegularTriangulation, eps_gap: Optional[float] = None):
    """All domain triangles with power above the tolerance, ascending id.

    An empty result means the sampling is maximal (to within eps_gap).  A
    returned triangle's power center may lie outside the triangle itself;
    that is expected and the extraction rule relies on it.
    """
    if eps_gap is None:
        eps_gap = default_eps_gap(tri)
    tri.ensure_caches()
    ids = tri.domain_triangles()
    if not ids:
        return []
    pw = np.asarray(tri.tpw)[ids]
    hit = np.asarray(ids)[pw > eps_gap]
    birth = tri.tbirth
    return [GapTriangle(triangle=(int(t), birth[int(t)]),
                        power_center=(tri.tcx[int(t)], tri.tcy[int(t)]),
                        power=float(tri.tpw[int(t)]))
            for t in hit]


def _shared_edge(tri, t0, t1):
    """Directed edge (u, v) of t0 shared with t1; NotNeighbors otherwise."""
    base = 3 * t0
    for i in range(3):
        if tri.tn[base + i] == t1:
            return tri.tv[base + (i + 1) % 3], tri.tv[base + (i + 2) % 3]
    raise NotNeighbors(f"triangles {t0} and {t1} share no edge")


def classify_edge(tri: RegularTriangulation, t0: int, t1: int) -> EdgeClass:
    """Class of the edge between two adjacent gap triangles."""
    for t in (t0, t1):
        if t < 0 or t >= len(tri.talive) or not tri.talive[t]:
            raise StaleReference(f"triangle {t} is dead")
    u, v = _shared_edge(tri, t0, t1)
    tri.ensure_caches()
    ux, uy = tri.vx[u], tri.vy[u]
    vx_, vy_ = tri.vx[v], tri.vy[v]
    s0 = orient2d(ux, uy, vx_, vy_, tri.tcx[t0], tri.tcy[t0])
    s1 = orient2d(ux, uy, vx_, vy_, tri.tcx[t1], tri.tcy[t1])
    if s0 * s1 > 0:
        return EdgeClass.INNER_SAME_SIDE
    if s0 * s1 == 0:
        # a center exactly on the edge line: the chord would be degenerate,
        # treat as the continuing straddle case
        return EdgeClass.INNER_OPPOSITE
    r0 = math.sqrt(max(tri.vw[u], 0.0))
    r1 = math.sqrt(max(tri.vw[v], 0.0))
    d2 = (vx_ - ux) ** 2 + (vy_ - uy) ** 2
    if d2 <= (r0 + r1) ** 2:
        return EdgeClass.BOUNDARY
    return EdgeClass.INNER_OPPOSITE


def _gap_adjacency(tri, gap_ids):
    """(gap id, adjacent instance id, its canonical gap id) triples.

    On periodic domains a canonical triangle's structural neighbor can be
    a translated instance of another canonical triangle; the match goes
    through the translation-invariant triangle key.
    """
    gap_set = set(gap_ids)
    pairs = []
    if not tri.periodic:
        for t in gap_ids:
            base = 3 * t
            for i in range(3):
                n = tri.tn[base + i]
                if n >= 0 and n != t and n in gap_set:
                    pairs.append((t, n, n))
        return pairs
    keys = {tri.canonical_triangle_key(t): t for t in gap_ids}
    for t in gap_ids:
        base = 3 * t
        for i in range(3):
            n = tri.tn[base + i]
            if n < 0 or _is_frame(tri, n):
                continue
            ck = keys.get(tri.canonical_triangle_key(n))
            if ck is not None and ck != t:
                pairs.append((t, n, ck))
    return pairs


class _UnionFind:
    def __init__(self, items):
        self.parent = {i: i for i in items}

    def find(self, a):
        p = self.parent
        while p[a] != a:
            p[a] = p[p[a]]
            a = p[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def cluster_igs(gaps, tri: RegularTriangulation):
    """Group gap triangles into independent gap sets.

    Two gap triangles belong to the same set whenever they are in each
    other's one-ring (share at least one site), so sampling inside one set
    cannot flip the gap status of triangles in another.  Deterministic:
    sets are numbered by their lowest triangle id.
    """
    ids = sorted(_gap_id(tri, g) for g in gaps)
    uf = _UnionFind(ids)
    by_site = {}
    for t in ids:
        base = 3 * t
        for i in range(3):
            s = tri.vsite[tri.tv[base + i]]
            if s == FRAME_SITE:
                continue
            o = by_site.get(s)
            if o is None:
                by_site[s] = t
            else:
                uf.union(o, t)
    groups = {}
    for t in ids:
        groups.setdefault(uf.find(t), []).append(t)
    out = []
    for k, root in enumerate(sorted(groups)):
        out.append(IndependentGapSet(id=k, triangles=sorted(groups[root])))
    return out


def connected_components(gaps, tri: RegularTriangulation):
    """Maximal groups of gap triangles connected across non-isolating
    edges: each group is one contiguous uncovered region."""
    ids = sorted(_gap_id(tri, g) for g in gaps)
    uf = _UnionFind(ids)
    for (a, b_inst, b) in _gap_adjacency(tri, ids):
        if classify_edge(tri, a, b_inst) is not EdgeClass.BOUNDARY:
            uf.union(a, b)
    groups = {}
    for t in ids:
        groups.setdefault(uf.find(t), []).append(t)
    return [sorted(groups[r]) for r in sorted(groups)]


def _gap_id(tri, g):
    if isinstance(g, GapTriangle):
        tid, ver = g.triangle
        if not tri.ref_current(tid, ver):
            raise StaleReference(f"gap triangle {tid} no longer current")
        return tid
    return int(g)


def extract_primitive(g, tri: RegularTriangulation,
                      r_min: Optional[float] = None,
                      eps_gap: Optional[float] = None) -> GapPrimitive:
    """The gap triangle's convex share of the uncovered region (ccw).

    Raises DegeneratePrimitive when the polygon collapses below the area
    floor; callers doing bulk extraction drop and log these.
    """
    t = _gap_id(tri, g)
    tri.ensure_caches()
    if r_min is None:
        r_min = min_radius(tri)
    if eps_gap is None:
        eps_gap = EPS_GAP_FACTOR * r_min * r_min
    tv, tn = tri.tv, tri.tn
    vx, vy, vw = tri.vx, tri.vy, tri.vw
    base = 3 * t
    pts = []
    prov = []
    c_own = (tri.tcx[t], tri.tcy[t])
    for i in range(3):
        u = tv[base + (i + 1) % 3]
        v = tv[base + (i + 2) % 3]
        ux, uy = vx[u], vy[u]
        wx, wy = vx[v], vy[v]
        r0 = math.sqrt(max(vw[u], 0.0))
        r1 = math.sqrt(max(vw[v], 0.0))
        n = tn[base + i]
        same_side = False
        crossed = None
        if n >= 0:
            s0 = orient2d(ux, uy, wx, wy, c_own[0], c_own[1])
            s1 = orient2d(ux, uy, wx, wy, tri.tcx[n], tri.tcy[n])
            if s0 * s1 > 0:
                if s0 < 0:
                    # own power center escaped through this edge: the chord
                    # toward it bounds this triangle's share of the region
                    same_side = True
                    crossed = c_own
                elif not _is_frame(tri, n) and tri.tpw[n] > eps_gap:
                    # a gap neighbor's center intruded: mirror its chord so
                    # the two primitives share the splitting edge exactly
                    same_side = True
                    crossed = (tri.tcx[n], tri.tcy[n])
                # otherwise the neighbor is covered; its disks seal the
                # edge and the plain per-edge rule below applies
        if same_side:
            ax, ay = crossed[0] - ux, crossed[1] - uy
            da = math.hypot(ax, ay)
            bx, by = crossed[0] - wx, crossed[1] - wy
            db = math.hypot(bx, by)
            if da == 0.0 or db == 0.0:
                continue
            pts.append((ux + r0 * ax / da, uy + r0 * ay / da))
            prov.append(Provenance.POWER_CENTER)
            pts.append((wx + r1 * bx / db, wy + r1 * by / db))
            prov.append(Provenance.POWER_CENTER)
            continue
        d2 = (wx - ux) ** 2 + (wy - uy) ** 2
        if d2 <= (r0 + r1) ** 2:
            inter = disk_disk_intersections((ux, uy, r0), (wx, wy, r1))
            if not inter:
                continue
            # the intersection left of the directed edge (triangle side)
            p = inter[0]
            if len(inter) == 2:
                p = inter[0] if orient2d(ux, uy, wx, wy, inter[0][0],
                                         inter[0][1]) >= 0 else inter[1]
            pts.append(p)
            prov.append(Provenance.DISK_DISK)
        else:
            d = math.sqrt(d2)
            ex, ey = (wx - ux) / d, (wy - uy) / d
            pts.append((ux + r0 * ex, uy + r0 * ey))
            prov.append(Provenance.DISK_EDGE)
            pts.append((wx - r1 * ex, wy - r1 * ey))
            prov.append(Provenance.DISK_EDGE)
    # drop consecutive (near-)duplicates from tangent configurations
    tol = 1e-12 * max(r_min, 1e-300)
    clean = []
    cprov = []
    for p, pr in zip(pts, prov):
        if clean and abs(p[0] - clean[-1][0]) <= tol \
                and abs(p[1] - clean[-1][1]) <= tol:
            continue
        clean.append(p)
        cprov.append(pr)
    if len(clean) > 1 and abs(clean[0][0] - clean[-1][0]) <= tol \
            and abs(clean[0][1] - clean[-1][1]) <= tol:
        clean.pop()
        cprov.pop()
    prim = GapPrimitive(owner=(t, tri.tbirth[t]), vertices=clean,
                        provenance=cprov)
    if len(clean) < 3 or prim.area() < DEGENERATE_AREA_FACTOR * r_min * r_min:
        raise DegeneratePrimitive(
            f"triangle {t}: {len(clean)} vertices, area {prim.area():.3e}")
    return prim


def _is_frame(tri, t):
    base = 3 * t
    for i in range(3):
        if tri.vsite[tri.tv[base + i]] == FRAME_SITE:
            return True
    return False


def extract_all_primitives(tri: RegularTriangulation,
                           eps_gap: Optional[float] = None,
                           dropped_log: Optional[list] = None):
    """Detect, cluster, and extract; primitives grouped into their sets.

    Returns (primitives, igs_list).  Degenerate primitives are dropped;
    their owner ids are appended to dropped_log when given.
    """
    if eps_gap is None:
        eps_gap = default_eps_gap(tri)
    gaps = detect_gaps(tri, eps_gap)
    igs = cluster_igs(gaps, tri)
    r_min = min_radius(tri)
    prims = []
    by_tri = {}
    for g in gaps:
        try:
            p = extract_primitive(g, tri, r_min=r_min, eps_gap=eps_gap)
        except DegeneratePrimitive:
            if dropped_log is not None:
                dropped_log.append(g.triangle[0])
            continue
        prims.append(p)
        by_tri[g.triangle[0]] = p
    for s in igs:
        s.primitives = [by_tri[t] for t in s.triangles if t in by_tri]
        s.total_area = sum(p.area() for p in s.primitives)
    return prims, igs


# ----------------------------------------------------------------------
# differential gap state

class GapState:
    """detect_gaps kept current across mutations at local cost.

    Feed it the triangulation's mutation drain after each batch; the
    resulting gap set is identical to a full recomputation (tested that
    way).  Reads raise StaleReference when the state fell behind.
    """

    def __init__(self, tri: RegularTriangulation,
                 eps_gap: Optional[float] = None):
        self.tri = tri
        self.eps_gap = eps_gap if eps_gap is not None else default_eps_gap(tri)
        self.gap_ids: set = set()
        self.synced_version = -1
        self.recompute_full()

    def recompute_full(self):
        self.tri.drain_mutations()
        self.gap_ids = {g.triangle[0] for g in detect_gaps(self.tri,
                                                           self.eps_gap)}
        self.synced_version = self.tri.version

    def invalidate(self, destroyed):
        for t in destroyed:
            self.gap_ids.discard(t)

    def recompute_local(self, created):
        """Re-evaluate the given triangles; state becomes current."""
        tri = self.tri
        tri.ensure_caches()
        eps = self.eps_gap
        for t in created:
            if not tri.talive[t]:
                continue
            if tri._domain_tri[t] and tri.tpw[t] > eps:
                self.gap_ids.add(t)
            else:
                self.gap_ids.discard(t)
        self.synced_version = tri.version

    def update(self):
        """Drain the triangulation's mutation log and fold it in."""
        created, destroyed = self.tri.drain_mutations()
        self.invalidate(destroyed)
        self.recompute_local(created)

    def gaps(self):
        if self.synced_version != self.tri.version:
            raise StaleReference(
                "gap state is behind the triangulation; call update()")
        birth = self.tri.tbirth
        return [GapTriangle(triangle=(t, birth[t]),
                            power_center=(self.tri.tcx[t], self.tri.tcy[t]),
                            power=self.tri.tpw[t])
                for t in sorted(self.gap_ids)]


# ----------------------------------------------------------------------
# bounded-domain boundary gaps

def clip_boundary_gaps(tri_or_sites, domain) -> list:
    """Uncovered pieces along a bounded domain's boundary.

    For each site whose power cell touches the domain boundary, the piece
    is (cell ∩ domain) minus the site's disk; disks enter as inscribed
    32-gons (chords subtending <= pi/16), which under-cover, so every
    truly uncovered boundary point stays inside some returned piece.
    Pieces come back triangulated (fans), tagged as split artifacts.

    Accepts a triangulation or a bare list of (x, y, r) records (the cell
    structure degenerates gracefully below 3 sites).
    """
    import shapely
    from shapely.geometry import Polygon
    from shapely.validation import explain_validity

    dom_poly = _domain_to_shapely(domain)
    if not dom_poly.is_valid:
        raise InvalidPolygon(explain_validity(dom_poly))
    cells = _power_cells(tri_or_sites, dom_poly)
    out = []
    for (x, y, r), cell in cells:
        piece = cell.intersection(dom_poly)
        if piece.is_empty:
            continue
        piece = piece.difference(Polygon(_inscribed_polygon(x, y, r)))
        if piece.is_empty:
            continue
        for poly in getattr(piece, "geoms", [piece]):
            if poly.geom_type != "Polygon" or poly.area <= 0:
                continue
            out.extend(_fan_triangulate(poly))
    return out


def _domain_to_shapely(domain):
    from shapely.geometry import Polygon, box
    if hasattr(domain, "to_shapely"):
        return domain.to_shapely()
    if hasattr(domain, "bounds") and not isinstance(domain, (list, tuple)):
        return domain
    if isinstance(domain, (list, tuple)) and len(domain) == 4 \
            and all(isinstance(v, (int, float)) for v in domain):
        return box(*domain)
    rings = list(domain)
    return Polygon(rings[0], rings[1:])


def _inscribed_polygon(x, y, r, max_angle=BOUNDARY_CHORD_ANGLE):
    """Regular polygon inside the disk (vertices on the circle).

    Subtracting a subset of the disk keeps the result a superset of the
    truly uncovered region; candidates landing in the chord slivers are
    culled by the exact-circle rejection test downstream.
    """
    n = max(8, int(math.ceil(2.0 * math.pi / max_angle)))
    return [(x + r * math.cos(2.0 * math.pi * k / n),
             y + r * math.sin(2.0 * math.pi * k / n))
            for k in range(n)]


def _power_cells(tri_or_sites, dom_poly):
    """(site, shapely cell) pairs covering the domain."""
    from shapely.geometry import Polygon

    minx, miny, maxx, maxy = dom_poly.bounds
    pad = 2.0 * max(maxx - minx, maxy - miny) + 1.0
    clip = (minx - pad, miny - pad, maxx + pad, maxy + pad)
    if isinstance(tri_or_sites, RegularTriangulation):
        tri = tri_or_sites
        out = []
        for sid, s in sorted(tri.sites.items()):
            if not s[4]:
                continue
            poly = tri.power_cell(sid, clip_box=clip)
            if len(poly) >= 3:
                out.append(((s[0], s[1], s[2]), Polygon(poly)))
        return out
    sites = [(float(x), float(y), float(r)) for (x, y, r) in tri_or_sites]
    if len(sites) == 0:
        return []
    if len(sites) == 1:
        from shapely.geometry import box
        return [(sites[0], box(*clip))]
    if len(sites) == 2:
        return [(s, _halfplane_cell(s, o, clip))
                for s, o in (sites, reversed(sites))]
    tri = _build_for_cells(sites)
    out = []
    for sid, s in sorted(tri.sites.items()):
        if not s[4]:
            continue
        poly = tri.power_cell(sid, clip_box=clip)
        if len(poly) >= 3:
            out.append(((s[0], s[1], s[2]), Polygon(poly)))
    return out


def _build_for_cells(sites):
    from .triangulation import build
    return build(sites, periodic=False)


def _halfplane_cell(s, other, clip):
    """Power cell of s against one competitor: clip box cut by the radical
    axis."""
    from shapely.geometry import box
    (x0, y0, r0) = s
    (x1, y1, r1) = other
    dx, dy = x1 - x0, y1 - y0
    d2 = dx * dx + dy * dy
    if d2 == 0.0:
        return box(*clip)
    # points p with |p-s0|^2 - r0^2 <= |p-s1|^2 - r1^2
    # <=> 2 p.(s1-s0) <= |s1|^2 - |s0|^2 - r1^2 + r0^2
    rhs = (x1 * x1 + y1 * y1 - x0 * x0 - y0 * y0 - r1 * r1 + r0 * r0) / 2.0
    big = box(*clip)
    # cut the box along 2 p.(d) = rhs... build a large halfplane polygon
    nx, ny = dx, dy
    nn = math.hypot(nx, ny)
    nx, ny = nx / nn, ny / nn
    c = rhs / nn   # p.n <= c
    # a point on the line
    px, py = nx * c, ny * c
    ext = 10.0 * (abs(clip[2] - clip[0]) + abs(clip[3] - clip[1]))
    tx, ty = -ny, nx
    from shapely.geometry import Polygon
    half = Polygon([
        (px + tx * ext, py + ty * ext),
        (px - tx * ext, py - ty * ext),
        (px - tx * ext - nx * ext, py - ty * ext - ny * ext),
        (px + tx * ext - nx * ext, py + ty * ext - ny * ext)])
    return big.intersection(half)


def _fan_triangulate(poly) -> list:
    """Triangulate a shapely polygon into AUX_SPLIT-tagged primitives."""
    import shapely
    out = []
    tris = None
    if hasattr(shapely, "constrained_delaunay_triangles"):
        try:
            tris = shapely.constrained_delaunay_triangles(poly)
        except Exception:
            tris = None
    if tris is not None:
        for g in getattr(tris, "geoms", [tris]):
            if g.is_empty or g.area <= 0:
                continue
            coords = list(g.exterior.coords)[:-1]
            if _poly_area(coords) < 0:
                coords.reverse()
            out.append(GapPrimitive(owner=(-1, -1), vertices=coords,
                                    provenance=[Provenance.AUX_SPLIT] * len(coords)))
        return out
    # convex-ish fallback: fan from the first vertex of the exterior ring
    coords = list(poly.exterior.coords)[:-1]
    if _poly_area(coords) < 0:
        coords.reverse()
    for i in range(1, len(coords) - 1):
        tri = [coords[0], coords[i], coords[i + 1]]
        if _poly_area(tri) > 0:
            out.append(GapPrimitive(owner=(-1, -1), vertices=tri,
                                    provenance=[Provenance.AUX_SPLIT] * 3))
    return out


def _poly_area(coords) -> float:
    s = 0.0
    n = len(coords)
    for i in range(n):
        x0, y0 = coords[i]
        x1, y1 = coords[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * s
