"""Dynamic 2D regular (weighted Delaunay) triangulation.

Sites are disks; weight = r^2.  The triangulation is the projection of the
lower convex hull of sites lifted to (x, y, x^2 + y^2 - w): bulk
construction delegates the lifted hull to Qhull (scipy), while incremental
insertion (conflict-region carve) and deletion (ear-style cavity refill)
are implemented here so the sampler can update locally with hints.

Two implementation choices shape everything below:

* Four far-away "frame" corners (weight 0) enclose every real site, so all
  real inserts and deletes are interior operations -- no infinite-vertex
  bookkeeping.  Triangles touching a frame corner are invisible to domain
  queries, and locate() reports OutsideHull when the query falls in frame
  territory.

* Periodic domains are handled by 3x3 replication.  Every site owns nine
  vertex copies; queries expose only "canonical" triangles (the instance
  whose lexicographically-least (site, tile) vertex lies in the center
  tile), so each torus triangle is counted exactly once.

Storage is flat Python lists (triangle t occupies slots 3t..3t+2 of `tv`
and `tn`; `tn[3t+i]` is the neighbor opposite vertex i) -- list indexing
beats numpy scalar access in the mutation hot paths -- with numpy views
built on demand for the vectorized passes (power centers, audits).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (AllCollinear, ConflictError, OutsideDomain,
                     RedundantSite, StaleReference, TooFewSites,
                     TriangulationError, UnknownSite)
from .geometry import WeightedSite, power_center
from .predicates import orient2d, power_conflict

FRAME_SITE = -2          # vsite value for frame corners
CENTER_TILE = 4          # tile index of the canonical copy (3x3, row-major)
_TILES = [(tx, ty) for ty in (-1, 0, 1) for tx in (-1, 0, 1)]

EPS_REG_FACTOR = 1e-10   # regularity audit slack, scaled by diam^2


class OutsideHullType:
    """Singleton return value for locate() outside the site hull."""

    def __repr__(self):
        return "OutsideHull"


OutsideHull = OutsideHullType()


@dataclass(frozen=True)
class TriangleRef:
    """Stable external handle: (id, version) plus cached dual geometry."""

    id: int
    version: int
    vertices: tuple          # 3 site ids, ccw
    neighbors: tuple         # 3 triangle ids (neighbor[i] opposite vertex[i])
    cached_center: tuple
    cached_power: float


class RegularTriangulation:
    """See module docstring.  Single-writer; reads may interleave."""

    def __init__(self, periodic: bool = False):
        self.periodic = periodic
        self.version = 0
        # vertex slots
        self.vx: list = []
        self.vy: list = []
        self.vw: list = []
        self.vsite: list = []     # canonical site id, FRAME_SITE for frame
        self.vtile: list = []     # 0..8 replication tile (CENTER_TILE if none)
        self.vtri: list = []      # one incident live triangle (-1 = dead)
        self._free_v: list = []
        # triangle slots (flat, stride 3)
        self.tv: list = []
        self.tn: list = []
        self.talive: list = []
        self.tbirth: list = []    # version at creation; pairs with id in refs
        self._free_t: list = []
        # lazy per-triangle dual caches
        self.tcx: list = []
        self.tcy: list = []
        self.tpw: list = []
        self._cache_ok: list = []
        self._domain_tri: list = []   # 1 = canonical non-frame triangle
        self._dirty: set = set()
        # site registry: id -> [x, y, r, (vertex ids), alive]
        self.sites: dict = {}
        self._next_site = 0
        self._tile_hint: dict = {}    # tile -> recently touched vertex
        # mutation log for differential gap updates
        self._created: list = []
        self._destroyed: list = []
        self._rng = random.Random(0x5EED)

    # ------------------------------------------------------------------
    # basic accessors

    def n_sites(self) -> int:
        return sum(1 for s in self.sites.values() if s[4])

    def n_vertices(self) -> int:
        return len(self.vx) - len(self._free_v)

    def live_triangles(self):
        talive = self.talive
        return [t for t in range(len(talive)) if talive[t]]

    def domain_triangles(self):
        """Live triangles visible to queries: no frame vertex; for periodic
        domains only the canonical instance of each torus triangle."""
        self.ensure_caches()
        dom = self._domain_tri
        talive = self.talive
        return [t for t in range(len(talive)) if talive[t] and dom[t]]

    def triangle_sites(self, t):
        return (self.vsite[self.tv[3 * t]], self.vsite[self.tv[3 * t + 1]],
                self.vsite[self.tv[3 * t + 2]])

    def triangle_ref(self, t) -> TriangleRef:
        if not self.talive[t]:
            raise StaleReference(f"triangle {t} is dead")
        self.ensure_caches()
        return TriangleRef(
            id=t, version=self.tbirth[t],
            vertices=self.triangle_sites(t),
            neighbors=(self.tn[3 * t], self.tn[3 * t + 1], self.tn[3 * t + 2]),
            cached_center=(self.tcx[t], self.tcy[t]),
            cached_power=self.tpw[t])

    def ref_current(self, tid, version) -> bool:
        """True iff (tid, version) still names the same live triangle."""
        return (0 <= tid < len(self.talive) and self.talive[tid]
                and self.tbirth[tid] == version)

    def triangle_coords(self, t):
        tv = self.tv
        a, b, c = tv[3 * t], tv[3 * t + 1], tv[3 * t + 2]
        return ((self.vx[a], self.vy[a]), (self.vx[b], self.vy[b]),
                (self.vx[c], self.vy[c]))

    def triangle_disks(self, t):
        """The three (x, y, r) disks at the triangle's vertices."""
        tv = self.tv
        out = []
        for k in range(3):
            v = tv[3 * t + k]
            out.append((self.vx[v], self.vy[v], math.sqrt(max(self.vw[v], 0.0))))
        return out

    def site_radius(self, sid):
        return self.sites[sid][2]

    def site_center(self, sid):
        s = self.sites[sid]
        return (s[0], s[1])

    def drain_mutations(self):
        """Created/destroyed triangle ids since the last drain (destroyed
        first; an id in both lists was freed and reused)."""
        c, d = self._created, self._destroyed
        self._created, self._destroyed = [], []
        return c, d

    def diameter(self) -> float:
        xs = [s[0] for s in self.sites.values() if s[4]]
        ys = [s[1] for s in self.sites.values() if s[4]]
        if not xs:
            return 1.0
        return max(max(xs) - min(xs), max(ys) - min(ys), 1e-30) * math.sqrt(2.0)

    # ------------------------------------------------------------------
    # slot management

    def _alloc_vertex(self, x, y, w, site, tile):
        if self._free_v:
            v = self._free_v.pop()
            self.vx[v] = x
            self.vy[v] = y
            self.vw[v] = w
            self.vsite[v] = site
            self.vtile[v] = tile
            self.vtri[v] = -1
        else:
            v = len(self.vx)
            self.vx.append(x)
            self.vy.append(y)
            self.vw.append(w)
            self.vsite.append(site)
            self.vtile.append(tile)
            self.vtri.append(-1)
        return v

    def _free_vertex(self, v):
        self.vtri[v] = -1
        self.vsite[v] = -9
        self._free_v.append(v)

    def _alloc_triangle(self, a, b, c):
        if self._free_t:
            t = self._free_t.pop()
            base = 3 * t
            self.tv[base] = a
            self.tv[base + 1] = b
            self.tv[base + 2] = c
            self.tn[base] = -1
            self.tn[base + 1] = -1
            self.tn[base + 2] = -1
            self.talive[t] = True
            self.tbirth[t] = self.version
            self._cache_ok[t] = 0
        else:
            t = len(self.talive)
            self.tv.extend((a, b, c))
            self.tn.extend((-1, -1, -1))
            self.talive.append(True)
            self.tbirth.append(self.version)
            self.tcx.append(0.0)
            self.tcy.append(0.0)
            self.tpw.append(0.0)
            self._cache_ok.append(0)
            self._domain_tri.append(0)
        self._dirty.add(t)
        self._created.append(t)
        return t

    def _free_triangle(self, t):
        self.talive[t] = False
        self._dirty.discard(t)
        self._free_t.append(t)
        self._destroyed.append(t)

    # ------------------------------------------------------------------
    # caches

    def ensure_caches(self):
        """Recompute power centers/powers and domain flags for dirty
        triangles (vectorized when the batch is large)."""
        if not self._dirty:
            return
        ids = [t for t in self._dirty if self.talive[t]]
        self._dirty.clear()
        if not ids:
            return
        if len(ids) < 64:
            for t in ids:
                self._cache_one(t)
            return
        tvn = np.asarray(self.tv, dtype=np.int64).reshape(-1, 3)[ids]
        vx = np.asarray(self.vx)
        vy = np.asarray(self.vy)
        vw = np.asarray(self.vw)
        ax, ay, wa = vx[tvn[:, 0]], vy[tvn[:, 0]], vw[tvn[:, 0]]
        bx, by, wb = vx[tvn[:, 1]], vy[tvn[:, 1]], vw[tvn[:, 1]]
        cx, cy, wc = vx[tvn[:, 2]], vy[tvn[:, 2]], vw[tvn[:, 2]]
        abx, aby = bx - ax, by - ay
        acx, acy = cx - ax, cy - ay
        rb = abx * abx + aby * aby + wa - wb
        rc = acx * acx + acy * acy + wa - wc
        det = 2.0 * (abx * acy - aby * acx)
        with np.errstate(divide="ignore", invalid="ignore"):
            px = (rb * acy - rc * aby) / det
            py = (abx * rc - acx * rb) / det
        ccx = ax + px
        ccy = ay + py
        pw = px * px + py * py - wa
        vsite = np.asarray(self.vsite, dtype=np.int64)
        vtile = np.asarray(self.vtile, dtype=np.int64)
        s3 = vsite[tvn]
        frame_free = (s3 != FRAME_SITE).all(axis=1)
        if self.periodic:
            key = s3 * 16 + vtile[tvn]
            amin = key.argmin(axis=1)
            min_tile = vtile[tvn[np.arange(len(ids)), amin]]
            dom = frame_free & (min_tile == CENTER_TILE)
        else:
            dom = frame_free
        for k, t in enumerate(ids):
            self.tcx[t] = float(ccx[k])
            self.tcy[t] = float(ccy[k])
            self.tpw[t] = float(pw[k])
            self._domain_tri[t] = 1 if dom[k] else 0
            self._cache_ok[t] = 1

    def _cache_one(self, t):
        base = 3 * t
        a, b, c = self.tv[base], self.tv[base + 1], self.tv[base + 2]
        ax, ay, wa = self.vx[a], self.vy[a], self.vw[a]
        abx = self.vx[b] - ax
        aby = self.vy[b] - ay
        acx = self.vx[c] - ax
        acy = self.vy[c] - ay
        rb = abx * abx + aby * aby + wa - self.vw[b]
        rc = acx * acx + acy * acy + wa - self.vw[c]
        det = 2.0 * (abx * acy - aby * acx)
        if det == 0.0:
            px = py = math.inf
        else:
            px = (rb * acy - rc * aby) / det
            py = (abx * rc - acx * rb) / det
        self.tcx[t] = ax + px
        self.tcy[t] = ay + py
        self.tpw[t] = px * px + py * py - wa
        frame_free = (self.vsite[a] != FRAME_SITE and self.vsite[b] != FRAME_SITE
                      and self.vsite[c] != FRAME_SITE)
        if self.periodic and frame_free:
            best = min((self.vsite[v] * 16 + self.vtile[v], self.vtile[v])
                       for v in (a, b, c))
            self._domain_tri[t] = 1 if best[1] == CENTER_TILE else 0
        else:
            self._domain_tri[t] = 1 if frame_free else 0
        self._cache_ok[t] = 1

    # ------------------------------------------------------------------
    # point location

    def _walk(self, qx, qy, hint: int):
        """Stochastic visibility walk to a triangle containing (qx, qy)."""
        tv, tn = self.tv, self.tn
        vx, vy = self.vx, self.vy
        t = hint
        if t < 0 or t >= len(self.talive) or not self.talive[t]:
            t = self._any_live_triangle()
        nsteps = 0
        cap = 64 + 4 * int(math.sqrt(len(self.talive) + 1.0)) * 8
        shift = self._rng.randrange(3)
        while True:
            base = 3 * t
            nxt = -1
            for k in range(3):
                i = (k + shift) % 3
                u = tv[base + (i + 1) % 3]
                v = tv[base + (i + 2) % 3]
                if orient2d(vx[u], vy[u], vx[v], vy[v], qx, qy) < 0:
                    nxt = tn[base + i]
                    break
            if nxt < 0:
                return t
            t = nxt
            nsteps += 1
            if nsteps > cap:
                # defensive restart: exhaustive scan (degenerate walks only)
                return self._locate_scan(qx, qy)
            shift = self._rng.randrange(3)

    def _any_live_triangle(self):
        for t in range(len(self.talive) - 1, -1, -1):
            if self.talive[t]:
                return t
        raise TooFewSites("empty triangulation")

    def _locate_scan(self, qx, qy):
        tv = self.tv
        vx, vy = self.vx, self.vy
        for t in range(len(self.talive)):
            if not self.talive[t]:
                continue
            base = 3 * t
            ok = True
            for i in range(3):
                u = tv[base + (i + 1) % 3]
                v = tv[base + (i + 2) % 3]
                if orient2d(vx[u], vy[u], vx[v], vy[v], qx, qy) < 0:
                    ok = False
                    break
            if ok:
                return t
        raise TriangulationError("query outside the frame box")

    def locate(self, q, hint: Optional[int] = None):
        """Triangle containing q, or OutsideHull beyond the site hull.

        Ties (q exactly on an edge/vertex) resolve to the lowest incident
        triangle id, deterministically.
        """
        qx, qy = q
        t = self._walk(qx, qy, hint if hint is not None else -1)
        # gather the tie set across exactly-touching edges
        best = t
        seen = {t}
        stack = [t]
        tv, tn = self.tv, self.tn
        vx, vy = self.vx, self.vy
        while stack:
            cur = stack.pop()
            base = 3 * cur
            for i in range(3):
                u = tv[base + (i + 1) % 3]
                v = tv[base + (i + 2) % 3]
                if orient2d(vx[u], vy[u], vx[v], vy[v], qx, qy) == 0:
                    n = tn[base + i]
                    if n >= 0 and n not in seen and self._contains(n, qx, qy):
                        seen.add(n)
                        stack.append(n)
                        if n < best:
                            best = n
        base = 3 * best
        for k in range(3):
            if self.vsite[tv[base + k]] == FRAME_SITE:
                return OutsideHull
        return best

    def _contains(self, t, qx, qy):
        tv = self.tv
        vx, vy = self.vx, self.vy
        base = 3 * t
        for i in range(3):
            u = tv[base + (i + 1) % 3]
            v = tv[base + (i + 2) % 3]
            if orient2d(vx[u], vy[u], vx[v], vy[v], qx, qy) < 0:
                return False
        return True

    # ------------------------------------------------------------------
    # incremental insertion

    def _insert_vertex(self, x, y, w, site, tile, hint=-1):
        """Conflict-region (Bowyer-Watson) insertion of one vertex copy.

        Raises RedundantSite when the point would be hidden, or when carving
        would hide an existing vertex; the structure is untouched in both
        cases (the conflict search is read-only).
        """
        tv, tn = self.tv, self.tn
        vx, vy, vw = self.vx, self.vy, self.vw
        t0 = self._walk(x, y, hint)
        base = 3 * t0
        a, b, c = tv[base], tv[base + 1], tv[base + 2]
        if power_conflict(vx[a], vy[a], vw[a], vx[b], vy[b], vw[b],
                          vx[c], vy[c], vw[c], x, y, w) <= 0:
            raise RedundantSite(site_id=site)
        # breadth-first conflict region; read-only.  Boundary records the
        # outer triangle's slot now: triangle ids are recycled during the
        # carve, so an id-based lookup later would be ambiguous.
        cavity = [t0]
        state = {t0: True}
        boundary = []   # (u, v, outer_tri, outer_slot) ccw around the cavity
        qi = 0
        while qi < len(cavity):
            t = cavity[qi]
            qi += 1
            base = 3 * t
            for i in range(3):
                n = tn[base + i]
                u = tv[base + (i + 1) % 3]
                v = tv[base + (i + 2) % 3]
                if n < 0:
                    boundary.append((u, v, -1, -1))
                    continue
                st = state.get(n)
                if st is None:
                    nb = 3 * n
                    na, nbv, nc = tv[nb], tv[nb + 1], tv[nb + 2]
                    if power_conflict(vx[na], vy[na], vw[na],
                                      vx[nbv], vy[nbv], vw[nbv],
                                      vx[nc], vy[nc], vw[nc], x, y, w) > 0:
                        state[n] = True
                        cavity.append(n)
                        continue
                    state[n] = False
                elif st is True:
                    continue
                nb = 3 * n
                slot = 0 if tn[nb] == t else (1 if tn[nb + 1] == t else 2)
                boundary.append((u, v, n, slot))
        if len(boundary) != len(cavity) + 2:
            # an existing vertex lies strictly inside the conflict region:
            # inserting would hide it
            raise RedundantSite(
                "insertion would hide an existing vertex", site_id=site)
        nv = self._alloc_vertex(x, y, w, site, tile)
        succ = {}
        for (u, v, outer, oslot) in boundary:
            succ[u] = (v, outer, oslot)
        if len(succ) != len(boundary):
            self._free_vertex(nv)
            raise RedundantSite("pinched conflict region", site_id=site)
        for t in cavity:
            self._free_triangle(t)
        # fan the cavity from the new vertex, walking the boundary cycle
        u0 = boundary[0][0]
        new_tris = []
        u = u0
        while True:
            v, outer, oslot = succ[u]
            t_new = self._alloc_triangle(nv, u, v)
            nb = 3 * t_new
            tn[nb] = outer
            if outer >= 0:
                tn[3 * outer + oslot] = t_new
            self.vtri[u] = t_new
            self.vtri[v] = t_new
            new_tris.append(t_new)
            u = v
            if u == u0:
                break
        k = len(new_tris)
        if k != len(boundary):
            raise TriangulationError(
                "cavity boundary is not a single cycle; structure corrupt")
        for idx in range(k):
            t_new = new_tris[idx]
            nb = 3 * t_new
            tn[nb + 1] = new_tris[(idx + 1) % k]   # across (nv, v)
            tn[nb + 2] = new_tris[(idx - 1) % k]   # across (nv, u)
        self.vtri[nv] = new_tris[0]
        self.version += 1
        self._tile_hint[tile] = nv
        return nv, new_tris

    # ------------------------------------------------------------------
    # deletion

    def _remove_vertex(self, v):
        """Delete one vertex copy and refill its star (ear method with exact
        regularity checks against the remaining ring vertices)."""
        tv, tn = self.tv, self.tn
        t0 = self.vtri[v]
        star = []
        ring = []          # ccw ring vertices
        outer = []         # (outer triangle, its slot facing the star)
        t = t0
        while True:
            base = 3 * t
            s = 0 if tv[base] == v else (1 if tv[base + 1] == v else 2)
            a = tv[base + (s + 1) % 3]
            star.append(t)
            ring.append(a)
            out_t = tn[base + s]
            if out_t >= 0:
                ob = 3 * out_t
                oslot = 0 if tn[ob] == t else (1 if tn[ob + 1] == t else 2)
            else:
                oslot = -1
            outer.append((out_t, oslot))
            t = tn[base + (s + 1) % 3]
            if t == t0:
                break
        k = len(ring)
        if k < 3:
            raise TriangulationError("ring smaller than 3; structure corrupt")
        for t in star:
            self._free_triangle(t)
        outer_map = {}
        for i in range(k):
            outer_map[(ring[i], ring[(i + 1) % k])] = outer[i]
        vx, vy, vw = self.vx, self.vy, self.vw
        work = list(ring)
        new_tris = []
        while len(work) > 3:
            n = len(work)
            cut = -1
            for i in range(n):
                p = work[(i - 1) % n]
                q = work[i]
                r = work[(i + 1) % n]
                if orient2d(vx[p], vy[p], vx[q], vy[q], vx[r], vy[r]) <= 0:
                    continue
                ok = True
                for j in range(n):
                    d = work[j]
                    if d == p or d == q or d == r:
                        continue
                    if power_conflict(vx[p], vy[p], vw[p], vx[q], vy[q], vw[q],
                                      vx[r], vy[r], vw[r],
                                      vx[d], vy[d], vw[d]) > 0:
                        ok = False
                        break
                if ok:
                    cut = i
                    break
            if cut < 0:
                # near-degenerate tie cluster: take the strictly convex ear
                # with the least-bad worst margin (float, not exact)
                best_i, best_m = -1, math.inf
                for i in range(n):
                    p = work[(i - 1) % n]
                    q = work[i]
                    r = work[(i + 1) % n]
                    if orient2d(vx[p], vy[p], vx[q], vy[q], vx[r], vy[r]) <= 0:
                        continue
                    try:
                        cx_, cy_ = power_center((vx[p], vy[p], vw[p]),
                                                (vx[q], vy[q], vw[q]),
                                                (vx[r], vy[r], vw[r]))
                    except Exception:
                        continue
                    pw = (cx_ - vx[p]) ** 2 + (cy_ - vy[p]) ** 2 - vw[p]
                    worst = -math.inf
                    for j in range(n):
                        d = work[j]
                        if d == p or d == q or d == r:
                            continue
                        m = pw - ((cx_ - vx[d]) ** 2 + (cy_ - vy[d]) ** 2
                                  - vw[d])
                        worst = max(worst, m)
                    if worst < best_m:
                        best_m, best_i = worst, i
                if best_i < 0:
                    raise TriangulationError("cavity refill stalled")
                cut = best_i
            p = work[(cut - 1) % n]
            q = work[cut]
            r = work[(cut + 1) % n]
            new_tris.append((p, q, r))
            work.pop(cut)
        p, q, r = work
        if orient2d(vx[p], vy[p], vx[q], vy[q], vx[r], vy[r]) <= 0:
            raise TriangulationError("degenerate final ear")
        new_tris.append((p, q, r))
        # materialize and wire
        edge_map = {}
        ids = []
        for (p, q, r) in new_tris:
            t_new = self._alloc_triangle(p, q, r)
            ids.append(t_new)
            edge_map[(p, q)] = (t_new, 2)
            edge_map[(q, r)] = (t_new, 0)
            edge_map[(r, p)] = (t_new, 1)
            self.vtri[p] = t_new
            self.vtri[q] = t_new
            self.vtri[r] = t_new
        for (a, b), (t_new, slot) in edge_map.items():
            rev = edge_map.get((b, a))
            if rev is not None:
                tn[3 * t_new + slot] = rev[0]
            else:
                out_t, oslot = outer_map[(a, b)]
                tn[3 * t_new + slot] = out_t
                if out_t >= 0:
                    tn[3 * out_t + oslot] = t_new
        self._free_vertex(v)
        self.version += 1
        return ids

    # ------------------------------------------------------------------
    # site-level API (what the sampler and tests use)

    def _copies_of(self, x, y):
        if not self.periodic:
            yield (x, y, CENTER_TILE)
        else:
            for idx, (tx, ty) in enumerate(_TILES):
                yield (x + tx, y + ty, idx)

    def insert_site(self, x, y, r, hint=None) -> int:
        """Insert a site (all replicated copies for periodic domains).

        `hint` is a triangle id near the canonical position; used for the
        canonical copy's walk.  Returns the new site id.
        """
        sid = self._next_site
        self._next_site += 1
        w = r * r
        vids = []
        done = []
        try:
            for (cx, cy, tile) in self._copies_of(x, y):
                h = -1
                if tile == CENTER_TILE and hint is not None:
                    h = hint
                else:
                    hv = self._tile_hint.get(tile, -1)
                    if hv >= 0 and self.vtri[hv] >= 0 and self.vsite[hv] != -9:
                        h = self.vtri[hv]
                nv, _ = self._insert_vertex(cx, cy, w, sid, tile, h)
                vids.append(nv)
                done.append(nv)
        except RedundantSite:
            for nv in done:
                self._remove_vertex(nv)
            raise
        self.sites[sid] = [x, y, r, tuple(vids), True]
        return sid

    def remove_site(self, sid):
        s = self.sites.get(sid)
        if s is None or not s[4]:
            raise UnknownSite(sid)
        if self.n_sites() <= 3 and not self.periodic:
            raise TooFewSites("cannot drop below 3 sites")
        for v in s[3]:
            self._remove_vertex(v)
        s[4] = False
        del self.sites[sid]

    def move_site(self, sid, new_center) -> int:
        s = self.sites.get(sid)
        if s is None or not s[4]:
            raise UnknownSite(sid)
        r = s[2]
        old = (s[0], s[1])
        for v in s[3]:
            self._remove_vertex(v)
        del self.sites[sid]
        try:
            w = r * r
            vids = []
            for (cx, cy, tile) in self._copies_of(*new_center):
                hv = self._tile_hint.get(tile, -1)
                h = self.vtri[hv] if (hv >= 0 and self.vsite[hv] != -9) else -1
                nv, _ = self._insert_vertex(cx, cy, w, sid, tile, h)
                vids.append(nv)
        except RedundantSite:
            # roll back to the old position
            vids = []
            for (cx, cy, tile) in self._copies_of(*old):
                nv, _ = self._insert_vertex(cx, cy, r * r, sid, tile, -1)
                vids.append(nv)
            self.sites[sid] = [old[0], old[1], r, tuple(vids), True]
            raise
        self.sites[sid] = [new_center[0], new_center[1], r, tuple(vids), True]
        return sid

    def set_radius(self, sid, new_r) -> int:
        if not (new_r > 0):
            raise ValueError("radius must be positive")
        s = self.sites.get(sid)
        if s is None or not s[4]:
            raise UnknownSite(sid)
        x, y, old_r = s[0], s[1], s[2]
        for v in s[3]:
            self._remove_vertex(v)
        del self.sites[sid]
        try:
            vids = []
            for (cx, cy, tile) in self._copies_of(x, y):
                hv = self._tile_hint.get(tile, -1)
                h = self.vtri[hv] if (hv >= 0 and self.vsite[hv] != -9) else -1
                nv, _ = self._insert_vertex(cx, cy, new_r * new_r, sid, tile, h)
                vids.append(nv)
        except RedundantSite as e:
            vids = []
            for (cx, cy, tile) in self._copies_of(x, y):
                nv, _ = self._insert_vertex(cx, cy, old_r * old_r, sid, tile, -1)
                vids.append(nv)
            self.sites[sid] = [x, y, old_r, tuple(vids), True]
            raise ConflictError(f"radius change hides a neighbor: {e}") from e
        self.sites[sid] = [x, y, new_r, tuple(vids), True]
        return sid

    # ------------------------------------------------------------------
    # audits & export

    def audit_structure(self):
        """Exact ccw orientation, neighbor symmetry, vtri validity."""
        tv, tn = self.tv, self.tn
        vx, vy = self.vx, self.vy
        for t in range(len(self.talive)):
            if not self.talive[t]:
                continue
            base = 3 * t
            a, b, c = tv[base], tv[base + 1], tv[base + 2]
            if orient2d(vx[a], vy[a], vx[b], vy[b], vx[c], vy[c]) <= 0:
                raise TriangulationError(f"triangle {t} not strictly ccw")
            for i in range(3):
                n = tn[base + i]
                if n < 0:
                    continue
                if not self.talive[n]:
                    raise TriangulationError(f"dead neighbor {n} of {t}")
                if t not in (tn[3 * n], tn[3 * n + 1], tn[3 * n + 2]):
                    raise TriangulationError(f"asymmetric adjacency {t}<->{n}")
                u = tv[base + (i + 1) % 3]
                v = tv[base + (i + 2) % 3]
                nb = 3 * n
                found = False
                for j in range(3):
                    if (tn[nb + j] == t and tv[nb + (j + 1) % 3] == v
                            and tv[nb + (j + 2) % 3] == u):
                        found = True
                        break
                if not found:
                    raise TriangulationError(
                        f"edge mismatch across {t}<->{n}: ({u},{v}) not mirrored")
        for v in range(len(self.vx)):
            if self.vsite[v] == -9:
                continue
            t = self.vtri[v]
            if t < 0 or not self.talive[t]:
                raise TriangulationError(f"vertex {v} lost its triangle")
            if v not in (tv[3 * t], tv[3 * t + 1], tv[3 * t + 2]):
                raise TriangulationError(f"vtri[{v}] does not contain it")

    def audit_regular(self, sample=1000, rng=None, eps=None):
        """Empty-power-circle audit on a site subsample (vectorized).

        For each sampled vertex s and every live triangle t not incident to
        s:  power(s, c_t as weight-0) >= Pi(t) - eps.
        """
        self.ensure_caches()
        if eps is None:
            d = self.diameter()
            eps = EPS_REG_FACTOR * d * d
        live = self.live_triangles()
        if not live:
            return
        ccx = np.asarray(self.tcx)[live]
        ccy = np.asarray(self.tcy)[live]
        cpw = np.asarray(self.tpw)[live]
        tvn = np.asarray(self.tv, dtype=np.int64).reshape(-1, 3)[live]
        verts = [v for v in range(len(self.vx)) if self.vsite[v] != -9]
        if rng is None:
            rng = random.Random(1234)
        if len(verts) > sample:
            verts = rng.sample(verts, sample)
        for v in verts:
            dx = ccx - self.vx[v]
            dy = ccy - self.vy[v]
            p = dx * dx + dy * dy - self.vw[v]
            bad = np.nonzero(p < cpw - eps)[0]
            for k in bad:
                if v in tvn[k]:
                    continue
                raise TriangulationError(
                    f"regularity violated: vertex {v} vs triangle {live[int(k)]} "
                    f"(margin {float(p[k] - cpw[k]):.3e})")

    def euler_characteristic(self):
        """V - E + F over domain triangles (torus: 0; disk + outer face: 2)."""
        tris = self.domain_triangles()
        if self.periodic:
            V = len({sid for t in tris for sid in self.triangle_sites(t)})
            E = 3 * len(tris) // 2
            return V - E + len(tris)
        verts = set()
        edges = set()
        for t in tris:
            base = 3 * t
            vs = (self.tv[base], self.tv[base + 1], self.tv[base + 2])
            verts.update(vs)
            for i in range(3):
                e = (vs[i], vs[(i + 1) % 3])
                edges.add((min(e), max(e)))
        return len(verts) - len(edges) + len(tris) + 1

    def dump_off(self) -> str:
        """OFF-style text over domain triangles (differential testing aid)."""
        tris = self.domain_triangles()
        vids = sorted({v for t in tris for v in
                       (self.tv[3 * t], self.tv[3 * t + 1], self.tv[3 * t + 2])})
        index = {v: i for i, v in enumerate(vids)}
        lines = ["OFF", f"{len(vids)} {len(tris)} 0"]
        for v in vids:
            lines.append(f"{self.vx[v]!r} {self.vy[v]!r} 0")
        for t in tris:
            base = 3 * t
            lines.append("3 " + " ".join(
                str(index[self.tv[base + i]]) for i in range(3)))
        return "\n".join(lines) + "\n"

    def canonical_triangle_key(self, t):
        """Hashable identity of a domain triangle for differential compares:
        sorted (site, dx, dy) triple relative to the lexicographic anchor."""
        base = 3 * t
        vs = [self.tv[base + i] for i in range(3)]
        anchor = min(range(3), key=lambda i: (self.vsite[vs[i]], self.vtile[vs[i]]))
        ax_t, ay_t = _TILES[self.vtile[vs[anchor]]]
        out = []
        for v in vs:
            tx, ty = _TILES[self.vtile[v]]
            out.append((self.vsite[v], tx - ax_t, ty - ay_t))
        return tuple(sorted(out))

    def triangle_multiset(self):
        return sorted(self.canonical_triangle_key(t)
                      for t in self.domain_triangles())

    # ------------------------------------------------------------------
    # power cells

    def power_cell(self, sid, clip_box=None):
        """The site's power cell as a ccw polygon (canonical copy for
        periodic domains), optionally clipped to an axis-aligned box."""
        s = self.sites.get(sid)
        if s is None or not s[4]:
            raise UnknownSite(sid)
        self.ensure_caches()
        v = s[3][CENTER_TILE] if self.periodic else s[3][0]
        t0 = self.vtri[v]
        poly = []
        touches_frame = False
        t = t0
        while True:
            base = 3 * t
            slot = 0 if self.tv[base] == v else (1 if self.tv[base + 1] == v else 2)
            for k in range(3):
                if self.vsite[self.tv[base + k]] == FRAME_SITE:
                    touches_frame = True
            poly.append((self.tcx[t], self.tcy[t]))
            t = self.tn[base + (slot + 1) % 3]
            if t == t0:
                break
        if clip_box is None and touches_frame:
            raise TriangulationError(
                "hull cell is unbounded in spirit; pass clip_box")
        if clip_box is not None:
            poly = _clip_poly_box(poly, clip_box)
        return poly


def _clip_poly_box(poly, box):
    """Sutherland-Hodgman clip of a polygon by an axis-aligned box."""
    (xmin, ymin, xmax, ymax) = box

    def clip(pts, inside, cross):
        out = []
        n = len(pts)
        for i in range(n):
            a = pts[i]
            b = pts[(i + 1) % n]
            ia, ib = inside(a), inside(b)
            if ia:
                out.append(a)
                if not ib:
                    out.append(cross(a, b))
            elif ib:
                out.append(cross(a, b))
        return out

    def xlo(p):
        return p[0] >= xmin

    def xhi(p):
        return p[0] <= xmax

    def ylo(p):
        return p[1] >= ymin

    def yhi(p):
        return p[1] <= ymax

    def cx(a, b, x):
        t = (x - a[0]) / (b[0] - a[0])
        return (x, a[1] + t * (b[1] - a[1]))

    def cy(a, b, y):
        t = (y - a[1]) / (b[1] - a[1])
        return (a[0] + t * (b[0] - a[0]), y)

    poly = clip(poly, xlo, lambda a, b: cx(a, b, xmin))
    if poly:
        poly = clip(poly, xhi, lambda a, b: cx(a, b, xmax))
    if poly:
        poly = clip(poly, ylo, lambda a, b: cy(a, b, ymin))
    if poly:
        poly = clip(poly, yhi, lambda a, b: cy(a, b, ymax))
    return poly


# ----------------------------------------------------------------------
# construction

def build(sites, periodic=False, method="auto") -> RegularTriangulation:
    """Build a regular triangulation over WeightedSite records (or (x, y, r)
    triples).

    method: "auto" (Qhull lifted hull for large inputs, incremental
    otherwise), "bulk", or "incremental".  Both paths produce a regular
    triangulation; the bulk path is the fast default, the incremental path
    doubles as its differential oracle.
    """
    recs = []
    for s in sites:
        if isinstance(s, WeightedSite):
            recs.append((s.x, s.y, s.radius))
        else:
            x, y, r = s
            recs.append((float(x), float(y), float(r)))
    if len(recs) < 3:
        raise TooFewSites(f"need >= 3 sites, got {len(recs)}")
    _check_not_collinear(recs)
    if method == "auto":
        method = "bulk" if len(recs) >= 32 else "incremental"
    if method == "bulk":
        try:
            return _build_bulk(recs, periodic)
        except (TriangulationError, RedundantSite):
            raise
        except Exception:
            return _build_incremental(recs, periodic)
    return _build_incremental(recs, periodic)


def _check_not_collinear(recs):
    x0, y0 = recs[0][0], recs[0][1]
    j = -1
    for i in range(1, len(recs)):
        if recs[i][0] != x0 or recs[i][1] != y0:
            j = i
            break
    if j < 0:
        raise AllCollinear("all sites coincide")
    x1, y1 = recs[j][0], recs[j][1]
    for k in range(1, len(recs)):
        if k == j:
            continue
        if orient2d(x0, y0, x1, y1, recs[k][0], recs[k][1]) != 0:
            return
    raise AllCollinear("all sites exactly collinear")


def _frame_corners(recs, periodic):
    xs = [r[0] for r in recs]
    ys = [r[1] for r in recs]
    pad = 1.0 if periodic else 0.0
    xmin, xmax = min(xs) - pad, max(xs) + pad
    ymin, ymax = min(ys) - pad, max(ys) + pad
    cx = 0.5 * (xmin + xmax)
    cy = 0.5 * (ymin + ymax)
    half = 64.0 * (max(xmax - xmin, ymax - ymin) + 1.0)
    return [(cx - half, cy - half), (cx + half, cy - half),
            (cx + half, cy + half), (cx - half, cy + half)]


def _build_incremental(recs, periodic):
    t = RegularTriangulation(periodic=periodic)
    _seed_frame(t, recs, periodic)
    for (x, y, r) in recs:
        t.insert_site(x, y, r)
    return t


def _seed_frame(t, recs, periodic):
    """Start the structure as the two frame triangles."""
    corners = _frame_corners(recs, periodic)
    vids = [t._alloc_vertex(x, y, 0.0, FRAME_SITE, CENTER_TILE)
            for (x, y) in corners]
    a, b, c, d = vids
    t1 = t._alloc_triangle(a, b, c)
    t2 = t._alloc_triangle(a, c, d)
    t.tn[3 * t1 + 0] = -1
    t.tn[3 * t1 + 1] = t2
    t.tn[3 * t1 + 2] = -1
    t.tn[3 * t2 + 0] = -1
    t.tn[3 * t2 + 1] = -1
    t.tn[3 * t2 + 2] = t1
    for v, tt in ((a, t1), (b, t1), (c, t1), (d, t2)):
        t.vtri[v] = tt


def _build_bulk(recs, periodic):
    from scipy.spatial import ConvexHull

    t = RegularTriangulation(periodic=periodic)
    coords = []
    meta = []   # (site, tile)
    for sid, (x, y, r) in enumerate(recs):
        if periodic:
            for idx, (tx, ty) in enumerate(_TILES):
                coords.append((x + tx, y + ty, r * r))
                meta.append((sid, idx))
        else:
            coords.append((x, y, r * r))
            meta.append((sid, CENTER_TILE))
    for (x, y) in _frame_corners(recs, periodic):
        coords.append((x, y, 0.0))
        meta.append((FRAME_SITE, CENTER_TILE))
    pts = np.asarray(coords)
    lift = np.empty((len(pts), 3))
    lift[:, 0] = pts[:, 0]
    lift[:, 1] = pts[:, 1]
    lift[:, 2] = pts[:, 0] ** 2 + pts[:, 1] ** 2 - pts[:, 2]
    hull = ConvexHull(lift, qhull_options="Qt")
    lower = hull.simplices[hull.equations[:, 2] < 0.0]
    if len(lower) == 0:
        raise AllCollinear("lifted hull has no lower facets")
    # orient ccw in the plane
    a = lift[lower[:, 0], :2]
    b = lift[lower[:, 1], :2]
    c = lift[lower[:, 2], :2]
    cross = ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
             - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))
    flip = cross < 0
    lower[flip, 1], lower[flip, 2] = lower[flip, 2].copy(), lower[flip, 1].copy()
    # hidden-site check: every real vertex must appear
    present = np.zeros(len(pts), dtype=bool)
    present[lower.ravel()] = True
    missing = np.nonzero(~present)[0]
    for m in missing:
        if meta[m][0] != FRAME_SITE:
            raise RedundantSite(site_id=meta[m][0])
    # vertices
    vid_of = {}
    for gid in range(len(pts)):
        sid, tile = meta[gid]
        v = t._alloc_vertex(float(pts[gid, 0]), float(pts[gid, 1]),
                            float(pts[gid, 2]), sid, tile)
        vid_of[gid] = v
        if sid != FRAME_SITE:
            t._tile_hint[tile] = v
    # triangles + vectorized neighbor matching
    nt = len(lower)
    tv = np.vectorize(vid_of.get, otypes=[np.int64])(lower)
    t.tv = [int(x) for x in tv.ravel()]
    t.tn = [-1] * (3 * nt)
    t.talive = [True] * nt
    t.tbirth = [0] * nt
    t.tcx = [0.0] * nt
    t.tcy = [0.0] * nt
    t.tpw = [0.0] * nt
    t._cache_ok = [0] * nt
    t._domain_tri = [0] * nt
    t._dirty = set(range(nt))
    t._created = list(range(nt))
    eu = tv[:, [1, 2, 0]].ravel()
    ev = tv[:, [2, 0, 1]].ravel()
    lo = np.minimum(eu, ev)
    hi = np.maximum(eu, ev)
    order = np.lexsort((hi, lo))
    slo, shi = lo[order], hi[order]
    same = (slo[:-1] == slo[1:]) & (shi[:-1] == shi[1:])
    tn = np.full(3 * nt, -1, dtype=np.int64)
    i1 = order[:-1][same]
    i2 = order[1:][same]
    tn[i1] = i2 // 3
    tn[i2] = i1 // 3
    t.tn = [int(x) for x in tn]
    vtri = np.full(len(pts), -1, dtype=np.int64)
    vtri_ids = tv.ravel()
    vtri[vtri_ids] = np.repeat(np.arange(nt), 3)
    for gid in range(len(pts)):
        t.vtri[vid_of[gid]] = int(vtri[gid])
    # site registry
    if periodic:
        per_site = {}
        for gid, (sid, tile) in enumerate(meta):
            if sid == FRAME_SITE:
                continue
            per_site.setdefault(sid, [None] * 9)[tile] = vid_of[gid]
        for sid, vids in per_site.items():
            x, y, r = recs[sid]
            t.sites[sid] = [x, y, r, tuple(vids), True]
    else:
        for gid, (sid, tile) in enumerate(meta):
            if sid == FRAME_SITE:
                continue
            x, y, r = recs[sid]
            t.sites[sid] = [x, y, r, (vid_of[gid],), True]
    t._next_site = len(recs)
    t.version += 1
    if periodic:
        _audit_periodic_reach(t)
    return t


def _audit_periodic_reach(t):
    """3x3 replication is only exact when no power cell reaches farther than
    the one-tile margin; cheap to verify from the center-tile caches."""
    t.ensure_caches()
    for tri in t.domain_triangles():
        (ax, ay), _, _ = t.triangle_coords(tri)
        d = math.hypot(t.tcx[tri] - ax, t.tcy[tri] - ay)
        if not (d < 0.9):
            raise TriangulationError(
                f"periodic margin too small: power center {d:.3f} from vertex; "
                "site set too sparse for 3x3 replication")
