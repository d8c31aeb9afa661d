"""Mesh extraction and quality statistics.

In 2D the regular triangulation of a maximal sampling *is* the mesh; this
module snapshots it into a plain indexed triangle soup, computes the
per-triangle and per-vertex quality numbers, and writes OBJ/OFF text.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import MpdsError


@dataclass
class Mesh2:
    """Indexed triangle mesh with per-vertex radii and boundary flags.

    For periodic sources the vertex list holds one canonical copy per
    site and `tri_coords` keeps each triangle's unwrapped geometry, so
    statistics see true shapes while indices wrap.
    """

    vertices: List[Tuple[float, float]]
    radii: List[float]
    triangles: List[Tuple[int, int, int]]
    boundary: List[bool]
    periodic: bool = False
    tri_coords: Optional[np.ndarray] = None   # (T, 6) unwrapped, optional

    def coords(self) -> np.ndarray:
        if self.tri_coords is not None:
            return self.tri_coords
        v = np.asarray(self.vertices, dtype=float)
        t = np.asarray(self.triangles, dtype=int)
        return np.column_stack([v[t[:, 0]], v[t[:, 1]], v[t[:, 2]]])

    def edge_use_counts(self) -> Dict[Tuple[int, int], int]:
        cnt: Dict[Tuple[int, int], int] = {}
        for (a, b, c) in self.triangles:
            for (u, v) in ((a, b), (b, c), (c, a)):
                k = (u, v) if u < v else (v, u)
                cnt[k] = cnt.get(k, 0) + 1
        return cnt

    def audit_manifold(self):
        """Each edge on 1 or 2 triangles; periodic meshes on exactly 2."""
        for k, n in self.edge_use_counts().items():
            if n > 2 or (self.periodic and n != 2):
                raise MpdsError(f"edge {k} used by {n} triangles")

    def euler_characteristic(self) -> int:
        return (len(self.vertices) - len(self.edge_use_counts())
                + len(self.triangles))


@dataclass
class MeshStats:
    """Quality summary in the shape of the usual sampling-meshing tables.

    Ratios are relative to the theoretical bounds for a maximal uniform
    sampling of radius r_min: edges in [r, 2r], areas in
    [sqrt(3)/4 r^2, 3 sqrt(3)/4 r^2]; both edge ratios and area ratios
    land in [something >= 1, something <= 1] exactly when the bounds hold.
    """

    n_vertices: int
    n_triangles: int
    theta_min: float
    theta_max: float
    q_min: float
    edge_ratio_min: float       # |e|_min / r_min
    edge_ratio_max: float       # |e|_max / (2 r_min)
    area_ratio_min: float       # |t|_min / (sqrt(3)/4 r_min^2)
    area_ratio_max: float       # |t|_max / (3 sqrt(3)/4 r_min^2)
    pct_angles_below_30: float  # % of triangles whose smallest angle < 30
    valence_histogram: Dict[int, float]   # valence -> % interior vertices
    v567: float                 # % interior vertices with valence in 5..7

    def to_json(self) -> str:
        d = self.__dict__.copy()
        d["valence_histogram"] = {str(k): v
                                  for k, v in self.valence_histogram.items()}
        return json.dumps(d, indent=2, sort_keys=True)


def triangle_quality(a, b, c) -> float:
    """6/sqrt(3) * area / (half-perimeter * longest edge); 1 for
    equilateral, 0 for degenerate."""
    ax, ay = a
    bx, by = b
    cx, cy = c
    e0 = math.hypot(bx - ax, by - ay)
    e1 = math.hypot(cx - bx, cy - by)
    e2 = math.hypot(ax - cx, ay - cy)
    h = max(e0, e1, e2)
    p = 0.5 * (e0 + e1 + e2)
    if h == 0.0 or p == 0.0:
        return 0.0
    area = 0.5 * abs((bx - ax) * (cy - ay) - (cx - ax) * (by - ay))
    if area == 0.0:
        return 0.0
    return (6.0 / math.sqrt(3.0)) * area / (p * h)


def _triangle_arrays(coords):
    ax, ay = coords[:, 0], coords[:, 1]
    bx, by = coords[:, 2], coords[:, 3]
    cx, cy = coords[:, 4], coords[:, 5]

    def ang(ux, uy, wx, wy):
        dot = ux * wx + uy * wy
        det = ux * wy - uy * wx
        return np.degrees(np.abs(np.arctan2(det, dot)))

    A = ang(bx - ax, by - ay, cx - ax, cy - ay)
    B = ang(ax - bx, ay - by, cx - bx, cy - by)
    C = 180.0 - A - B
    angles = np.stack([A, B, C], axis=1)
    e0 = np.hypot(bx - ax, by - ay)
    e1 = np.hypot(cx - bx, cy - by)
    e2 = np.hypot(ax - cx, ay - cy)
    edges = np.stack([e0, e1, e2], axis=1)
    areas = 0.5 * np.abs((bx - ax) * (cy - ay) - (cx - ax) * (by - ay))
    h = edges.max(axis=1)
    p = 0.5 * edges.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = (6.0 / math.sqrt(3.0)) * areas / (p * h)
    q[~np.isfinite(q)] = 0.0
    return angles, edges, areas, q


def mesh_stats(mesh: Mesh2, r_min: float) -> MeshStats:
    """Exact per-triangle extrema plus the interior valence histogram."""
    coords = np.asarray(mesh.coords(), dtype=float)
    if coords.size == 0:
        raise MpdsError("empty mesh")
    angles, edges, areas, q = _triangle_arrays(coords)
    tmin = angles.min(axis=1)
    valence: Dict[int, int] = {}
    deg = [0] * len(mesh.vertices)
    for (u, v) in mesh.edge_use_counts():
        deg[u] += 1
        deg[v] += 1
    interior = 0
    in567 = 0
    for vid, d in enumerate(deg):
        if mesh.boundary[vid]:
            continue
        interior += 1
        valence[d] = valence.get(d, 0) + 1
        if 5 <= d <= 7:
            in567 += 1
    hist = {k: 100.0 * v / interior for k, v in sorted(valence.items())} \
        if interior else {}
    return MeshStats(
        n_vertices=len(mesh.vertices),
        n_triangles=len(mesh.triangles),
        theta_min=float(angles.min()),
        theta_max=float(angles.max()),
        q_min=float(q.min()),
        edge_ratio_min=float(edges.min() / r_min),
        edge_ratio_max=float(edges.max() / (2.0 * r_min)),
        area_ratio_min=float(areas.min() / (math.sqrt(3.0) / 4.0
                                            * r_min * r_min)),
        area_ratio_max=float(areas.max() / (3.0 * math.sqrt(3.0) / 4.0
                                            * r_min * r_min)),
        pct_angles_below_30=float(100.0 * (tmin < 30.0).mean()),
        valence_histogram=hist,
        v567=(100.0 * in567 / interior) if interior else 100.0,
    )


def extract_mesh(tri, domain=None, warn_gaps: bool = True) -> Mesh2:
    """Snapshot the triangulation's canonical triangles as a Mesh2.

    Boundary flags mark vertices on edges with a single incident kept
    triangle; passing a bounded domain drops triangles whose centroid
    falls outside it (hull slivers across concavities).
    """
    from .gaps import detect_gaps

    if warn_gaps and detect_gaps(tri):
        warnings.warn("extracting a non-maximal sampling", stacklevel=2)
    sids = sorted(sid for sid, s in tri.sites.items() if s[4])
    index = {sid: k for k, sid in enumerate(sids)}
    verts = [tri.site_center(sid) for sid in sids]
    radii = [tri.site_radius(sid) for sid in sids]
    tris = []
    coords = []
    for t in tri.domain_triangles():
        (a, b, c) = tri.triangle_sites(t)
        pa, pb, pc = tri.triangle_coords(t)
        if domain is not None and not domain.periodic:
            gx = (pa[0] + pb[0] + pc[0]) / 3.0
            gy = (pa[1] + pb[1] + pc[1]) / 3.0
            if not bool(domain.contains(gx, gy)):
                continue
        tris.append((index[a], index[b], index[c]))
        coords.append((*pa, *pb, *pc))
    mesh = Mesh2(vertices=verts, radii=radii, triangles=tris,
                 boundary=[False] * len(verts), periodic=tri.periodic,
                 tri_coords=np.asarray(coords, dtype=float))
    if not tri.periodic:
        for (u, v), n in mesh.edge_use_counts().items():
            if n == 1:
                mesh.boundary[u] = True
                mesh.boundary[v] = True
    mesh.audit_manifold()
    return mesh


# ----------------------------------------------------------------------
# export

def save_obj(mesh: Mesh2, path: str):
    lines = []
    for (x, y) in mesh.vertices:
        lines.append(f"v {x:.17g} {y:.17g} 0")
    for (a, b, c) in mesh.triangles:
        lines.append(f"f {a + 1} {b + 1} {c + 1}")
    _atomic_write(path, "\n".join(lines) + "\n")


def save_off(mesh: Mesh2, path: str):
    lines = ["OFF", f"{len(mesh.vertices)} {len(mesh.triangles)} 0"]
    for (x, y) in mesh.vertices:
        lines.append(f"{x:.17g} {y:.17g} 0")
    for (a, b, c) in mesh.triangles:
        lines.append(f"3 {a} {b} {c}")
    _atomic_write(path, "\n".join(lines) + "\n")


def stats_table(stats: MeshStats, label: str = "run") -> str:
    """One-row fixed-width table like the usual sampling/meshing summary."""
    head = (f"{'set':>10} {'points':>8} {'tris':>8} {'θmin':>7} {'θmax':>7} "
            f"{'Qmin':>6} {'|e|min/r':>9} {'|e|max/2r':>10} {'<30°%':>7} "
            f"{'v567%':>7}")
    row = (f"{label:>10} {stats.n_vertices:>8} {stats.n_triangles:>8} "
           f"{stats.theta_min:>7.2f} {stats.theta_max:>7.2f} "
           f"{stats.q_min:>6.3f} {stats.edge_ratio_min:>9.3f} "
           f"{stats.edge_ratio_max:>10.3f} {stats.pct_angles_below_30:>7.2f} "
           f"{stats.v567:>7.2f}")
    return head + "\n" + row


def _atomic_write(path: str, text: str):
    import os
    import tempfile
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-mesh-")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
