"""Sampling domains: periodic unit square, axis-aligned box, polygon with
holes.

Every domain answers area/bbox/membership queries, yields a triangle cover
for candidate generation, and exposes its boundary rings (empty for the
periodic square, which has none).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from .errors import EmptyDomain, InvalidPolygon

Ring = List[Tuple[float, float]]


def _ring_area(ring: Sequence[Tuple[float, float]]) -> float:
    a = 0.0
    n = len(ring)
    for i in range(n):
        x0, y0 = ring[i]
        x1, y1 = ring[(i + 1) % n]
        a += x0 * y1 - x1 * y0
    return 0.5 * a


def _split_triangles(tris, h):
    # midpoint 4-split until no edge exceeds h
    out = []
    stack = list(tris)
    while stack:
        (ax, ay, bx, by, cx, cy) = stack.pop()
        e = max(math.hypot(bx - ax, by - ay), math.hypot(cx - bx, cy - by),
                math.hypot(ax - cx, ay - cy))
        if e <= h:
            out.append((ax, ay, bx, by, cx, cy))
            continue
        mabx, maby = 0.5 * (ax + bx), 0.5 * (ay + by)
        mbcx, mbcy = 0.5 * (bx + cx), 0.5 * (by + cy)
        mcax, mcay = 0.5 * (cx + ax), 0.5 * (cy + ay)
        stack.append((ax, ay, mabx, maby, mcax, mcay))
        stack.append((mabx, maby, bx, by, mbcx, mbcy))
        stack.append((mcax, mcay, mbcx, mbcy, cx, cy))
        stack.append((mabx, maby, mbcx, mbcy, mcax, mcay))
    return out


@dataclass(frozen=True)
class PeriodicUnitSquare:
    """The unit torus [0,1)^2."""

    periodic: bool = True

    def area(self) -> float:
        return 1.0

    def bbox(self):
        return (0.0, 0.0, 1.0, 1.0)

    def contains(self, x, y):
        return np.ones_like(np.asarray(x, dtype=float), dtype=bool)

    def triangles(self, h: float = 0.25):
        base = [(0.0, 0.0, 1.0, 0.0, 1.0, 1.0),
                (0.0, 0.0, 1.0, 1.0, 0.0, 1.0)]
        return _split_triangles(base, h)

    def boundary_rings(self) -> List[Ring]:
        return []

    def wrap(self, x, y):
        return x % 1.0, y % 1.0


@dataclass(frozen=True)
class Box:
    """Axis-aligned rectangle [xmin,xmax] x [ymin,ymax]."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float
    periodic: bool = False

    def __post_init__(self):
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise EmptyDomain(
                f"box ({self.xmin},{self.ymin})-({self.xmax},{self.ymax}) "
                "has no interior")

    @property
    def shapely(self):
        from shapely.geometry import box as _shbox
        return _shbox(self.xmin, self.ymin, self.xmax, self.ymax)

    def area(self) -> float:
        return (self.xmax - self.xmin) * (self.ymax - self.ymin)

    def bbox(self):
        return (self.xmin, self.ymin, self.xmax, self.ymax)

    def contains(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return ((x >= self.xmin) & (x <= self.xmax)
                & (y >= self.ymin) & (y <= self.ymax))

    def triangles(self, h: float = 0.25):
        x0, y0, x1, y1 = self.xmin, self.ymin, self.xmax, self.ymax
        base = [(x0, y0, x1, y0, x1, y1), (x0, y0, x1, y1, x0, y1)]
        return _split_triangles(base, h)

    def boundary_rings(self) -> List[Ring]:
        x0, y0, x1, y1 = self.xmin, self.ymin, self.xmax, self.ymax
        return [[(x0, y0), (x1, y0), (x1, y1), (x0, y1)]]


@dataclass
class PolygonWithHoles:
    """Simple ccw outer ring with cw hole rings.

    Rings are re-oriented on construction; self-intersection or holes
    escaping the outer ring raise InvalidPolygon.
    """

    outer: Ring
    holes: List[Ring] = field(default_factory=list)
    periodic: bool = False

    def __post_init__(self):
        from shapely.geometry import Polygon as ShPolygon
        if len(self.outer) < 3:
            raise InvalidPolygon("outer ring needs >= 3 vertices")
        outer = [(float(x), float(y)) for x, y in self.outer]
        if _ring_area(outer) < 0:
            outer = outer[::-1]
        holes = []
        for h in self.holes:
            if len(h) < 3:
                raise InvalidPolygon("hole ring needs >= 3 vertices")
            h = [(float(x), float(y)) for x, y in h]
            if _ring_area(h) > 0:
                h = h[::-1]
            holes.append(h)
        poly = ShPolygon(outer, holes)
        if not poly.is_valid:
            raise InvalidPolygon(f"invalid polygon: {poly.is_valid_reason}"
                                 if hasattr(poly, "is_valid_reason")
                                 else "invalid polygon")
        if poly.area <= 0:
            raise EmptyDomain("polygon has zero area")
        self.outer = outer
        self.holes = holes
        self._poly = poly

    @property
    def shapely(self):
        return self._poly

    def area(self) -> float:
        return self._poly.area

    def bbox(self):
        return self._poly.bounds

    def contains(self, x, y):
        import shapely
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        pts = shapely.points(np.column_stack([np.ravel(x), np.ravel(y)]))
        res = shapely.covers(self._poly, pts)
        return res.reshape(np.shape(x))

    def triangles(self, h: float = 0.25):
        import shapely
        tris = []
        cdt = shapely.constrained_delaunay_triangles(self._poly)
        for g in cdt.geoms:
            xs, ys = g.exterior.coords.xy
            tris.append((xs[0], ys[0], xs[1], ys[1], xs[2], ys[2]))
        return _split_triangles(tris, h)

    def boundary_rings(self) -> List[Ring]:
        return [list(self.outer)] + [list(h) for h in self.holes]


def domain_to_rings(domain) -> List[Ring]:
    """Boundary rings of a bounded domain (outer first), for clipping."""
    rings = domain.boundary_rings()
    if not rings:
        raise EmptyDomain("periodic domain has no boundary")
    return rings
