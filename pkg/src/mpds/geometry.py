"""Weighted-point geometry: power arithmetic, power centers, side tests,
disk intersections.

A weighted site is a disk (center, radius) carrying weight w = r^2.  The
power of two weighted points p_i, p_j is ||p_i - p_j||^2 - w_i - w_j; a
plain point is a weight-0 site.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import (CoincidentCenters, CollinearSites, DegenerateSegment)
from .predicates import orient2d

__all__ = [
    "Point2", "WeightedSite", "Side", "power", "power_center",
    "triangle_power", "side_of", "disk_disk_intersections",
    "disk_segment_intersections",
]

# Near-tangent discriminants within this relative band collapse to tangency
# (single intersection point); prevents sliver features below resolution.
TANGENT_REL_TOL = 1e-14

Point2 = tuple  # (x, y); plain tuples keep the hot paths allocation-light


@dataclass(frozen=True)
class WeightedSite:
    """A sampling disk. weight is derived (r^2), never stored separately."""

    x: float
    y: float
    radius: float
    id: int = -1

    def __post_init__(self):
        if not (self.radius > 0):
            raise ValueError(f"radius must be > 0, got {self.radius}")
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("non-finite center")

    @property
    def center(self) -> Point2:
        return (self.x, self.y)

    @property
    def weight(self) -> float:
        return self.radius * self.radius


class Side(Enum):
    LEFT = 1
    ON_LINE = 0
    RIGHT = -1


def _unpack(s):
    """Accept a WeightedSite or an (x, y, w) triple."""
    if isinstance(s, WeightedSite):
        return s.x, s.y, s.weight
    x, y, w = s
    return x, y, w


def power(a, b) -> float:
    """Power of two weighted points: ||a-b||^2 - w_a - w_b. Symmetric."""
    ax, ay, wa = _unpack(a)
    bx, by, wb = _unpack(b)
    dx = ax - bx
    dy = ay - by
    return dx * dx + dy * dy - wa - wb


def power_center(a, b, c) -> Point2:
    """The unique point with equal power distance to all three sites.

    Intersection of the two radical axes; reduces to the circumcenter when
    the weights are equal.  Raises CollinearSites when the sites are exactly
    collinear (no dual vertex exists).
    """
    ax, ay, wa = _unpack(a)
    bx, by, wb = _unpack(b)
    cx, cy, wc = _unpack(c)
    if orient2d(ax, ay, bx, by, cx, cy) == 0:
        raise CollinearSites((ax, ay, bx, by, cx, cy))
    # radical axis of (a,b): 2 (b-a) . x = ||b-a||^2 + wa - wb, origin at a
    abx = bx - ax
    aby = by - ay
    acx = cx - ax
    acy = cy - ay
    rb = abx * abx + aby * aby + wa - wb
    rc = acx * acx + acy * acy + wa - wc
    det = 2.0 * (abx * acy - aby * acx)
    px = (rb * acy - rc * aby) / det
    py = (abx * rc - acx * rb) / det
    return (ax + px, ay + py)


def triangle_power(a, b, c) -> float:
    """Power of the triangle: power from any vertex to the weight-0 power
    center (the same value from all three, up to construction noise).

    Positive means the power center is not covered by the three disks.
    """
    ax, ay, wa = _unpack(a)
    cx_, cy_ = power_center(a, b, c)
    dx = ax - cx_
    dy = ay - cy_
    return dx * dx + dy * dy - wa


def side_of(segment, q) -> Side:
    """Exact side of point q relative to the directed segment.

    Left means the ccw side.  OnLine only when the exact determinant is zero.
    """
    (p0, p1) = segment
    if p0[0] == p1[0] and p0[1] == p1[1]:
        raise DegenerateSegment(segment)
    s = orient2d(p0[0], p0[1], p1[0], p1[1], q[0], q[1])
    return Side(s)


def _unpack_disk(s):
    """(x, y, radius) from a WeightedSite or an (x, y, radius) triple."""
    if isinstance(s, WeightedSite):
        return s.x, s.y, s.radius
    x, y, r = s
    return x, y, r


def disk_disk_intersections(a: WeightedSite, b: WeightedSite):
    """Intersection points of two circle boundaries.

    Returns [], [p] (tangent) or [p_left, p_right], where left/right is
    relative to the directed segment a.center -> b.center.  Near-tangent
    configurations (discriminant within 1e-14 * r^2 of zero) collapse to a
    single point.
    """
    ax, ay, ra = _unpack_disk(a)
    bx, by, rb = _unpack_disk(b)
    dx = bx - ax
    dy = by - ay
    d2 = dx * dx + dy * dy
    if d2 == 0.0:
        raise CoincidentCenters((a, b))
    # foot of the radical line on the center line, as fraction t of a->b
    t = (d2 + ra * ra - rb * rb) / (2.0 * d2)
    h2 = ra * ra - t * t * d2    # squared offset from the center line
    tol = TANGENT_REL_TOL * max(ra * ra, rb * rb)
    if h2 < -tol:
        return []
    fx = ax + t * dx
    fy = ay + t * dy
    if h2 <= tol:
        return [(fx, fy)]
    s = math.sqrt(h2 / d2)
    # (-dy, dx) points to the left of a->b
    return [(fx - s * dy, fy + s * dx), (fx + s * dy, fy - s * dx)]


def disk_segment_intersections(a: WeightedSite, seg):
    """Points where the circle of `a` crosses the closed segment, ordered
    along the segment direction."""
    (p0, p1) = seg
    ex = p1[0] - p0[0]
    ey = p1[1] - p0[1]
    if ex == 0.0 and ey == 0.0:
        raise DegenerateSegment(seg)
    ax, ay, ar = _unpack_disk(a)
    fx = p0[0] - ax
    fy = p0[1] - ay
    A = ex * ex + ey * ey
    B = 2.0 * (fx * ex + fy * ey)
    C = fx * fx + fy * fy - ar * ar
    disc = B * B - 4.0 * A * C
    tol = TANGENT_REL_TOL * ar * ar * 4.0 * A
    if disc < -tol:
        return []
    if disc <= tol:
        ts = [-B / (2.0 * A)]
    else:
        sq = math.sqrt(disc)
        ts = [(-B - sq) / (2.0 * A), (-B + sq) / (2.0 * A)]
    out = []
    for t in ts:
        if -1e-12 <= t <= 1.0 + 1e-12:
            tc = min(1.0, max(0.0, t))
            out.append((p0[0] + tc * ex, p0[1] + tc * ey))
    return out
