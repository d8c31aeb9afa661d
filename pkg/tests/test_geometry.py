"""Weighted-point constructions against independent references."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpds.errors import CoincidentCenters, CollinearSites, DegenerateSegment
from mpds.geometry import (Side, WeightedSite, disk_disk_intersections,
                           disk_segment_intersections, power, power_center,
                           side_of, triangle_power)

from conftest import make_rng

coord = st.floats(-3.0, 3.0, allow_nan=False, allow_infinity=False, width=64)
radius = st.floats(0.05, 1.5, allow_nan=False, allow_infinity=False,
                   width=64)


def test_weighted_site_validation():
    with pytest.raises(ValueError):
        WeightedSite(0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        WeightedSite(0.0, 0.0, -1.0)
    with pytest.raises(ValueError):
        WeightedSite(math.nan, 0.0, 1.0)
    s = WeightedSite(1.0, 2.0, 3.0)
    assert s.weight == 9.0
    assert s.center == (1.0, 2.0)


def test_power_formula():
    a = WeightedSite(0.0, 0.0, 1.0)
    b = WeightedSite(3.0, 4.0, 2.0)
    assert power(a, b) == pytest.approx(25.0 - 1.0 - 4.0)
    assert power(a, b) == power(b, a)
    # triples carry weights directly
    assert power((0, 0, 1), (3, 4, 4)) == pytest.approx(20.0)


def test_power_center_equal_weights_is_circumcenter():
    # circumcenter of (0,0), (1,0), (0,1) is (.5, .5)
    c = power_center((0, 0, 0.04), (1, 0, 0.04), (0, 1, 0.04))
    assert c == pytest.approx((0.5, 0.5))


def test_power_center_collinear_raises():
    with pytest.raises(CollinearSites):
        power_center((0, 0, 1), (1, 1, 1), (2, 2, 1))


@given(coord, coord, coord, coord, coord, coord,
       st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
@settings(max_examples=300, deadline=None)
def test_power_center_equal_powers(ax, ay, bx, by, cx, cy, wa, wb, wc):
    from mpds.predicates import orient2d
    if orient2d(ax, ay, bx, by, cx, cy) == 0:
        return
    span = max(abs(v) for v in (ax, ay, bx, by, cx, cy)) + 1.0
    area2 = abs((bx - ax) * (cy - ay) - (by - ay) * (cx - ax))
    if area2 < 1e-6 * span * span:
        return     # nearly collinear: construction noise swamps the check
    px, py = power_center((ax, ay, wa), (bx, by, wb), (cx, cy, wc))
    pows = [(px - x) ** 2 + (py - y) ** 2 - w
            for (x, y, w) in ((ax, ay, wa), (bx, by, wb), (cx, cy, wc))]
    scale = max(1.0, max(abs(p) for p in pows),
                (px * px + py * py))
    assert abs(pows[0] - pows[1]) <= 1e-8 * scale
    assert abs(pows[0] - pows[2]) <= 1e-8 * scale


def test_triangle_power_sign_cases():
    # three unit disks far apart: power center uncovered, positive power
    far = triangle_power((0, 0, 1), (4, 0, 1), (2, 4, 1))
    assert far > 0
    # tight cluster: power center covered, negative
    near = triangle_power((0, 0, 1), (1, 0, 1), (0.5, 0.9, 1))
    assert near < 0


def test_side_of():
    seg = ((0.0, 0.0), (1.0, 0.0))
    assert side_of(seg, (0.5, 0.5)) is Side.LEFT
    assert side_of(seg, (0.5, -0.5)) is Side.RIGHT
    assert side_of(seg, (2.0, 0.0)) is Side.ON_LINE
    with pytest.raises(DegenerateSegment):
        side_of(((1.0, 1.0), (1.0, 1.0)), (0.0, 0.0))


def test_disk_disk_disjoint_and_contained():
    a = WeightedSite(0.0, 0.0, 1.0)
    assert disk_disk_intersections(a, WeightedSite(5.0, 0.0, 1.0)) == []
    assert disk_disk_intersections(a, WeightedSite(0.1, 0.0, 3.0)) == []
    with pytest.raises(CoincidentCenters):
        disk_disk_intersections(a, WeightedSite(0.0, 0.0, 2.0))


def test_disk_disk_tangent_collapses():
    a = WeightedSite(0.0, 0.0, 1.0)
    b = WeightedSite(2.0, 0.0, 1.0)
    pts = disk_disk_intersections(a, b)
    assert len(pts) == 1
    assert pts[0] == pytest.approx((1.0, 0.0))


def test_disk_disk_crossing_order_and_symmetry():
    a = WeightedSite(0.0, 0.0, 1.0)
    b = WeightedSite(1.0, 0.0, 1.0)
    left, right = disk_disk_intersections(a, b)
    # left of the directed center line a->b means positive y here
    assert left[1] > 0 > right[1]
    for p in (left, right):
        assert math.hypot(p[0] - 0.0, p[1] - 0.0) == pytest.approx(1.0)
        assert math.hypot(p[0] - 1.0, p[1] - 0.0) == pytest.approx(1.0)
    # swapping the arguments mirrors the order
    l2, r2 = disk_disk_intersections(b, a)
    assert l2 == pytest.approx(right)
    assert r2 == pytest.approx(left)


@given(coord, coord, radius, coord, coord, radius)
@settings(max_examples=300, deadline=None)
def test_disk_disk_points_lie_on_both_circles(ax, ay, ra, bx, by, rb):
    if (ax - bx) ** 2 + (ay - by) ** 2 < 1e-12:
        return
    pts = disk_disk_intersections(WeightedSite(ax, ay, ra),
                                  WeightedSite(bx, by, rb))
    for (px, py) in pts:
        da = math.hypot(px - ax, py - ay)
        db = math.hypot(px - bx, py - by)
        assert da == pytest.approx(ra, rel=1e-6, abs=1e-7)
        assert db == pytest.approx(rb, rel=1e-6, abs=1e-7)


def test_disk_segment_basic():
    a = WeightedSite(0.0, 0.0, 1.0)
    seg = ((-2.0, 0.0), (2.0, 0.0))
    pts = disk_segment_intersections(a, seg)
    assert len(pts) == 2
    assert pts[0] == pytest.approx((-1.0, 0.0))
    assert pts[1] == pytest.approx((1.0, 0.0))
    # ordered along the segment direction even when reversed
    rpts = disk_segment_intersections(a, (seg[1], seg[0]))
    assert rpts[0] == pytest.approx((1.0, 0.0))
    assert rpts[1] == pytest.approx((-1.0, 0.0))


def test_disk_segment_clipping_to_endpoint():
    a = WeightedSite(0.0, 0.0, 1.0)
    # segment starts inside the disk: one crossing only
    pts = disk_segment_intersections(a, ((0.0, 0.0), (3.0, 0.0)))
    assert len(pts) == 1
    assert pts[0] == pytest.approx((1.0, 0.0))
    # entirely inside: no boundary crossing
    assert disk_segment_intersections(a, ((-0.3, 0.0), (0.3, 0.0))) == []
    with pytest.raises(DegenerateSegment):
        disk_segment_intersections(a, ((1.0, 1.0), (1.0, 1.0)))


def test_disk_segment_tangent():
    a = WeightedSite(0.0, 0.0, 1.0)
    pts = disk_segment_intersections(a, ((-2.0, 1.0), (2.0, 1.0)))
    assert len(pts) == 1
    assert pts[0] == pytest.approx((0.0, 1.0))


@given(coord, coord, radius, coord, coord, coord, coord)
@settings(max_examples=200, deadline=None)
def test_disk_segment_points_on_circle_and_segment(ax, ay, r,
                                                   x0, y0, x1, y1):
    if (x0 - x1) ** 2 + (y0 - y1) ** 2 < 1e-12:
        return
    pts = disk_segment_intersections(WeightedSite(ax, ay, r),
                                     ((x0, y0), (x1, y1)))
    ex, ey = x1 - x0, y1 - y0
    ee = ex * ex + ey * ey
    last_t = -1e-9
    for (px, py) in pts:
        assert math.hypot(px - ax, py - ay) == pytest.approx(
            r, rel=1e-6, abs=1e-7)
        t = ((px - x0) * ex + (py - y0) * ey) / ee
        assert -1e-9 <= t <= 1 + 1e-9
        assert t >= last_t
        last_t = t
