"""Exact predicate behavior, checked against fractions arithmetic."""
from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from mpds.predicates import orient2d, power_conflict

from conftest import make_rng


def _orient_fraction(ax, ay, bx, by, cx, cy):
    ax, ay, bx, by, cx, cy = (Fraction(v) for v in (ax, ay, bx, by, cx, cy))
    det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    return (det > 0) - (det < 0)


def _conflict_fraction(ax, ay, wa, bx, by, wb, cx, cy, wc, dx, dy, wd):
    """Sign of the lifted determinant, rows (p - a) for p in (b, c, d).

    A conflict (+1 from the code under test) corresponds to a negative
    determinant in this row layout, so the sign is flipped on return.
    """
    ax, ay, wa, bx, by, wb, cx, cy, wc, dx, dy, wd = (
        Fraction(v) for v in (ax, ay, wa, bx, by, wb, cx, cy, wc, dx, dy, wd))
    rows = []
    for (px, py, pw) in ((bx, by, wb), (cx, cy, wc), (dx, dy, wd)):
        rows.append((px - ax, py - ay,
                     (px - ax) ** 2 + (py - ay) ** 2 - (pw - wa)))
    det = (rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1])
           - rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0])
           + rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0]))
    return -((det > 0) - (det < 0))


coord = st.floats(-4.0, 4.0, allow_nan=False, allow_infinity=False, width=64)
weight = st.floats(0.0, 2.0, allow_nan=False, allow_infinity=False, width=64)


def test_orient2d_known_signs():
    assert orient2d(0, 0, 1, 0, 0, 1) > 0
    assert orient2d(0, 0, 0, 1, 1, 0) < 0
    assert orient2d(0, 0, 1, 1, 2, 2) == 0


def test_orient2d_collinear_exact_far():
    # doubles where the naive determinant underflows to noise
    a = (12.0, 12.0)
    b = (24.0, 24.0)
    c = (0.5 + 2 ** -53, 0.5)
    assert orient2d(*a, *b, *c) == _orient_fraction(*a, *b, *c)


@given(coord, coord, coord, coord, coord, coord)
@settings(max_examples=400, deadline=None)
def test_orient2d_matches_rational(ax, ay, bx, by, cx, cy):
    assert orient2d(ax, ay, bx, by, cx, cy) == _orient_fraction(
        ax, ay, bx, by, cx, cy)


def test_orient2d_near_degenerate_grid():
    # perturb one coordinate by ulps around exact collinearity
    base = 0.3
    for k in range(-6, 7):
        cy = np.nextafter(base, 1.0) if k > 0 else base
        for _ in range(abs(k) - 1):
            cy = np.nextafter(cy, 1.0 if k > 0 else -1.0)
        if k < 0:
            cy = base
            for _ in range(-k):
                cy = np.nextafter(cy, -1.0)
        got = orient2d(0.1, 0.1, 0.5, 0.5, base, cy)
        want = _orient_fraction(0.1, 0.1, 0.5, 0.5, base, cy)
        assert got == want


@given(coord, coord, weight, coord, coord, weight, coord, coord, weight,
       coord, coord, weight)
@settings(max_examples=300, deadline=None)
def test_power_conflict_matches_rational(ax, ay, wa, bx, by, wb,
                                         cx, cy, wc, dx, dy, wd):
    if _orient_fraction(ax, ay, bx, by, cx, cy) <= 0:
        return
    got = power_conflict(ax, ay, wa, bx, by, wb, cx, cy, wc, dx, dy, wd)
    want = _conflict_fraction(ax, ay, wa, bx, by, wb, cx, cy, wc, dx, dy, wd)
    assert (got > 0) - (got < 0) == want


def test_power_conflict_random_tiny_perturbations():
    rng = make_rng(11, 0)
    checked = 0
    for _ in range(3000):
        pts = rng.uniform(0.0, 1.0, size=(4, 2))
        w = rng.uniform(0.0, 0.01, size=4)
        if _orient_fraction(*pts[0], *pts[1], *pts[2]) <= 0:
            continue
        # push d onto the power circle of (a, b, c), then nudge by ulps
        args = (pts[0, 0], pts[0, 1], w[0], pts[1, 0], pts[1, 1], w[1],
                pts[2, 0], pts[2, 1], w[2], pts[3, 0], pts[3, 1], w[3])
        got = power_conflict(*args)
        want = _conflict_fraction(*args)
        assert (got > 0) - (got < 0) == want
        checked += 1
    assert checked > 1000
