"""Robust sign predicates: float filter first, exact rational fallback.

The gap test is a sign test on the triangle power, so a rounding flip would
create phantom gaps or miss real ones.  Every sign decision therefore goes
through a filtered evaluation: compute in doubles together with a bound on
the accumulated rounding error; when the magnitude clears the bound the
float sign is trusted, otherwise the determinant is re-evaluated with
fractions.Fraction, which is exact because binary doubles are dyadic
rationals.

Only predicates are exact.  Constructed points (power centers, intersection
points) stay in double precision.
"""

from __future__ import annotations

from fractions import Fraction

# Filter constants.  2^-53 is the double rounding unit; the factors cover the
# worst-case number of roundings in each expression with margin to spare.
_EPS = 2.220446049250313e-16
ORIENT_BOUND = (3.0 + 16.0 * _EPS) * _EPS          # Shewchuk's ccwerrboundA
POWER_BOUND = 96.0 * _EPS                          # conservative for the 3x3 det

orient2d_exact_calls = 0    # instrumentation: how often the fallback ran
power_exact_calls = 0


def orient2d(ax, ay, bx, by, cx, cy):
    """Sign of the ccw orientation of triangle (a, b, c).

    Returns +1 if c is left of a->b, -1 if right, 0 if exactly collinear.
    """
    detleft = (bx - ax) * (cy - ay)
    detright = (by - ay) * (cx - ax)
    det = detleft - detright
    if detleft > 0.0:
        if detright <= 0.0:
            return 1
        detsum = detleft + detright
    elif detleft < 0.0:
        if detright >= 0.0:
            return -1
        detsum = -detleft - detright
    else:
        return _sign(-detright)
    if det >= ORIENT_BOUND * detsum:
        return 1
    if -det >= ORIENT_BOUND * detsum:
        return -1
    return _orient2d_exact(ax, ay, bx, by, cx, cy)


def _orient2d_exact(ax, ay, bx, by, cx, cy):
    global orient2d_exact_calls
    orient2d_exact_calls += 1
    ax, ay, bx, by, cx, cy = map(Fraction, (ax, ay, bx, by, cx, cy))
    det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    return _sign(det)


def power_conflict(ax, ay, wa, bx, by, wb, cx, cy, wc, dx, dy, wd):
    """Sign of the weighted in-circle test for ccw triangle (a, b, c) vs d.

    +1 means d's lifted point lies below the plane through the lifted a, b, c
    (d is "in conflict": the triangle is not regular with d present), -1 the
    opposite, 0 exactly on the plane.  With equal weights this is the classic
    in-circumcircle test.  Lifting: (x, y) -> (x, y, x^2 + y^2 - w).
    """
    # translate so d is the origin; the lifted column then reduces to
    # u^2 + v^2 - w_i + w_d, which equals the true lifted difference up to
    # multiples of the first two columns (determinant unchanged).
    ua = ax - dx
    va = ay - dy
    ub = bx - dx
    vb = by - dy
    uc = cx - dx
    vc = cy - dy
    qa = ua * ua + va * va - wa + wd
    qb = ub * ub + vb * vb - wb + wd
    qc = uc * uc + vc * vc - wc + wd

    m_bc = ub * vc - uc * vb
    m_ac = ua * vc - uc * va
    m_ab = ua * vb - ub * va
    det = qa * m_bc - qb * m_ac + qc * m_ab

    perm = (abs(qa) * (abs(ub * vc) + abs(uc * vb))
            + abs(qb) * (abs(ua * vc) + abs(uc * va))
            + abs(qc) * (abs(ua * vb) + abs(ub * va)))
    bound = POWER_BOUND * perm
    if det > bound:
        return 1
    if det < -bound:
        return -1
    return _power_conflict_exact(ax, ay, wa, bx, by, wb, cx, cy, wc, dx, dy, wd)


def _power_conflict_exact(ax, ay, wa, bx, by, wb, cx, cy, wc, dx, dy, wd):
    global power_exact_calls
    power_exact_calls += 1
    ax, ay, wa, bx, by, wb, cx, cy, wc, dx, dy, wd = map(
        Fraction, (ax, ay, wa, bx, by, wb, cx, cy, wc, dx, dy, wd))
    ua = ax - dx
    va = ay - dy
    ub = bx - dx
    vb = by - dy
    uc = cx - dx
    vc = cy - dy
    qa = ua * ua + va * va - wa + wd
    qb = ub * ub + vb * vb - wb + wd
    qc = uc * uc + vc * vc - wc + wd
    det = (qa * (ub * vc - uc * vb)
           - qb * (ua * vc - uc * va)
           + qc * (ua * vb - ub * va))
    return _sign(det)


def _sign(x):
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0
