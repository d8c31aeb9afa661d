"""Shared oracles and generators for the test suite.

Every oracle here recomputes its answer from raw coordinates with a
different method than the code under test (KD-trees, shapely booleans,
brute force), so agreement is evidence rather than tautology.
"""
from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.spatial import cKDTree


def make_rng(*key):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(key)))


def conflict_violations(sites, periodic=False, slack=1e-9):
    """Pairs closer than max(r_i, r_j) by more than a relative slack."""
    pts = np.asarray([(x, y) for (x, y, _) in sites])
    rad = np.asarray([r for (_, _, r) in sites])
    if len(pts) < 2:
        return []
    tree = cKDTree(np.mod(pts, 1.0) if periodic else pts,
                   boxsize=1.0 if periodic else None)
    bad = []
    for i, j in tree.query_pairs(float(rad.max())):
        if periodic:
            d = np.mod(pts[i] - pts[j], 1.0)
            d = np.minimum(d, 1.0 - d)
            dist = math.hypot(d[0], d[1])
        else:
            dist = math.hypot(*(pts[i] - pts[j]))
        need = max(rad[i], rad[j])
        if dist < need * (1.0 - slack):
            bad.append((i, j, dist, need))
    return bad


def uncovered_probes(sites, probes, periodic=False, slack=1e-9):
    """Probe points not inside any disk, by KD-tree lookup."""
    pts = np.asarray([(x, y) for (x, y, _) in sites])
    rad = np.asarray([r for (_, _, r) in sites])
    probes = np.asarray(probes, dtype=float)
    r_max = float(rad.max())
    tree = cKDTree(np.mod(pts, 1.0) if periodic else pts,
                   boxsize=1.0 if periodic else None)
    q = np.mod(probes, 1.0) if periodic else probes
    if np.allclose(rad, rad[0]):
        d, _ = tree.query(q, k=1)
        return probes[d > rad[0] * (1.0 + slack)]
    out = []
    hits = tree.query_ball_point(q, r_max * (1.0 + slack))
    for k, idx in enumerate(hits):
        ok = False
        for i in idx:
            if periodic:
                dd = np.mod(probes[k] - pts[i], 1.0)
                dd = np.minimum(dd, 1.0 - dd)
                dist = math.hypot(dd[0], dd[1])
            else:
                dist = math.hypot(*(probes[k] - pts[i]))
            if dist <= rad[i] * (1.0 + slack):
                ok = True
                break
        if not ok:
            out.append(probes[k])
    return np.asarray(out)


def grid_probes(n, bbox=(0.0, 0.0, 1.0, 1.0), interior=True):
    """n x n audit lattice over the bbox, cell centers when interior."""
    x0, y0, x1, y1 = bbox
    if interior:
        xs = x0 + (np.arange(n) + 0.5) * (x1 - x0) / n
        ys = y0 + (np.arange(n) + 0.5) * (y1 - y0) / n
    else:
        xs = np.linspace(x0, x1, n)
        ys = np.linspace(y0, y1, n)
    gx, gy = np.meshgrid(xs, ys)
    return np.column_stack([gx.ravel(), gy.ravel()])


def random_conflict_free(rng, n_target, r_lo, r_hi, periodic=True,
                         bbox=(0.0, 0.0, 1.0, 1.0)):
    """Greedy random packing; n_target is an upper bound, not a promise."""
    x0, y0, x1, y1 = bbox
    sites = []
    for _ in range(n_target * 40):
        if len(sites) >= n_target:
            break
        x = rng.uniform(x0, x1)
        y = rng.uniform(y0, y1)
        r = rng.uniform(r_lo, r_hi)
        ok = True
        for (sx, sy, sr) in sites:
            dx, dy = x - sx, y - sy
            if periodic:
                dx = dx - round(dx / (x1 - x0)) * (x1 - x0)
                dy = dy - round(dy / (y1 - y0)) * (y1 - y0)
            if dx * dx + dy * dy < max(r, sr) ** 2:
                ok = False
                break
        if ok:
            sites.append((x, y, r))
    return sites


def snap_area(poly_coords, grid_size=1e-12):
    """Area of a polygon after snapping coordinates, via shapely."""
    from shapely.geometry import Polygon
    from shapely import set_precision
    return abs(set_precision(Polygon(poly_coords), grid_size).area)


@pytest.fixture(scope="session")
def small_periodic_run():
    """One shared maximal sample at r=0.03, periodic, seed 7."""
    from mpds.density import UniformDensity
    from mpds.domain import PeriodicUnitSquare
    from mpds.sampler import SamplerConfig, maximal_sample
    cfg = SamplerConfig(r_min=0.03, r_max=0.03, seed=7)
    return maximal_sample(PeriodicUnitSquare(), UniformDensity(1.0), cfg)


@pytest.fixture(scope="session")
def small_box_run():
    """Shared bounded run: unit box, adaptive radius, seed 11."""
    from mpds.density import ExpressionDensity
    from mpds.domain import Box
    from mpds.sampler import SamplerConfig, maximal_sample
    dom = Box(0.0, 0.0, 1.0, 1.0)
    dens = ExpressionDensity("1 + 8*x", check_bbox=dom.bbox())
    cfg = SamplerConfig(r_min=0.03, r_max=0.12, seed=11)
    return maximal_sample(dom, dens, cfg)
