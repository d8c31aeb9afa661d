"""Incremental weighted triangulation against rebuild-from-scratch."""
import math

import numpy as np
import pytest

from mpds.errors import (ConflictError, RedundantSite, TooFewSites,
                         UnknownSite)
from mpds.gaps import GapState, detect_gaps
from mpds.triangulation import OutsideHull, build

from conftest import make_rng


def coord_key(tri, t):
    """Triangle identity by site coordinates, not ids, so two
    triangulations built through different histories compare equal."""
    out = []
    for (sid, dx, dy) in tri.canonical_triangle_key(t):
        s = tri.sites[sid]
        out.append((s[0], s[1], s[2], dx, dy))
    return tuple(sorted(out))


def tri_signature(tri):
    return sorted(coord_key(tri, t) for t in tri.domain_triangles())


def gap_signature(tri, gaps):
    return sorted(coord_key(tri, g.triangle[0]) for g in gaps)


def rebuild_of(tri):
    sites = [(s[0], s[1], s[2]) for _, s in sorted(tri.sites.items())]
    return build(sites, periodic=tri.periodic)


def random_sites(rng, n, r_lo=0.02, r_hi=0.08):
    return [(float(x), float(y), float(r))
            for (x, y, r) in zip(rng.uniform(0, 1, n), rng.uniform(0, 1, n),
                                 rng.uniform(r_lo, r_hi, n))]


# ----------------------------------------------------------------------
# construction

def test_build_periodic_euler():
    from conftest import random_conflict_free
    rng = make_rng(21, 0)
    tri = build(random_conflict_free(rng, 40, 0.04, 0.08, periodic=True),
                periodic=True)
    tri.audit_structure()
    # torus: F = 2 V over the domain triangles
    assert len(tri.domain_triangles()) == 2 * tri.n_sites()


def test_build_bounded_audit():
    from conftest import random_conflict_free
    rng = make_rng(21, 1)
    sites = random_conflict_free(rng, 40, 0.04, 0.08, periodic=False)
    tri = build(sites, periodic=False)
    tri.audit_structure()
    assert tri.n_sites() == len(sites)
    assert len(tri.domain_triangles()) > 0


def test_build_methods_agree():
    from conftest import random_conflict_free
    rng = make_rng(21, 2)
    # conflict-free input: no site can be power-hidden by a neighbor
    sites = random_conflict_free(rng, 120, 0.03, 0.07, periodic=True)
    assert len(sites) > 60
    a = build(sites, periodic=True, method="bulk")
    b = build(sites, periodic=True, method="incremental")
    assert tri_signature(a) == tri_signature(b)


def test_build_rejects_degenerate_input():
    with pytest.raises(TooFewSites):
        build([(0.1, 0.1, 0.05), (0.9, 0.9, 0.05)], periodic=False)
    from mpds.errors import AllCollinear
    with pytest.raises(AllCollinear):
        build([(0.1, 0.1, 0.02), (0.5, 0.5, 0.02), (0.9, 0.9, 0.02)],
              periodic=False)


def test_regularity_audit_random():
    from conftest import random_conflict_free
    rng = make_rng(21, 3)
    sites = random_conflict_free(rng, 150, 0.04, 0.08, periodic=True)
    tri = build(sites, periodic=True)
    tri.audit_regular(sample=400)


# ----------------------------------------------------------------------
# queries

def test_locate_and_outside():
    sites = [(0.2, 0.2, 0.05), (0.8, 0.2, 0.05), (0.5, 0.8, 0.05),
             (0.5, 0.4, 0.05)]
    tri = build(sites, periodic=False)
    t = tri.locate((0.5, 0.45))
    assert isinstance(t, int)
    assert t in tri.domain_triangles()
    assert tri.locate((12.0, 12.0)) is OutsideHull


def test_power_cell_of_grid_interior_site():
    # 3x3 unit-spaced grid, equal radii: the middle cell is the unit
    # square centered on its site
    sites = [(float(i), float(j), 0.4) for i in range(3) for j in range(3)]
    tri = build(sites, periodic=False)
    mid = [sid for sid, s in tri.sites.items()
           if s[0] == 1.0 and s[1] == 1.0][0]
    cell = tri.power_cell(mid, clip_box=(-2, -2, 4, 4))
    assert cell is not None
    xs = sorted(p[0] for p in cell)
    ys = sorted(p[1] for p in cell)
    assert xs[0] == pytest.approx(0.5) and xs[-1] == pytest.approx(1.5)
    assert ys[0] == pytest.approx(0.5) and ys[-1] == pytest.approx(1.5)
    area = 0.0
    for i in range(len(cell)):
        x0, y0 = cell[i]
        x1, y1 = cell[(i + 1) % len(cell)]
        area += 0.5 * (x0 * y1 - x1 * y0)
    assert abs(area) == pytest.approx(1.0)


def test_power_cells_tile_the_periodic_square():
    from conftest import random_conflict_free
    rng = make_rng(21, 4)
    tri = build(random_conflict_free(rng, 30, 0.06, 0.12, periodic=True),
                periodic=True)
    total = 0.0
    for sid in list(tri.sites):
        cell = tri.power_cell(sid, clip_box=(-1.5, -1.5, 2.5, 2.5))
        if cell is None:
            continue
        a = 0.0
        for i in range(len(cell)):
            x0, y0 = cell[i]
            x1, y1 = cell[(i + 1) % len(cell)]
            a += 0.5 * (x0 * y1 - x1 * y0)
        total += abs(a)
    assert total == pytest.approx(1.0, rel=1e-9)


# ----------------------------------------------------------------------
# mutations

def test_insert_then_remove_restores_signature():
    from conftest import random_conflict_free
    rng = make_rng(21, 5)
    tri = build(random_conflict_free(rng, 50, 0.05, 0.1, periodic=True),
                periodic=True)
    before = tri_signature(tri)
    sid = tri.insert_site(0.31, 0.47, 0.05)
    assert tri_signature(tri) != before
    tri.remove_site(sid)
    assert tri_signature(tri) == before


def test_redundant_insert_rolls_back():
    sites = [(0.2, 0.2, 0.05), (0.8, 0.2, 0.05), (0.5, 0.8, 0.05)]
    tri = build(sites, periodic=False)
    before = tri_signature(tri)
    with pytest.raises(RedundantSite):
        tri.insert_site(0.2, 0.2, 0.05)     # exact duplicate is hidden
    assert tri_signature(tri) == before


def test_hidden_by_big_disk_rolls_back():
    sites = [(0.2, 0.2, 0.3), (0.8, 0.2, 0.3), (0.5, 0.8, 0.3)]
    tri = build(sites, periodic=False)
    before = tri_signature(tri)
    # a tiny disk exactly on a fat site's center has no power cell
    with pytest.raises(RedundantSite):
        tri.insert_site(0.2, 0.2, 0.001)
    assert tri_signature(tri) == before


def test_remove_guards():
    sites = [(0.2, 0.2, 0.05), (0.8, 0.2, 0.05), (0.5, 0.8, 0.05)]
    tri = build(sites, periodic=False)
    with pytest.raises(UnknownSite):
        tri.remove_site(999)
    with pytest.raises(TooFewSites):
        tri.remove_site(next(iter(tri.sites)))


def test_set_radius_conflict_rolls_back():
    sites = [(0.2, 0.2, 0.05), (0.21, 0.2, 0.05), (0.8, 0.2, 0.05),
             (0.5, 0.8, 0.05)]
    tri = build(sites, periodic=False)
    before = tri_signature(tri)
    small = [sid for sid, s in tri.sites.items() if s[0] == 0.21][0]
    big = [sid for sid, s in tri.sites.items() if s[0] == 0.2][0]
    with pytest.raises(ConflictError):
        tri.set_radius(big, 1.5)    # swallows the 0.21 neighbor
    assert tri_signature(tri) == before
    assert small in tri.sites


def test_move_site_matches_rebuild():
    from conftest import random_conflict_free
    rng = make_rng(21, 6)
    tri = build(random_conflict_free(rng, 40, 0.05, 0.1, periodic=True),
                periodic=True)
    sid = sorted(tri.sites)[7]
    tri.move_site(sid, (0.123, 0.456))
    assert tri_signature(tri) == tri_signature(rebuild_of(tri))


# ----------------------------------------------------------------------
# sustained differential (short form; the acceptance suite runs 10^4)

def run_differential(seed, n_ops, periodic=True, n0=60, checkpoint=250):
    from conftest import random_conflict_free
    rng = make_rng(900, seed)
    tri = build(random_conflict_free(rng, n0, 0.04, 0.09,
                                     periodic=periodic), periodic=periodic)
    gs = GapState(tri)
    ops = {"insert": 0, "remove": 0, "move": 0, "radius": 0,
           "redundant": 0, "conflict": 0}
    for k in range(n_ops):
        kind = rng.choice(["insert", "remove", "move", "radius"],
                          p=[0.35, 0.25, 0.2, 0.2])
        try:
            if kind == "insert":
                x, y = rng.uniform(0, 1, 2)
                tri.insert_site(float(x), float(y),
                                float(rng.uniform(0.02, 0.08)))
            elif kind == "remove":
                if tri.n_sites() > 8:
                    tri.remove_site(rng.choice(sorted(tri.sites)))
                else:
                    ops["remove"] -= 1
            elif kind == "move":
                sid = rng.choice(sorted(tri.sites))
                s = tri.sites[sid]
                nx = (s[0] + rng.normal(0, 0.03)) % 1.0 if periodic else \
                    min(1.0, max(0.0, s[0] + rng.normal(0, 0.03)))
                ny = (s[1] + rng.normal(0, 0.03)) % 1.0 if periodic else \
                    min(1.0, max(0.0, s[1] + rng.normal(0, 0.03)))
                tri.move_site(sid, (float(nx), float(ny)))
            else:
                sid = rng.choice(sorted(tri.sites))
                r = tri.sites[sid][2] * rng.uniform(0.6, 1.5)
                tri.set_radius(sid, float(min(0.12, max(0.01, r))))
            ops[kind] += 1
        except RedundantSite:
            ops["redundant"] += 1
        except ConflictError:
            ops["conflict"] += 1
        gs.update()
        if (k + 1) % checkpoint == 0 or k + 1 == n_ops:
            ref = rebuild_of(tri)
            assert tri_signature(tri) == tri_signature(ref), \
                f"triangle sets diverged after op {k + 1}"
            assert gap_signature(tri, gs.gaps()) == \
                gap_signature(ref, detect_gaps(ref)), \
                f"gap sets diverged after op {k + 1}"
    tri.audit_structure()
    assert ops["insert"] > 0 and ops["remove"] > 0 and ops["move"] > 0 \
        and ops["radius"] > 0
    return ops


def test_differential_periodic_short():
    run_differential(seed=1, n_ops=1200)


def test_differential_bounded_short():
    run_differential(seed=2, n_ops=800, periodic=False)
