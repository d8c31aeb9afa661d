"""Quality optimization by deletion and refill.

The loop never smooths or moves points: offenders (bad valence, bad
incident angle, over-long edge) are deleted together with their
neighborhood, and the resulting holes are refilled by the maximal gap
sampler.  Each pass therefore ends on a maximal sampling again, and the
conflict invariant is never suspended where a caller could observe it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Set, Tuple

import numpy as np

from .errors import SamplerError, TooFewSites
from .sampler import AccelGrid, SamplerConfig, SamplerStats, _stream, fill_gaps


class Mode(Enum):
    VALENCE = "valence"
    ANGLE = "angle"
    EDGE_LENGTH = "edge"
    JOINT = "joint"


@dataclass(frozen=True)
class OptimizeConfig:
    """Targets and caps for the deletion/refill loop."""

    theta_lo: float = 30.0
    theta_hi: float = 120.0
    valence_lo: int = 5
    valence_hi: int = 7
    lambda_e: float = math.sqrt(3.0)
    per_criterion_cap: int = 25
    global_cap: int = 10
    schedule: str = "va"
    escalate_after: int = 5
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.theta_lo < 60.0 < self.theta_hi < 180.0):
            raise SamplerError(
                f"need 0 < theta_lo < 60 < theta_hi < 180, got "
                f"[{self.theta_lo}, {self.theta_hi}]")
        if not self.schedule or set(self.schedule) - {"v", "a"}:
            raise SamplerError(
                f"schedule must be a nonempty string over 'v'/'a', got "
                f"{self.schedule!r}")


@dataclass
class OptimizeResult:
    converged: bool
    mode: Mode
    passes: int
    deleted: int
    refilled: int
    remaining_offenders: int
    criteria: Dict[str, bool] = field(default_factory=dict)
    fill_stats: SamplerStats = field(default_factory=SamplerStats)


def _site_geometry(tri):
    """Per canonical triangle: (site ids, angles deg); plus adjacency."""
    tri.ensure_caches()
    ids = tri.domain_triangles()
    tv = np.asarray(tri.tv).reshape(-1, 3)[ids]
    vx = np.asarray(tri.vx)
    vy = np.asarray(tri.vy)
    vsite = np.asarray(tri.vsite)
    ax, ay = vx[tv[:, 0]], vy[tv[:, 0]]
    bx, by = vx[tv[:, 1]], vy[tv[:, 1]]
    cx, cy = vx[tv[:, 2]], vy[tv[:, 2]]

    def ang(ux, uy, wx, wy):
        dot = ux * wx + uy * wy
        det = ux * wy - uy * wx
        return np.degrees(np.abs(np.arctan2(det, dot)))

    A = ang(bx - ax, by - ay, cx - ax, cy - ay)
    B = ang(ax - bx, ay - by, cx - bx, cy - by)
    C = 180.0 - A - B
    angles = np.stack([A, B, C], axis=1)
    tsites = vsite[tv]
    return ids, tsites, angles, (ax, ay, bx, by, cx, cy)


def _neighbors(tri) -> Dict[int, Set[int]]:
    """Canonical site adjacency from the canonical triangles."""
    nbr: Dict[int, Set[int]] = {}
    vsite = tri.vsite
    tv = tri.tv
    for t in tri.domain_triangles():
        base = 3 * t
        s = (vsite[tv[base]], vsite[tv[base + 1]], vsite[tv[base + 2]])
        for i in range(3):
            a, b = s[i], s[(i + 1) % 3]
            nbr.setdefault(a, set()).add(b)
            nbr.setdefault(b, set()).add(a)
    return nbr


def _offenders(tri, cfg: OptimizeConfig, criterion: str,
               frozen: Set[int]) -> Set[int]:
    """Site ids violating one criterion (frozen sites never offend)."""
    out: Set[int] = set()
    if criterion == "valence":
        for sid, ns in _neighbors(tri).items():
            if sid in frozen:
                continue
            if not (cfg.valence_lo <= len(ns) <= cfg.valence_hi):
                out.add(sid)
        return out
    ids, tsites, angles, _ = _site_geometry(tri)
    if criterion == "angle":
        # the offender is the apex whose own angle leaves the interval
        bad = (angles < cfg.theta_lo) | (angles > cfg.theta_hi)
        out.update(int(s) for s in tsites[bad])
        return out - frozen
    if criterion == "edge":
        # an edge offends when longer than lambda_e * (r_i + r_j)
        for t, row in zip(ids, tsites):
            pa, pb, pc = tri.triangle_coords(t)
            pts = (pa, pb, pc)
            for i in range(3):
                a, b = int(row[i]), int(row[(i + 1) % 3])
                (x0, y0), (x1, y1) = pts[i], pts[(i + 1) % 3]
                lim = cfg.lambda_e * (tri.site_radius(a)
                                      + tri.site_radius(b))
                if math.hypot(x1 - x0, y1 - y0) > lim:
                    out.add(a)
                    out.add(b)
        return out - frozen
    raise SamplerError(f"unknown criterion {criterion!r}")


def _delete_with_rings(tri, picks, nbr, frozen, depth_of=None):
    """Delete each pick plus depth_of[pick] rings (default one ring)."""
    doomed: Set[int] = set()
    for sid in picks:
        region = {sid}
        frontier = {sid}
        for _ in range(depth_of.get(sid, 1) if depth_of else 1):
            frontier = set().union(
                *(nbr.get(t, set()) for t in frontier)) - region
            region |= frontier
        doomed |= region
    doomed -= frozen
    deleted = 0
    for sid in doomed:
        if tri.n_sites() <= 16:
            break
        try:
            tri.remove_site(sid)
            deleted += 1
        except (TooFewSites, KeyError):
            break
    return deleted


def _rebuild_grid(tri, cfg: SamplerConfig, domain) -> AccelGrid:
    grid = AccelGrid(domain.bbox(), cfg.r_min, domain.periodic)
    for sid, s in tri.sites.items():
        if s[4]:
            grid.insert(s[0], s[1], s[2])
    return grid


def _frozen_sites(tri, domain) -> Set[int]:
    """Sites sitting on a bounded domain's boundary rings (immutable)."""
    if domain.periodic:
        return set()
    from .sampler import _ring_walk
    segs_all = []
    for ring in domain.boundary_rings():
        segs, _ = _ring_walk(ring)
        segs_all.extend(segs)
    out = set()
    for sid, s in tri.sites.items():
        if not s[4]:
            continue
        x, y, r = s[0], s[1], s[2]
        tol = 1e-9 * max(r, 1e-30)
        for (x0, y0, x1, y1, L, _) in segs_all:
            dx, dy = x1 - x0, y1 - y0
            t = ((x - x0) * dx + (y - y0) * dy) / (L * L)
            t = min(max(t, 0.0), 1.0)
            if math.hypot(x - (x0 + t * dx), y - (y0 + t * dy)) <= tol:
                out.add(sid)
                break
    return out


class _StuckTracker:
    """Spatial memory of offender locations across same-criterion passes.

    Deleted offenders lose their site ids, so persistence is tracked by
    position: an offender sitting within 1.5 local radii of an offender
    from the previous pass continues that location's streak.  Locations
    whose streak reaches the escalation threshold get their deletion
    region widened to the two-ring; escalating every offender instead
    makes the offender count explode with the extra fresh texture.
    """

    def __init__(self, periodic: bool):
        self.periodic = periodic
        self.pos = None
        self.streak = None

    def streaks_for(self, pts: np.ndarray, radii: np.ndarray) -> np.ndarray:
        from scipy.spatial import cKDTree
        out = np.ones(len(pts), dtype=int)
        if self.pos is not None and len(self.pos):
            if self.periodic:
                tree = cKDTree(self.pos % 1.0, boxsize=1.0)
                d, idx = tree.query(pts % 1.0)
            else:
                tree = cKDTree(self.pos)
                d, idx = tree.query(pts)
            hit = d <= 1.5 * radii
            out[hit] = self.streak[idx[hit]] + 1
        return out

    def remember(self, pts: np.ndarray, streaks: np.ndarray):
        self.pos = pts
        self.streak = streaks

    def clear(self):
        self.pos = None
        self.streak = None


def _one_pass(tri, domain, density, scfg, cfg, criterion, frozen, rng,
              result, stuck: Optional[_StuckTracker] = None):
    """Delete every offender plus its rings, refill once.

    Offenders must all go in the same pass; trickling them through a few
    at a time leaves each refill trapped by the surrounding bad texture
    and the offender count stops decaying.
    """
    offs = _offenders(tri, cfg, criterion, frozen)
    if not offs:
        if stuck is not None:
            stuck.clear()
        return 0
    nbr = _neighbors(tri)
    picked = sorted(offs)
    depth_of = None
    if stuck is not None:
        pts = np.array([(tri.sites[s][0], tri.sites[s][1]) for s in picked])
        radii = np.array([tri.sites[s][2] for s in picked])
        streaks = stuck.streaks_for(pts, radii)
        stuck.remember(pts, streaks)
        # depth caps at the two-ring: even wider cavities refill with
        # more fresh offenders than they remove
        depth_of = {s: min(1 + k // cfg.escalate_after, 2)
                    for s, k in zip(picked, streaks)}
    rng.shuffle(picked)
    result.deleted += _delete_with_rings(tri, picked, nbr, frozen,
                                         depth_of)
    grid = _rebuild_grid(tri, scfg, domain)
    added: list = []
    fill_gaps(tri, domain, density, scfg, grid, added,
              stats=result.fill_stats)
    result.refilled += len(added)
    return len(_offenders(tri, cfg, criterion, frozen))


def optimize(tri, domain, density, sampler_config: SamplerConfig,
             config: Optional[OptimizeConfig] = None,
             mode: Mode = Mode.JOINT, log=None) -> OptimizeResult:
    """Drive the triangulation toward the configured quality targets.

    Single-criterion modes loop up to per_criterion_cap passes.  JOINT
    runs the config schedule (one phase per letter, 'v' valence and 'a'
    angle, default 1:1 alternation) up to global_cap interleaves; each
    phase repeats mass passes of its own criterion until that criterion
    is clean or per_criterion_cap is hit.  A lone pass per criterion per
    interleave is not enough: refilled cavities re-offend at roughly the
    base texture rate, so extinction needs consecutive same-criterion
    passes.  A location that stays an offender for escalate_after
    consecutive passes of one criterion gets its deletion region widened
    to the two-ring (only for itself; see _StuckTracker).  Every pass
    ends on a maximal sampling; converged=False is a flag, not an error.
    log, if given, receives one progress line per pass.
    """
    if config is None:
        config = OptimizeConfig()
    if isinstance(mode, str):
        mode = Mode(mode)
    if log is None:
        log = lambda msg: None
    frozen = _frozen_sites(tri, domain)
    result = OptimizeResult(converged=False, mode=mode, passes=0,
                            deleted=0, refilled=0, remaining_offenders=0)
    single = {Mode.VALENCE: "valence", Mode.ANGLE: "angle",
              Mode.EDGE_LENGTH: "edge"}
    if mode in single:
        crit = single[mode]
        stuck = _StuckTracker(domain.periodic)
        remaining = len(_offenders(tri, config, crit, frozen))
        for it in range(1, config.per_criterion_cap + 1):
            if remaining == 0:
                break
            rng = _stream(config.seed, 11, it)
            scfg = _pass_config(sampler_config, config.seed, it)
            result.passes = it
            remaining = _one_pass(tri, domain, density, scfg, config, crit,
                                  frozen, rng, result, stuck)
            log(f"{crit} pass {it}: {remaining} offenders, "
                f"n={tri.n_sites()}")
        result.remaining_offenders = remaining
        result.criteria[crit] = remaining == 0
        result.converged = remaining == 0
        return result
    # joint: one phase per schedule letter per interleave
    crit_of = {"v": (12, "valence"), "a": (13, "angle")}
    trackers = {"valence": _StuckTracker(domain.periodic),
                "angle": _StuckTracker(domain.periodic)}
    for it in range(1, config.global_cap + 1):
        rem_v = len(_offenders(tri, config, "valence", frozen))
        rem_a = len(_offenders(tri, config, "angle", frozen))
        if rem_v == 0 and rem_a == 0:
            break
        result.passes = it
        for slot, letter in enumerate(config.schedule, start=1):
            key, crit = crit_of[letter]
            remaining = len(_offenders(tri, config, crit, frozen))
            for sub in range(1, config.per_criterion_cap + 1):
                if remaining == 0:
                    break
                scfg = _pass_config(sampler_config, config.seed,
                                    1000 * it + 100 * slot + sub)
                remaining = _one_pass(
                    tri, domain, density, scfg, config, crit, frozen,
                    _stream(config.seed, key, it, slot, sub), result,
                    trackers[crit])
                log(f"joint {it}{letter}.{sub}: {remaining} offenders, "
                    f"n={tri.n_sites()}")
    rem_v = len(_offenders(tri, config, "valence", frozen))
    rem_a = len(_offenders(tri, config, "angle", frozen))
    result.remaining_offenders = rem_v + rem_a
    result.criteria = {"valence": rem_v == 0, "angle": rem_a == 0}
    result.converged = rem_v == 0 and rem_a == 0
    return result


def _pass_config(scfg: SamplerConfig, opt_seed: int, it: int) -> SamplerConfig:
    seed = int(np.random.SeedSequence((opt_seed, scfg.seed, 200 + it))
               .generate_state(1)[0])
    return SamplerConfig(r_min=scfg.r_min, r_max=scfg.r_max,
                         k_reject=scfg.k_reject, seed=seed,
                         max_fill_iterations=scfg.max_fill_iterations,
                         eps_gap=scfg.eps_gap)
