"""Spectral and differential statistics for point sets.

The periodogram is evaluated by direct summation over the integer
frequency lattice (no binning through an FFT grid), radially averaged,
and normalized so an ideal white-noise process has expected power 1 in
every bin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .errors import ConfigMismatch, TooFewPoints
from .mesh import MeshStats

_MIN_POINTS = 100
_ROW_BLOCK = 128     # frequency rows per matmul block


@dataclass
class Spectrum:
    """Radial power summary plus the raw square periodogram.

    The raw grid spans the symmetric integer frequency lattice
    [-grid/2, grid/2]^2 (odd side length grid+1), so a quarter turn is an
    exact permutation of the grid.  Radial bin k collects frequencies
    with |f| rounding to k, k = 1..grid/2; DC is excluded.
    """

    grid: int
    frequencies: np.ndarray      # bin centers, 1..grid/2
    radial_power: np.ndarray
    anisotropy_db: np.ndarray    # 10 log10(variance / mean) per bin
    raw: np.ndarray              # (grid+1, grid+1), fx varies over rows


def _nudft_grid(points: np.ndarray, grid: int) -> np.ndarray:
    """|sum_j exp(-2 pi i f.x_j)|^2 / N over the symmetric lattice."""
    n = len(points)
    freqs = np.arange(-grid // 2, grid // 2 + 1, dtype=float)
    ex = np.exp(-2j * np.pi * np.outer(freqs, points[:, 0]))
    ey = np.exp(-2j * np.pi * np.outer(freqs, points[:, 1]))
    g = len(freqs)
    raw = np.empty((g, g), dtype=float)
    for a in range(0, g, _ROW_BLOCK):
        b = min(a + _ROW_BLOCK, g)
        s = ex[a:b] @ ey.T
        raw[a:b] = s.real ** 2 + s.imag ** 2
    return raw / n


def periodogram(points, grid: int = 512) -> Spectrum:
    """Radially averaged power spectrum of a unit-torus point set.

    grid must be a power of two in [256, 1024]; the raw lattice extends
    one row/column beyond so it stays symmetric about DC.
    """
    if grid < 256 or grid > 1024 or grid & (grid - 1):
        raise ConfigMismatch(f"grid must be a power of two in [256, 1024], "
                             f"got {grid}")
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] < 2:
        raise TooFewPoints("expected an (n, 2+) array")
    pts = pts[:, :2]
    if len(pts) < _MIN_POINTS:
        raise TooFewPoints(f"{len(pts)} points; need >= {_MIN_POINTS}")
    raw = _nudft_grid(pts, grid)
    g = grid + 1
    half = grid // 2
    fx = np.arange(-half, half + 1)
    r2 = fx[:, None] ** 2 + fx[None, :] ** 2
    # integer radius^2 keeps the bin map deterministic and exactly
    # symmetric under the lattice's 90-degree rotation
    rad = np.rint(np.sqrt(r2.astype(float))).astype(int)
    mask = (rad >= 1) & (rad <= half)
    idx = rad[mask]
    vals = raw[mask]
    cnt = np.bincount(idx, minlength=half + 1)[1:]
    s1 = np.bincount(idx, weights=vals, minlength=half + 1)[1:]
    mean = np.where(cnt > 0, s1 / np.maximum(cnt, 1), 0.0)
    s2 = np.bincount(idx, weights=vals * vals, minlength=half + 1)[1:]
    var = np.where(cnt > 1,
                   np.maximum(s2 / np.maximum(cnt, 1) - mean ** 2, 0.0), 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        aniso = 10.0 * np.log10(np.where((mean > 0) & (cnt > 1),
                                         var / mean, np.nan))
    return Spectrum(grid=grid, frequencies=np.arange(1, half + 1, dtype=float),
                    radial_power=mean, anisotropy_db=aniso, raw=raw)


def spectrum_csv(spec: Spectrum) -> str:
    lines = ["frequency,power,anisotropy_db"]
    for f, p, a in zip(spec.frequencies, spec.radial_power,
                       spec.anisotropy_db):
        lines.append(f"{f:.1f},{p:.10g},{a:.10g}")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# aggregation across runs

_NUMERIC_FIELDS = ["n_vertices", "n_triangles", "theta_min", "theta_max",
                   "q_min", "edge_ratio_min", "edge_ratio_max",
                   "area_ratio_min", "area_ratio_max",
                   "pct_angles_below_30", "v567"]


@dataclass
class Aggregate:
    n_runs: int
    fields: Dict[str, Tuple[float, float, float]]   # mean, min, max

    def table(self) -> str:
        out = [f"{'field':>22} {'mean':>12} {'min':>12} {'max':>12}"]
        for k, (m, lo, hi) in self.fields.items():
            out.append(f"{k:>22} {m:>12.4f} {lo:>12.4f} {hi:>12.4f}")
        return "\n".join(out)


def compare_runs(runs: Sequence[Tuple[dict, MeshStats]]) -> Aggregate:
    """Mean/min/max of every numeric stats field across same-config runs.

    Each run is (config-dict, MeshStats); config dicts must agree on all
    shared keys except 'seed'.
    """
    if len(runs) < 2:
        raise ConfigMismatch("need at least two runs to aggregate")
    ref = {k: v for k, v in runs[0][0].items() if k != "seed"}
    for cfg, _ in runs[1:]:
        got = {k: v for k, v in cfg.items() if k != "seed"}
        if got != ref:
            raise ConfigMismatch(f"config mismatch: {got!r} != {ref!r}")
    fields = {}
    for name in _NUMERIC_FIELDS:
        vals = [float(getattr(st, name)) for _, st in runs]
        fields[name] = (sum(vals) / len(vals), min(vals), max(vals))
    return Aggregate(n_runs=len(runs), fields=fields)


# ----------------------------------------------------------------------
# gap census

@dataclass
class GapCensus:
    gaps: int          # connected uncovered regions
    primitives: int
    igs: int


def gap_census(tri, eps_gap=None) -> GapCensus:
    """Counts of uncovered components, primitives, and independent sets."""
    from .gaps import (cluster_igs, connected_components, detect_gaps,
                       extract_all_primitives)

    gaps = detect_gaps(tri, eps_gap)
    if not gaps:
        return GapCensus(0, 0, 0)
    comps = connected_components(gaps, tri)
    prims, igs = extract_all_primitives(tri, eps_gap=eps_gap)
    return GapCensus(gaps=len(comps), primitives=len(prims), igs=len(igs))
