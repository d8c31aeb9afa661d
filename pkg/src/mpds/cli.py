"""Command-line front end.

Subcommands: sample, optimize, stats, spectrum, census, svg.  Exit codes:
0 ok, 2 bad flags or malformed input, 3 runtime invariant violation,
4 optimization did not converge (outputs are still written).
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Dict, List, Optional, Tuple

import numpy as np

from .density import ExpressionDensity, GridDensity, UniformDensity
from .domain import Box, PeriodicUnitSquare, PolygonWithHoles
from .errors import ConfigError, MpdsError, SamplerError
from .mesh import extract_mesh, mesh_stats, save_obj, save_off, stats_table
from .pointio import (VERSION, config_hash, load_points, save_points,
                      save_stats_json)
from .sampler import SamplerConfig, maximal_sample
from .triangulation import build

_EXIT_CONFIG = 2
_EXIT_RUNTIME = 3
_EXIT_NOCONV = 4


def _add_domain_flags(p: argparse.ArgumentParser):
    p.add_argument("--domain", nargs="+", default=["periodic"],
                   metavar=("KIND", "ARG"),
                   help="periodic | box [x0,y0,x1,y1] | polygon FILE")
    p.add_argument("--density", nargs="+", default=["uniform", "1"],
                   metavar=("KIND", "ARG"),
                   help="uniform V | grid FILE.pgm | expr STRING")
    p.add_argument("--rho-lo", type=float, default=1.0,
                   help="density mapped to a PGM value of 0")
    p.add_argument("--rho-hi", type=float, default=16.0,
                   help="density mapped to the PGM max value")


def _add_run_flags(p: argparse.ArgumentParser):
    p.add_argument("--rmin", type=float, help="minimum disk radius")
    p.add_argument("--rmax", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1,
                   help="worker count; execution is sequential either "
                        "way, so results never depend on it")
    p.add_argument("--config", help="JSON file with defaults for any flag")


def _load_polygon_file(path: str) -> List[List[Tuple[float, float]]]:
    rings = []
    with open(path) as f:
        for ln, raw in enumerate(f, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            vals = [float(t) for t in line.split()]
            if len(vals) < 6 or len(vals) % 2:
                raise ConfigError(f"{path}:{ln}: ring needs >= 3 x,y pairs")
            rings.append(list(zip(vals[0::2], vals[1::2])))
    if not rings:
        raise ConfigError(f"{path}: no rings")
    return rings


def _read_pgm(path: str) -> np.ndarray:
    """P2 (ascii) or P5 (binary) grayscale, returned as floats in [0, 1]."""
    with open(path, "rb") as f:
        data = f.read()
    if data[:2] not in (b"P2", b"P5"):
        raise ConfigError(f"{path}: not a P2/P5 PGM file")
    binary = data[:2] == b"P5"
    # strip comments before tokenizing the header
    tokens: List[bytes] = []
    pos = 2
    while len(tokens) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    try:
        w, h, maxval = (int(t) for t in tokens)
    except ValueError:
        raise ConfigError(f"{path}: malformed PGM header") from None
    if w < 2 or h < 2 or maxval < 1:
        raise ConfigError(f"{path}: PGM must be at least 2x2")
    if binary:
        pos += 1
        dtype = ">u2" if maxval > 255 else np.uint8   # PGM is big-endian
        arr = np.frombuffer(data, dtype=dtype, count=w * h, offset=pos)
    else:
        vals = data[pos:].split()
        if len(vals) < w * h:
            raise ConfigError(f"{path}: truncated PGM data")
        arr = np.array([int(v) for v in vals[:w * h]])
    img = arr.reshape(h, w).astype(float) / maxval
    return img[::-1]     # row 0 of a PGM is the top scanline


def _build_domain(args):
    kind = args.domain[0]
    if kind == "periodic":
        return PeriodicUnitSquare()
    if kind == "box":
        if len(args.domain) > 1:
            try:
                x0, y0, x1, y1 = (float(v)
                                  for v in args.domain[1].split(","))
            except ValueError:
                raise ConfigError("--domain box wants x0,y0,x1,y1") from None
        else:
            x0, y0, x1, y1 = 0.0, 0.0, 1.0, 1.0
        return Box(x0, y0, x1, y1)
    if kind == "polygon":
        if len(args.domain) < 2:
            raise ConfigError("--domain polygon needs a file argument")
        return PolygonWithHoles(_load_polygon_file(args.domain[1]))
    raise ConfigError(f"unknown domain kind {kind!r}")


def _build_density(args, domain):
    kind = args.density[0]
    arg = args.density[1] if len(args.density) > 1 else None
    if kind == "uniform":
        return UniformDensity(float(arg) if arg is not None else 1.0)
    if kind == "grid":
        if arg is None:
            raise ConfigError("--density grid needs a PGM file")
        img = _read_pgm(arg)
        if args.rho_lo <= 0 or args.rho_hi < args.rho_lo:
            raise ConfigError("need 0 < rho-lo <= rho-hi")
        values = args.rho_lo + (args.rho_hi - args.rho_lo) * img
        return GridDensity(values, domain.bbox())
    if kind == "expr":
        if arg is None:
            raise ConfigError("--density expr needs an expression")
        return ExpressionDensity(arg, check_bbox=domain.bbox())
    raise ConfigError(f"unknown density kind {kind!r}")


def _apply_config_file(args, argv: List[str]):
    if not getattr(args, "config", None):
        return args
    try:
        with open(args.config) as f:
            stored = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"--config: {exc}") from None
    if not isinstance(stored, dict):
        raise ConfigError("--config: top level must be an object")
    # flags given on the command line win over the file
    for key, val in stored.items():
        dest = key.replace("-", "_")
        if not hasattr(args, dest):
            raise ConfigError(f"--config: unknown key {key!r}")
        if f"--{key}" not in argv and f"--{dest}" not in argv:
            setattr(args, dest, val)
    return args


def _provenance(args, extra: Optional[Dict] = None) -> Dict[str, object]:
    cfg = {k: v for k, v in sorted(vars(args).items())
           if k not in ("func", "parser") and v is not None}
    head: Dict[str, object] = {
        "generator": f"mpds {VERSION}",
        "seed": getattr(args, "seed", 0),
        "config": config_hash(cfg),
    }
    if extra:
        head.update(extra)
    return head


def _sampler_config(args) -> SamplerConfig:
    if args.rmin is None:
        raise ConfigError("--rmin is required")
    try:
        return SamplerConfig(r_min=args.rmin, r_max=args.rmax,
                             seed=args.seed)
    except SamplerError as exc:
        raise ConfigError(str(exc)) from None


def _load_run(args):
    """Common input path: points file -> (sites, domain, density, tri)."""
    sites, _ = load_points(args.infile)
    domain = _build_domain(args)
    density = _build_density(args, domain)
    tri = build(sites, periodic=domain.periodic)
    return sites, domain, density, tri


# ----------------------------------------------------------------------
# subcommands

def cmd_sample(args) -> int:
    domain = _build_domain(args)
    density = _build_density(args, domain)
    cfg = _sampler_config(args)
    result = maximal_sample(domain, density, cfg)
    save_points(args.out, result.sites, _provenance(args))
    st = result.stats
    save_stats_json(args.out + ".json", {
        "version": VERSION,
        "seed": cfg.seed,
        "n_sites": len(result.sites),
        "n_boundary": st.n_boundary,
        "n_dart": st.n_dart,
        "n_fill": st.n_fill,
        "dart_candidates": st.dart_candidates,
        "fill_iterations": st.fill_iterations,
        "shrunk": st.shrunk,
        "dropped_primitives": st.dropped_primitives,
        "maximal": st.maximal,
        "wall_time_s": st.wall_time_s,
    })
    print(f"{len(result.sites)} sites -> {args.out} "
          f"(maximal={st.maximal}, {st.wall_time_s:.1f}s)")
    return 0


def cmd_optimize(args) -> int:
    from .mesh import Mesh2
    from .optimize import Mode, OptimizeConfig, optimize

    sites, domain, density, tri = _load_run(args)
    scfg = _sampler_config(args)
    try:
        mode = Mode(args.mode)
    except ValueError:
        raise ConfigError(f"unknown mode {args.mode!r}") from None
    try:
        ocfg = OptimizeConfig(theta_lo=args.theta_lo, theta_hi=args.theta_hi,
                              lambda_e=args.lambda_e, seed=args.seed)
    except SamplerError as exc:
        raise ConfigError(str(exc)) from None

    before = mesh_stats(extract_mesh(tri, domain), scfg.r_min)
    result = optimize(tri, domain, density, scfg, ocfg, mode)
    mesh = extract_mesh(tri, domain)
    after = mesh_stats(mesh, scfg.r_min)

    out_sites = [(tri.sites[s][0], tri.sites[s][1], tri.sites[s][2])
                 for s in sorted(k for k in tri.sites
                                 if k >= 0 and tri.sites[k][4])]
    save_points(args.out, out_sites,
                _provenance(args, {"converged": result.converged}))
    if args.mesh_out:
        if args.mesh_out.endswith(".off"):
            save_off(mesh, args.mesh_out)
        else:
            save_obj(mesh, args.mesh_out)
    save_stats_json(args.out + ".json", {
        "version": VERSION,
        "seed": args.seed,
        "mode": mode.value,
        "converged": result.converged,
        "passes": result.passes,
        "deleted": result.deleted,
        "refilled": result.refilled,
        "remaining_offenders": result.remaining_offenders,
        "before": before.to_json(),
        "after": after.to_json(),
    })
    print(stats_table(before, "before"))
    print(stats_table(after, "after").splitlines()[-1])
    if not result.converged:
        print(f"not converged: {result.remaining_offenders} offenders left",
              file=sys.stderr)
        return _EXIT_NOCONV
    return 0


def cmd_stats(args) -> int:
    sites, domain, density, tri = _load_run(args)
    scfg = _sampler_config(args)
    mesh = extract_mesh(tri, domain)
    st = mesh_stats(mesh, scfg.r_min)
    if args.out:
        save_stats_json(args.out, st.to_json())
    print(stats_table(st))
    return 0


def cmd_spectrum(args) -> int:
    from .analysis import periodogram, spectrum_csv
    from .mesh import _atomic_write
    from .render import spectrum_figures

    sites, _ = load_points(args.infile)
    pts = np.asarray([(x, y) for (x, y, _) in sites])
    spec = periodogram(pts, grid=args.grid)
    _atomic_write(args.out, spectrum_csv(spec))
    prefix = args.out[:-4] if args.out.endswith(".csv") else args.out
    figs = spectrum_figures(spec, prefix)
    print(f"{args.out} + {', '.join(figs)}")
    return 0


def cmd_census(args) -> int:
    from .analysis import gap_census

    sites, domain, density, tri = _load_run(args)
    census = gap_census(tri)
    payload = {"gaps": census.gaps, "primitives": census.primitives,
               "igs": census.igs}
    if args.out:
        save_stats_json(args.out, payload)
    print(f"gaps={census.gaps} primitives={census.primitives} "
          f"igs={census.igs}")
    return 0


def cmd_svg(args) -> int:
    from .render import render_svg

    sites, domain, density, tri = _load_run(args)
    render_svg(tri, args.out, domain,
               show_disks=not args.no_disks,
               show_mesh=not args.no_mesh,
               show_gaps=not args.no_gaps,
               show_valence=not args.no_valence)
    print(args.out)
    return 0


# ----------------------------------------------------------------------

def _make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mpds",
        description="Maximal disk sampling, meshing, and analysis.")
    ap.add_argument("--version", action="version", version=VERSION)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw a maximal sample")
    _add_domain_flags(p)
    _add_run_flags(p)
    p.add_argument("--out", required=True, help="points file to write")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("optimize", help="drive mesh quality targets")
    p.add_argument("--in", dest="infile", required=True)
    _add_domain_flags(p)
    _add_run_flags(p)
    p.add_argument("--mode", default="joint",
                   choices=["valence", "angle", "edge", "joint"])
    p.add_argument("--theta-lo", type=float, default=30.0)
    p.add_argument("--theta-hi", type=float, default=120.0)
    p.add_argument("--lambda-e", type=float, default=3.0 ** 0.5)
    p.add_argument("--out", required=True)
    p.add_argument("--mesh-out", help="write the mesh too (.obj or .off)")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("stats", help="mesh statistics table")
    p.add_argument("--in", dest="infile", required=True)
    _add_domain_flags(p)
    _add_run_flags(p)
    p.add_argument("--out", help="also write stats JSON here")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("spectrum", help="radial power spectrum")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--grid", type=int, default=512)
    p.add_argument("--out", required=True, help="CSV path")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("census", help="count gaps, primitives, and sets")
    p.add_argument("--in", dest="infile", required=True)
    _add_domain_flags(p)
    _add_run_flags(p)
    p.add_argument("--out", help="also write counts JSON here")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("svg", help="render a scene")
    p.add_argument("--in", dest="infile", required=True)
    _add_domain_flags(p)
    _add_run_flags(p)
    p.add_argument("--out", required=True)
    p.add_argument("--no-disks", action="store_true")
    p.add_argument("--no-mesh", action="store_true")
    p.add_argument("--no-gaps", action="store_true")
    p.add_argument("--no-valence", action="store_true")
    p.set_defaults(func=cmd_svg)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    from .errors import EmptyDomain, InvalidPolygon, NonPositiveDensity

    if argv is None:
        argv = sys.argv[1:]
    parser = _make_parser()
    args = parser.parse_args(argv)
    try:
        args = _apply_config_file(args, list(argv))
        return args.func(args)
    except (ConfigError, EmptyDomain, InvalidPolygon, NonPositiveDensity,
            FileNotFoundError) as exc:
        name = type(exc).__name__
        tag = f"{name}: " if isinstance(exc, MpdsError) else ""
        print(f"error: {tag}{exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except MpdsError as exc:
        print(f"runtime error: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return _EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
