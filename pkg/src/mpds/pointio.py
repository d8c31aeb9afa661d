"""Point-set files: `x y r` lines with a provenance header.

Floats are written with repr-exact precision so load -> save reproduces
the file byte for byte.  Every writer goes through a temp file plus
rename; a failed run leaves no partial output.
"""
from __future__ import annotations

import hashlib
import json
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import MpdsError
from .mesh import _atomic_write

try:
    from importlib.metadata import version as _dist_version
    VERSION = _dist_version("mpds")
except Exception:                       # not installed; running from tree
    VERSION = "0.0.0"


def config_hash(config: Dict) -> str:
    """Short stable digest of a config mapping."""
    blob = json.dumps(config, sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def save_points(path: str, sites: Sequence[Tuple[float, float, float]],
                header: Optional[Dict[str, object]] = None):
    """Write `x y r` lines preceded by `# key: value` header lines."""
    lines = []
    for key, val in (header or {}).items():
        lines.append(f"# {key}: {val}")
    for (x, y, r) in sites:
        lines.append(f"{x:.17g} {y:.17g} {r:.17g}")
    _atomic_write(path, "\n".join(lines) + "\n")


def load_points(path: str):
    """Read a points file back as (sites, header-dict)."""
    sites: List[Tuple[float, float, float]] = []
    header: Dict[str, str] = {}
    with open(path) as f:
        for ln, raw in enumerate(f, 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if ":" in body:
                    k, v = body.split(":", 1)
                    header[k.strip()] = v.strip()
                continue
            parts = line.split()
            if len(parts) != 3:
                raise MpdsError(f"{path}:{ln}: expected `x y r`, "
                                f"got {len(parts)} fields")
            try:
                x, y, r = (float(p) for p in parts)
            except ValueError as exc:
                raise MpdsError(f"{path}:{ln}: {exc}") from None
            sites.append((x, y, r))
    return sites, header


def save_stats_json(path: str, payload: Dict):
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True,
                                   default=str) + "\n")
