"""Figure output: hand-built SVG scenes and matplotlib report figures.

The SVG path writes every element itself so repeated runs give
byte-identical files; matplotlib is only used for the report figures
that accompany the CSV output.
"""
from __future__ import annotations

from typing import Dict, List

from .mesh import _atomic_write

# valence fill colors: 5 blue, 6 green, 7 orange, darker outside [5, 7]
_VALENCE_FILL = {5: "#4a7bd0", 6: "#56b05e", 7: "#e8923a"}
_LOW_FILL = "#1d3a75"
_HIGH_FILL = "#9c5310"
_BOUNDARY_FILL = "#888888"


def _site_valences(tri) -> Dict[int, int]:
    deg: Dict[int, int] = {}
    seen = set()
    for t in tri.domain_triangles():
        a, b, c = tri.triangle_sites(t)
        for u, v in ((a, b), (b, c), (c, a)):
            key = (u, v) if u < v else (v, u)
            if key in seen:
                continue
            seen.add(key)
            for s in key:
                deg[s] = deg.get(s, 0) + 1
    return deg


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def render_svg(tri, path: str, domain=None, *,
               show_disks: bool = True, show_mesh: bool = True,
               show_gaps: bool = True, show_valence: bool = True,
               width: int = 1000):
    """Scene with disks, mesh edges, uncovered regions in red, and
    valence-colored vertices."""
    from .gaps import extract_all_primitives

    xs, ys, rs = [], [], []
    for sid in list(tri.sites):
        if not tri.sites[sid][4] or sid < 0:
            continue
        x, y, r = tri.sites[sid][0], tri.sites[sid][1], tri.sites[sid][2]
        xs.append(x); ys.append(y); rs.append(r)
    if not xs:
        _atomic_write(path, "<svg xmlns='http://www.w3.org/2000/svg'/>\n")
        return
    if tri.periodic:
        lo_x = lo_y = 0.0
        hi_x = hi_y = 1.0
    else:
        pad = max(rs)
        lo_x, hi_x = min(xs) - pad, max(xs) + pad
        lo_y, hi_y = min(ys) - pad, max(ys) + pad
    span = max(hi_x - lo_x, hi_y - lo_y, 1e-12)
    scale = width / span
    height = int(round((hi_y - lo_y) * scale))

    def sx(x):
        return _fmt((x - lo_x) * scale)

    def sy(y):
        # svg y axis points down
        return _fmt((hi_y - y) * scale)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
           f'height="{height}" viewBox="0 0 {width} {height}">',
           f'<rect width="{width}" height="{height}" fill="#ffffff"/>']

    if show_disks:
        out.append('<g fill="#cfe0f5" fill-opacity="0.55" '
                   'stroke="#7aa3d4" stroke-width="0.6">')
        for x, y, r in zip(xs, ys, rs):
            out.append(f'<circle cx="{sx(x)}" cy="{sy(y)}" '
                       f'r="{_fmt(r * scale)}"/>')
        out.append("</g>")

    if show_gaps:
        prims, _ = extract_all_primitives(tri)
        if prims:
            out.append('<g fill="#d03030" fill-opacity="0.85" '
                       'stroke="#801010" stroke-width="0.5">')
            for prim in prims:
                pts = " ".join(f"{sx(px)},{sy(py)}"
                               for (px, py) in prim.vertices)
                out.append(f'<polygon points="{pts}"/>')
            out.append("</g>")

    if show_mesh:
        out.append('<g stroke="#555555" stroke-width="0.7">')
        seen = set()
        for t in tri.domain_triangles():
            coords = tri.triangle_coords(t)
            sids = tri.triangle_sites(t)
            for i in range(3):
                j = (i + 1) % 3
                key = ((sids[i], sids[j]) if sids[i] < sids[j]
                       else (sids[j], sids[i]))
                if key in seen:
                    continue
                seen.add(key)
                (x0, y0), (x1, y1) = coords[i], coords[j]
                out.append(f'<line x1="{sx(x0)}" y1="{sy(y0)}" '
                           f'x2="{sx(x1)}" y2="{sy(y1)}"/>')
        out.append("</g>")

    if show_valence:
        deg = _site_valences(tri)
        dot = max(2.0, 0.14 * (sum(rs) / len(rs)) * scale)
        out.append('<g stroke="none">')
        for sid in sorted(k for k in tri.sites
                          if k >= 0 and tri.sites[k][4]):
            x, y = tri.sites[sid][0], tri.sites[sid][1]
            d = deg.get(sid)
            if d is None:
                continue
            if d < 5:
                fill = _LOW_FILL
            elif d > 7:
                fill = _HIGH_FILL
            else:
                fill = _VALENCE_FILL[d]
            out.append(f'<circle cx="{sx(x)}" cy="{sy(y)}" '
                       f'r="{_fmt(dot)}" fill="{fill}"/>')
        out.append("</g>")

    out.append("</svg>")
    _atomic_write(path, "\n".join(out) + "\n")


def spectrum_figures(spec, out_prefix: str) -> List[str]:
    """Radial power and anisotropy figures next to the CSV."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    files = []
    fig, ax = plt.subplots(figsize=(6.0, 3.6), dpi=150)
    ax.plot(spec.frequencies, spec.radial_power, lw=1.0, color="#2060b0")
    ax.axhline(1.0, color="#999999", lw=0.8, ls="--")
    ax.set_xlabel("frequency")
    ax.set_ylabel("radial power")
    ax.set_ylim(bottom=0.0)
    fig.tight_layout()
    p = f"{out_prefix}_power.png"
    fig.savefig(p)
    plt.close(fig)
    files.append(p)

    fig, ax = plt.subplots(figsize=(6.0, 3.6), dpi=150)
    ax.plot(spec.frequencies, spec.anisotropy_db, lw=1.0, color="#b04020")
    ax.set_xlabel("frequency")
    ax.set_ylabel("anisotropy (dB)")
    fig.tight_layout()
    p = f"{out_prefix}_aniso.png"
    fig.savefig(p)
    plt.close(fig)
    files.append(p)
    return files
