"""Density fields driving spatially varying disk radii.

A field maps (x, y) -> rho > 0; the target radius at a point is
clamp(1/sqrt(rho), r_min, r_max).  Three variants: constant, bilinear
grid, and a small arithmetic expression language.
"""
from __future__ import annotations

import ast
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import NonPositiveDensity


@dataclass(frozen=True)
class UniformDensity:
    """Constant density rho(x, y) = value."""

    value: float

    def __post_init__(self):
        if not (self.value > 0 and math.isfinite(self.value)):
            raise NonPositiveDensity(f"uniform density {self.value!r}")

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        return np.full(x.shape, self.value, dtype=float)


@dataclass(frozen=True)
class GridDensity:
    """Bilinear interpolation of a value grid stretched over a bbox.

    values[j, i] sits at (xmin + i*dx, ymin + j*dy); queries outside the
    bbox clamp to the edge.
    """

    values: np.ndarray
    bbox: Tuple[float, float, float, float] = (0.0, 0.0, 1.0, 1.0)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] < 2 or v.shape[1] < 2:
            raise NonPositiveDensity("grid must be 2-D with >= 2 rows/cols")
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise NonPositiveDensity("grid contains non-positive density")
        object.__setattr__(self, "values", v)

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        x0, y0, x1, y1 = self.bbox
        ny, nx = self.values.shape
        gx = np.clip((x - x0) / (x1 - x0) * (nx - 1), 0.0, nx - 1)
        gy = np.clip((y - y0) / (y1 - y0) * (ny - 1), 0.0, ny - 1)
        i0 = np.minimum(gx.astype(int), nx - 2)
        j0 = np.minimum(gy.astype(int), ny - 2)
        fx = gx - i0
        fy = gy - j0
        v = self.values
        return ((1 - fx) * (1 - fy) * v[j0, i0]
                + fx * (1 - fy) * v[j0, i0 + 1]
                + (1 - fx) * fy * v[j0 + 1, i0]
                + fx * fy * v[j0 + 1, i0 + 1])


_ALLOWED_FUNCS = {"sqrt": np.sqrt, "exp": np.exp}
_ALLOWED_NAMES = {"pi": math.pi, "e": math.e}
_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)


def _check_node(node):
    if isinstance(node, ast.Expression):
        _check_node(node.body)
    elif isinstance(node, ast.BinOp):
        if not isinstance(node.op, _ALLOWED_BINOPS):
            raise NonPositiveDensity(
                f"operator {type(node.op).__name__} not in expression grammar")
        _check_node(node.left)
        _check_node(node.right)
    elif isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, (ast.USub, ast.UAdd)):
            raise NonPositiveDensity("only unary +/- allowed")
        _check_node(node.operand)
    elif isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)):
            raise NonPositiveDensity(f"literal {node.value!r} not numeric")
    elif isinstance(node, ast.Name):
        if node.id not in ("x", "y") and node.id not in _ALLOWED_NAMES:
            raise NonPositiveDensity(f"unknown name {node.id!r}")
    elif isinstance(node, ast.Call):
        if (not isinstance(node.func, ast.Name)
                or node.func.id not in _ALLOWED_FUNCS
                or len(node.args) != 1 or node.keywords):
            raise NonPositiveDensity("only sqrt(_) and exp(_) calls allowed")
        _check_node(node.args[0])
    else:
        raise NonPositiveDensity(
            f"node {type(node).__name__} not in expression grammar")


class ExpressionDensity:
    """rho(x, y) from a formula over x, y with + - * / ^, sqrt, exp.

    '^' is exponentiation.  Positivity is spot-checked on a coarse grid at
    construction and enforced pointwise on every evaluation.
    """

    def __init__(self, expr: str, check_bbox=(0.0, 0.0, 1.0, 1.0)):
        self.expr = expr
        src = expr.replace("^", "**")
        try:
            tree = ast.parse(src, mode="eval")
        except SyntaxError as exc:
            raise NonPositiveDensity(f"cannot parse {expr!r}: {exc}") from exc
        _check_node(tree)
        self._code = compile(tree, "<density>", "eval")
        x0, y0, x1, y1 = check_bbox
        xs, ys = np.meshgrid(np.linspace(x0, x1, 17), np.linspace(y0, y1, 17))
        probe = self(xs, ys)
        if not np.all(np.isfinite(probe)) or np.any(probe <= 0):
            raise NonPositiveDensity(
                f"{expr!r} non-positive on {check_bbox}")

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        env = {"x": x, "y": y, **_ALLOWED_FUNCS, **_ALLOWED_NAMES}
        with np.errstate(all="ignore"):
            out = eval(self._code, {"__builtins__": {}}, env)
        out = np.asarray(out, dtype=float)
        if out.shape != x.shape:
            out = np.broadcast_to(out, x.shape).copy()
        return out


def radius_at(field, x, y, r_min: float, r_max: float):
    """Target disk radius: 1/sqrt(rho) clamped into [r_min, r_max]."""
    rho = np.asarray(field(x, y), dtype=float)
    if not np.all(np.isfinite(rho)) or np.any(rho <= 0):
        raise NonPositiveDensity("density evaluated non-positive")
    return np.clip(1.0 / np.sqrt(rho), r_min, r_max)
