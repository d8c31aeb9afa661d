"""Maximal disk sampling with varying radii, gap repair, and meshing."""

from .density import ExpressionDensity, GridDensity, UniformDensity
from .domain import Box, PeriodicUnitSquare, PolygonWithHoles
from .errors import (ConfigError, ConfigMismatch, EmptyDomain,
                     InvalidPolygon, IterationCapExceeded, MpdsError,
                     NonPositiveDensity, RedundantSite, TooFewPoints,
                     TooFewSites)
from .gaps import GapState, detect_gaps, extract_all_primitives
from .mesh import (Mesh2, MeshStats, extract_mesh, mesh_stats, save_obj,
                   save_off, stats_table)
from .optimize import Mode, OptimizeConfig, OptimizeResult, optimize
from .pointio import VERSION, load_points, save_points
from .sampler import (SampleSet, SamplerConfig, SamplerStats,
                      maximal_sample, progressive_sample)
from .triangulation import RegularTriangulation, build

__version__ = VERSION

__all__ = [
    "Box", "ConfigError", "ConfigMismatch", "EmptyDomain",
    "ExpressionDensity", "GapState", "GridDensity", "InvalidPolygon",
    "IterationCapExceeded", "Mesh2", "MeshStats", "Mode", "MpdsError",
    "NonPositiveDensity", "OptimizeConfig", "OptimizeResult",
    "PeriodicUnitSquare", "PolygonWithHoles", "RedundantSite",
    "RegularTriangulation", "SampleSet", "SamplerConfig", "SamplerStats",
    "TooFewPoints", "TooFewSites", "UniformDensity", "VERSION",
    "build", "detect_gaps", "extract_all_primitives", "extract_mesh",
    "maximal_sample", "mesh_stats", "optimize", "progressive_sample",
    "save_obj", "save_off", "save_points", "load_points", "stats_table",
]
