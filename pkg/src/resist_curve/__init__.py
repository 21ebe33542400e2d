"""Resistance curvature: node and link curvature of graphs from effective resistances."""

__version__ = "0.1.0"

from .curvature import (  # noqa: E402
    CurvatureReport,
    bounds_report,
    curvature_report,
    link_curvature,
    limit_link_curvature,
    limit_node_curvature,
    node_curvature,
    normalized_link_curvature,
    sigma_squared,
)
from .graph import WeightedGraph, build_graph, components, laplacian  # noqa: E402
from .resistance import (  # noqa: E402
    ApproxConfig,
    ResistanceProfile,
    approx_effective_resistance,
    effective_resistance,
)

__all__ = [
    "ApproxConfig",
    "CurvatureReport",
    "ResistanceProfile",
    "WeightedGraph",
    "approx_effective_resistance",
    "bounds_report",
    "build_graph",
    "components",
    "curvature_report",
    "effective_resistance",
    "laplacian",
    "limit_link_curvature",
    "limit_node_curvature",
    "link_curvature",
    "node_curvature",
    "normalized_link_curvature",
    "sigma_squared",
]
