"""Spanning trees maximizing degree-based metrics (the s-metric, i.e. the
second Zagreb index, and the m-metric, the first Zagreb index): exact
enumeration, heuristics, neighbor switches, integer programs, bound checks
and an outbreak-analysis pipeline."""

from .errors import (
    SFTreeError,
    GraphInputError,
    DisconnectedGraphError,
    TreeValidationError,
    PreconditionError,
    SwitchError,
    MissingHostEdgeError,
    RefusedError,
    SolveTimeout,
    SolverError,
    SolverConfigError,
    SolverNotFoundError,
    SolverFailedError,
    SolutionParseError,
    SolverTimeoutError,
    SolutionMismatchError,
)
from .graph import (
    Graph,
    SpanningTree,
    SplitPartition,
    TrailCounts,
    TreeStats,
    build_graph,
    connected_components,
    is_connected,
    m_metric,
    metric_value,
    metrics_from_trails,
    parse_graph,
    format_graph,
    read_graph,
    write_graph,
    recognize_split,
    recognize_threshold,
    s_metric,
    trail_counts,
    tree_from_pairs,
    tree_stats,
    validate_spanning_tree,
)
from .exact import (
    ExactResult,
    count_spanning_trees,
    enumerate_labeled_trees,
    enumerate_spanning_trees,
    max_leaf,
    solve_exact,
)
from .heuristics import approx_ratio, heuristic1, heuristic2, run_heuristic
from .transforms import apply_switch, local_search, make_switch, total_switch

__version__ = "0.1.0"

__all__ = [
    "SFTreeError",
    "GraphInputError",
    "DisconnectedGraphError",
    "TreeValidationError",
    "PreconditionError",
    "SwitchError",
    "MissingHostEdgeError",
    "RefusedError",
    "SolveTimeout",
    "SolverError",
    "SolverConfigError",
    "SolverNotFoundError",
    "SolverFailedError",
    "SolutionParseError",
    "SolverTimeoutError",
    "SolutionMismatchError",
    "Graph",
    "SpanningTree",
    "SplitPartition",
    "TrailCounts",
    "TreeStats",
    "build_graph",
    "connected_components",
    "is_connected",
    "m_metric",
    "metric_value",
    "metrics_from_trails",
    "parse_graph",
    "format_graph",
    "read_graph",
    "write_graph",
    "recognize_split",
    "recognize_threshold",
    "s_metric",
    "trail_counts",
    "tree_from_pairs",
    "tree_stats",
    "validate_spanning_tree",
    "ExactResult",
    "count_spanning_trees",
    "enumerate_labeled_trees",
    "enumerate_spanning_trees",
    "max_leaf",
    "solve_exact",
    "approx_ratio",
    "heuristic1",
    "heuristic2",
    "run_heuristic",
    "apply_switch",
    "local_search",
    "make_switch",
    "total_switch",
]
