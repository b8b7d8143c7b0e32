"""Signed containment analysis and control-edge placement for signed digraphs."""

from .condense import (
    Analysis,
    Condensation,
    SccClass,
    analyze,
    associate,
    classic_condensation,
    classify_scc,
    condense,
    enlarged_condensation,
    reach,
    scc,
    signed_condensation,
)
from .generator import GeneratorSpec, generate, reference_spec
from .graph import SignedGraph, build_adjacency, enlarged_graph, parse_graph, read_graph
from .placement import export_ilp, follower_reduction, guaranteed_set, solve_placement
from .simulate import empirical_contained, realize_control, run
from .steady import contained_set, left_perron, root_limits, steady_state, steady_state_all

__version__ = "0.1.0"

__all__ = [
    "Analysis", "Condensation", "SccClass", "analyze", "associate", "classic_condensation",
    "classify_scc", "condense", "enlarged_condensation", "reach", "scc", "signed_condensation",
    "GeneratorSpec", "generate", "reference_spec",
    "SignedGraph", "build_adjacency", "enlarged_graph", "parse_graph", "read_graph",
    "export_ilp", "follower_reduction", "guaranteed_set", "solve_placement",
    "empirical_contained", "realize_control", "run",
    "contained_set", "left_perron", "root_limits", "steady_state", "steady_state_all",
]
