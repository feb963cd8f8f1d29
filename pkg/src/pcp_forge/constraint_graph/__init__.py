"""Constraint graphs, expanders, matchings and degree reduction."""

from .expander import Expander, ExpanderRetryError, ExpanderSpec, build_expander, second_eigenvalue
from .graph import (
    AcceptAll,
    Constraint,
    ConstraintGraph,
    Edge,
    Equality,
    LocalSearch,
    MissingLabel,
    Pairs,
    Projection,
    Transposed,
    TwoQueryVerifier,
    assignment_from_json,
    assignment_to_json,
    constraint_from_json,
    cycle_graph,
    eval_sat,
    fglss_adapter,
    graph_from_json,
    graph_to_json,
    inequality,
    planted_graph,
    random_graph,
    sat_exact,
    sat_lower_bound,
    satisfied_count,
    transpose,
    violated_edges,
)
from .matching import NotRegularError, decompose_arcs, hopcroft_karp, matching_decomposition
from .reduce import DegreeReduced, degree_reduce

__all__ = [name for name in dir() if not name.startswith("_")]
