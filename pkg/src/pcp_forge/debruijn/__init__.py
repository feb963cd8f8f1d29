"""de Bruijn graphs, permutation routing and constraint-graph embedding."""

from .embedding import (
    CapacityError,
    Embedding,
    RoutedConstraint,
    RoutingPlan,
    embed,
    embedding_satisfiable,
    plan_routing,
    routed_satisfiable,
)
from .graph import (
    DeBruijnGraph,
    LinearStructureError,
    LinearStructureReport,
    build_debruijn,
    check_linear_structure,
)
from .routing import RoutingError, RoutingPaths, route, route_permutation, verify_routing

__all__ = [name for name in dir() if not name.startswith("_")]
