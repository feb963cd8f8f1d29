"""de Bruijn shift graphs and the linear-structure predicate."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..gf_linear.field import FieldError, get_field
from ..gf_linear.subspace import Subspace, check_budget


@dataclass(frozen=True)
class DeBruijnGraph:
    """Words of length m over {0..Lambda_size-1}; w -> w[1:] + (beta,)."""

    Lambda_size: int
    m: int

    def __post_init__(self):
        if self.Lambda_size < 2 or self.m < 1:
            raise ValueError("need Lambda_size >= 2 and m >= 1")

    @property
    def n_vertices(self) -> int:
        return self.Lambda_size**self.m

    @property
    def n_edges(self) -> int:
        return self.Lambda_size ** (self.m + 1)

    def words(self, budget: int | None = None):
        check_budget("de Bruijn vertices", self.n_vertices, budget)
        return list(itertools.product(range(self.Lambda_size), repeat=self.m))

    def successors(self, w) -> list[tuple]:
        return [tuple(w[1:]) + (b,) for b in range(self.Lambda_size)]

    def predecessors(self, w) -> list[tuple]:
        return [(b,) + tuple(w[:-1]) for b in range(self.Lambda_size)]

    def arcs(self, budget: int | None = None) -> list[tuple[tuple, tuple]]:
        """Every arc (w, shift(w, beta)) with w lexicographic, then beta."""
        check_budget("de Bruijn edges", self.n_edges, budget)
        return [(w, s) for w in self.words() for s in self.successors(w)]

    def adjacent(self, x, y) -> bool:
        return tuple(x[1:]) == tuple(y[:-1]) or tuple(y[1:]) == tuple(x[:-1])


def build_debruijn(Lambda_size: int, m: int) -> DeBruijnGraph:
    return DeBruijnGraph(Lambda_size, m)


class LinearStructureError(ValueError):
    pass


@dataclass(frozen=True)
class LinearStructureReport:
    is_linear: bool
    edge_space: Subspace
    distinct_edges: int
    has_zero_edge: bool
    closed: bool
    left_full: bool
    right_full: bool
    parallel_edges: bool

    def certificate(self) -> dict:
        return {
            "is_linear": self.is_linear,
            "edge_space": self.edge_space.to_json(),
            "dim": self.edge_space.dim,
            "distinct_edges": self.distinct_edges,
            "has_zero_edge": self.has_zero_edge,
            "closed": self.closed,
            "left_full": self.left_full,
            "right_full": self.right_full,
            "parallel_edges": self.parallel_edges,
        }


def _arc_list(G):
    if hasattr(G, "edges") and hasattr(G, "vertices"):
        return list(G.vertices), [(e.u, e.v) for e in G.edges]
    vertices, arcs = G
    return list(vertices), list(arcs)


def check_linear_structure(G, q: int, m: int) -> LinearStructureReport:
    """Decide whether the edges form a subspace of F_q^{2m} with full side projections.

    ``G`` is a ConstraintGraph (or a ``(vertices, arcs)`` pair) whose vertices
    are the q^m tuples of F_q^m.
    """
    try:
        get_field(q)
    except FieldError as exc:
        raise LinearStructureError(str(exc)) from None
    vertices, arcs = _arc_list(G)
    ok_vertex = all(isinstance(v, tuple) and len(v) == m and all(0 <= x < q for x in v) for v in vertices)
    if not ok_vertex or len(set(vertices)) != q**m or len(vertices) != q**m:
        raise LinearStructureError(f"vertex set is not F_{q}^{m}: {len(vertices)} vertices")
    edges = {tuple(u) + tuple(v) for u, v in arcs}
    S = Subspace.span(edges, 2 * m, q)
    has_zero = (0,) * (2 * m) in edges
    closed = len(edges) == q**S.dim
    left = Subspace.span([row[:m] for row in S.basis], m, q)
    right = Subspace.span([row[m:] for row in S.basis], m, q)
    lf, rf = left.dim == m, right.dim == m
    return LinearStructureReport(
        is_linear=has_zero and closed and lf and rf,
        edge_space=S,
        distinct_edges=len(edges),
        has_zero_edge=has_zero,
        closed=closed,
        left_full=lf,
        right_full=rf,
        parallel_edges=len(edges) != len(arcs),
    )
