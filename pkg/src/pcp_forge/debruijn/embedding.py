"""Embedding a constraint graph onto a de Bruijn graph by permutation routing.

Labels of the embedded graph are ``d`` rows (one per perfect matching of the
degree-reduced graph G1) of ``2m + 1`` slots (one per path position). Slot
``(i, j)`` of word w carries the G1 label of the source of the path of
matching i whose j-th vertex is w.

An arc x -> y of the de Bruijn graph checks:

1. at x, for every matching i: ``(x[i][2m], x[i][0])`` satisfies the G1 edge
   ending at x in matching i;
2. slot 0 agrees across all rows, at x and at y;
3. every path step carried by the arc copies slot j of one endpoint into
   slot j + 1 of the other.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..constraint_graph.graph import (
    CONSTRAINT_DECODERS,
    Constraint,
    ConstraintGraph,
    Edge,
    constraint_from_json,
)
from ..constraint_graph.matching import decompose_arcs
from ..constraint_graph.reduce import DegreeReduced, degree_reduce
from .routing import route_permutation


class CapacityError(ValueError):
    pass


class RoutedConstraint(Constraint):
    """The conjunction of routing checks attached to one de Bruijn arc."""

    kind = "debruijn_route"
    __slots__ = ("sources", "links", "last")

    def __init__(self, sources, links, last: int):
        self.sources = tuple(sources)  # (row i, constraint of the G1 edge into the tail)
        self.links = tuple(links)  # (row i, position j, forward?)
        self.last = last

    def __eq__(self, other):
        return (
            isinstance(other, RoutedConstraint)
            and (self.sources, self.links, self.last) == (other.sources, other.links, other.last)
        )

    def __hash__(self):
        return hash((self.sources, self.links, self.last))

    def source_ok(self, a) -> bool:
        last = self.last
        for i, c in self.sources:
            row = a[i]
            if not c.accepts(row[last], row[0]):
                return False
        return True

    def routing_ok(self, a, b) -> bool:
        a0 = a[0][0]
        for row in a:
            if row[0] != a0:
                return False
        b0 = b[0][0]
        for row in b:
            if row[0] != b0:
                return False
        for i, j, fwd in self.links:
            if fwd:
                if a[i][j] != b[i][j + 1]:
                    return False
            elif a[i][j + 1] != b[i][j]:
                return False
        return True

    def accepts(self, a, b) -> bool:
        return self.source_ok(a) and self.routing_ok(a, b)

    def to_json(self) -> dict:
        return {
            "type": "debruijn_route",
            "data": {
                "last": self.last,
                "sources": [[i, c.to_json()] for i, c in self.sources],
                "links": [[i, j, bool(f)] for i, j, f in self.links],
            },
        }


def _routed_from_json(data) -> RoutedConstraint:
    return RoutedConstraint(
        [(i, constraint_from_json(c)) for i, c in data["sources"]],
        [(i, j, f) for i, j, f in data["links"]],
        data["last"],
    )


CONSTRAINT_DECODERS["debruijn_route"] = _routed_from_json


@dataclass
class RoutingPlan:
    """G1 placed on Λ^m, its matchings, their routings and the per-arc checks."""

    Lambda_size: int
    m: int
    words: list
    word_of: dict  # G1 vertex -> word
    vertex_at: dict  # word -> G1 vertex
    matchings: list  # per row i: list of G1 arc indices
    perms: list  # per row i: word -> word
    in_arc: list  # per row i: word -> G1 arc index ending there
    out_arc: list  # per row i: word -> G1 arc index leaving there
    routings: list = field(default_factory=list)
    arc_sources: dict = field(default_factory=dict)  # (x, y) -> [(i, G1 arc index)]
    arc_links: dict = field(default_factory=dict)  # (x, y) -> [(i, j, fwd)]

    @property
    def d(self) -> int:
        return len(self.matchings)

    @property
    def slots(self) -> int:
        return 2 * self.m + 1

    def db_arcs(self):
        L = self.Lambda_size
        for x in self.words:
            for b in range(L):
                yield x, x[1:] + (b,)

    def lift(self, pi1: dict, default) -> dict:
        """Label every word from a G1 assignment (words outside G1 read ``default``)."""
        val = {w: (pi1[self.vertex_at[w]] if w in self.vertex_at else default) for w in self.words}
        out = {}
        for w in self.words:
            out[w] = tuple(
                tuple(val[R.positions[j][w]] for j in range(self.slots)) for R in self.routings
            )
        return out


def plan_routing(g1_vertices, g1_arcs, Lambda_size: int, m: int) -> RoutingPlan:
    words = list(itertools.product(range(Lambda_size), repeat=m))
    g1_vertices = list(g1_vertices)
    if len(g1_vertices) > len(words):
        raise CapacityError(f"{len(g1_vertices)} vertices do not fit on {len(words)} de Bruijn words")
    word_of = {v: words[k] for k, v in enumerate(g1_vertices)}
    vertex_at = {w: v for v, w in word_of.items()}
    matchings = decompose_arcs(g1_vertices, g1_arcs)
    perms, in_arc, out_arc = [], [], []
    for mt in matchings:
        perm = {w: w for w in words}
        ins, outs = {}, {}
        for eid in mt:
            u, v = g1_arcs[eid]
            perm[word_of[u]] = word_of[v]
            ins[word_of[v]] = eid
            outs[word_of[u]] = eid
        perms.append(perm)
        in_arc.append(ins)
        out_arc.append(outs)
    plan = RoutingPlan(Lambda_size, m, words, word_of, vertex_at, matchings, perms, in_arc, out_arc)
    plan.routings = [route_permutation(p, Lambda_size, m) for p in perms]
    sources: dict = {}
    links: dict = {}
    for x in words:
        if x in vertex_at:
            srcs = [(i, in_arc[i][x]) for i in range(len(matchings))]
        else:
            srcs = []
        for b in range(Lambda_size):
            sources[(x, x[1:] + (b,))] = srcs
            links[(x, x[1:] + (b,))] = set()
    for i, R in enumerate(plan.routings):
        for p in R.paths.values():
            for j in range(len(p) - 1):
                x, y = p[j], p[j + 1]
                if x[1:] == y[:-1]:
                    links[(x, y)].add((i, j, True))
                else:
                    links[(y, x)].add((i, j, False))
    plan.arc_sources = sources
    plan.arc_links = {k: sorted(v) for k, v in links.items()}
    return plan


@dataclass
class Embedding:
    graph: ConstraintGraph
    plan: RoutingPlan
    reduced: DegreeReduced
    default: int = 0

    def lift(self, pi) -> dict:
        return self.plan.lift(self.reduced.lift(pi), self.default)

    def lift_g1(self, pi1) -> dict:
        return self.plan.lift(pi1, self.default)

    @property
    def label_shape(self) -> tuple[int, int]:
        return self.plan.d, self.plan.slots


def embed(G: ConstraintGraph, Lambda_size: int, m: int, expander_degree: int = 8) -> Embedding:
    """Embed G onto DB(Λ, m); the result has |Λ|^(m+1) edges."""
    needed = 2 * len(G.edges)
    if Lambda_size**m < needed:
        raise CapacityError(f"|Λ|^m = {Lambda_size ** m} < 2|E| = {needed}")
    red = degree_reduce(G, expander_degree)
    G1 = red.graph
    arcs = [(e.u, e.v) for e in G1.edges]
    plan = plan_routing(G1.vertices, arcs, Lambda_size, m)
    last = 2 * m
    edges = []
    for x, y in plan.db_arcs():
        srcs = [(i, G1.edges[eid].constraint) for i, eid in plan.arc_sources[(x, y)]]
        edges.append(Edge(x, y, RoutedConstraint(srcs, plan.arc_links[(x, y)], last)))
    d = plan.d
    meta = (
        ("debruijn", {"alphabet_size": Lambda_size, "m": m, "d": d, "l": plan.slots}),
        ("base_alphabet_size", G.alphabet_size),
    )
    Gp = ConstraintGraph(tuple(plan.words), G.alphabet_size ** (plan.slots * d), tuple(edges), meta)
    return Embedding(Gp, plan, red)


# ------------------------------------------------------- exact satisfiability

class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        p = self.parent
        root = x
        while p.get(root, root) != root:
            root = p[root]
        while p.get(x, x) != root:
            p[x], x = root, p[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def routed_satisfiable(Gp: ConstraintGraph, symbols, shape: tuple[int, int]) -> tuple[bool, dict | None]:
    """Decide whether some labelling satisfies every arc of a routed graph.

    Equalities (slot-0 agreement and path links) are merged with union-find;
    the remaining source checks form a small binary CSP over the merged
    classes, solved by backtracking. Returns a witness labelling if one exists.
    """
    rows, slots = shape
    uf = _UnionFind()
    binary = []
    for e in Gp.edges:
        c = e.constraint
        if not isinstance(c, RoutedConstraint):
            raise TypeError("routed_satisfiable needs RoutedConstraint edges")
        for w in (e.u, e.v):
            for i in range(1, rows):
                uf.union((w, 0, 0), (w, i, 0))
        for i, j, fwd in c.links:
            if fwd:
                uf.union((e.u, i, j), (e.v, i, j + 1))
            else:
                uf.union((e.u, i, j + 1), (e.v, i, j))
        for i, inner in c.sources:
            binary.append(((e.u, i, c.last), (e.u, i, 0), inner))
    cons = [(uf.find(a), uf.find(b), inner.accepts) for a, b, inner in binary]
    symbols = list(symbols)
    by_var: dict = {}
    for k, (a, b, _) in enumerate(cons):
        by_var.setdefault(a, []).append(k)
        by_var.setdefault(b, []).append(k)
    order = sorted(by_var, key=lambda v: -len(by_var[v]))
    value: dict = {}

    def consistent(var) -> bool:
        for k in by_var[var]:
            a, b, acc = cons[k]
            if a in value and b in value and not acc(value[a], value[b]):
                return False
        return True

    def search(pos) -> bool:
        if pos == len(order):
            return True
        var = order[pos]
        for s in symbols:
            value[var] = s
            if consistent(var) and search(pos + 1):
                return True
        del value[var]
        return False

    if not search(0):
        return False, None
    default = symbols[0]
    witness = {}
    for w in Gp.vertices:
        witness[w] = tuple(
            tuple(value.get(uf.find((w, i, j)), default) for j in range(slots)) for i in range(rows)
        )
    return True, witness


def embedding_satisfiable(emb: Embedding) -> tuple[bool, dict | None]:
    return routed_satisfiable(emb.graph, range(emb.reduced.graph.alphabet_size), emb.label_shape)


__all__ = [
    "CapacityError",
    "Embedding",
    "RoutedConstraint",
    "RoutingPlan",
    "embed",
    "embedding_satisfiable",
    "plan_routing",
    "routed_satisfiable",
]
