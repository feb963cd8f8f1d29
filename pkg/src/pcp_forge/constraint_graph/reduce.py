"""Degree reduction by expander replacement."""

from __future__ import annotations

from dataclasses import dataclass

from .expander import DEFAULT_DEGREE, EXPANDER_SEED, ExpanderSpec, build_expander
from .graph import ConstraintGraph, Edge, Equality, transpose


@dataclass(frozen=True)
class DegreeReduced:
    """Output of :func:`degree_reduce`.

    Vertex ``(v, s)`` is copy ``s`` of original vertex ``v``; copy ``s`` owns
    the s-th incidence of v (edges in input order, tail before head on a
    self-loop).
    """

    graph: ConstraintGraph
    degree: int
    clouds: dict
    expanders: dict

    def lift(self, pi) -> dict:
        return {(v, s): pi[v] for v, copies in self.clouds.items() for s in range(copies)}

    def project(self, pi1) -> dict:
        """Collapse an assignment of the reduced graph by reading copy 0 of each cloud."""
        return {v: pi1[(v, 0)] for v in self.clouds}


def degree_reduce(G: ConstraintGraph, expander_degree: int = DEFAULT_DEGREE, seed: int = EXPANDER_SEED) -> DegreeReduced:
    """Replace each vertex by a cloud with one copy per incident edge slot.

    Every original edge (u, v) becomes the pair of arcs u_e -> v_e (original
    constraint) and v_e -> u_e (transposed constraint); each cloud is wired by
    equality constraints along a ``expander_degree``-regular expander. The
    result has 2|E| vertices and is (expander_degree + 1)-regular.
    """
    if not G.edges:
        raise ValueError("degree_reduce needs at least one edge")
    slots: dict = {v: 0 for v in G.vertices}
    tail_slot = []
    head_slot = []
    for e in G.edges:
        tail_slot.append(slots[e.u])
        slots[e.u] += 1
        head_slot.append(slots[e.v])
        slots[e.v] += 1
    clouds = {v: c for v, c in slots.items() if c > 0}
    verts = tuple((v, s) for v in G.vertices if v in clouds for s in range(clouds[v]))
    edges = []
    for e, ts, hs in zip(G.edges, tail_slot, head_slot):
        a, b = (e.u, ts), (e.v, hs)
        edges.append(Edge(a, b, e.constraint))
        edges.append(Edge(b, a, transpose(e.constraint)))
    eq = Equality()
    specs: dict[int, ExpanderSpec] = {}
    for v, size in clouds.items():
        X = build_expander(size, seed, expander_degree)
        specs[size] = X.spec
        for a, b in X.directed_edges():
            edges.append(Edge((v, a), (v, b), eq))
    out = ConstraintGraph(verts, G.alphabet_size, tuple(edges))
    return DegreeReduced(out, expander_degree + 1, clouds, specs)
