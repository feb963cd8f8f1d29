"""Transformations of decoding graphs, each returning the graph and an honest lifter.

A ``Stage`` pairs an output graph with ``lift``, which maps an honest
assignment of the previous stage to the corresponding honest assignment of
this one (for the first stage the input is the decoder's proof string).
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from ..constraint_graph.expander import EXPANDER_SEED, build_expander
from ..debruijn.embedding import CapacityError, RoutedConstraint, plan_routing
from ..gf_linear.subspace import LIMITS, BudgetExceeded
from .graph import DecodingGraph, DecodingGraphError, DEdge, PsiConstraint, VertexPsi, smoothness
from .pcpp import PCPDecoder

DEFAULT_EXPANDER_DEGREE = 2


@dataclass
class Stage:
    name: str
    graph: DecodingGraph
    lift: Callable
    params: dict = field(default_factory=dict)


# ------------------------------------------------------------- small ψ parts

class _PositionEq:
    __slots__ = ("j1", "j2")

    def __init__(self, j1, j2):
        self.j1, self.j2 = j1, j2

    def __call__(self, a, b):
        return a[self.j1] == b[self.j2]


def _equal(a, b):
    return a == b


class _DecoderAt:
    """ψ_{(k, ω)} of a decoder, as a function of the full answer tuple."""

    __slots__ = ("D", "k", "omega")

    def __init__(self, D, k, omega):
        self.D, self.k, self.omega = D, k, omega

    def __call__(self, a):
        return self.D.decode(self.omega, self.k, a)


class _FirstSlot:
    __slots__ = ("f",)

    def __init__(self, f):
        self.f = f

    def __call__(self, a):
        return self.f(a[0][0])


# ------------------------------------------------------- decoder -> graph

def udpcp_to_vertex_decoding_graph(
    D: PCPDecoder,
    expander_degree: int = DEFAULT_EXPANDER_DEGREE,
    seed: int = EXPANDER_SEED,
    budget: int | None = None,
) -> Stage:
    """One vertex per invocation (k, ω), labelled by its answer tuple.

    For each proof position i, the invocations that query i (with
    multiplicity) are joined along an expander; an edge rejects when the two
    answers for position i differ and otherwise decodes with the tail's ψ.
    """
    b = LIMITS.enum_budget if budget is None else budget
    n_v = D.t * D.R
    if n_v * D.q > b:
        raise BudgetExceeded("udpcp_to_vertex_decoding_graph", n_v * D.q, b)
    verts = [(k, w) for k in range(D.t) for w in range(D.R)]
    queries = {v: tuple(D.queries(v[1], v[0])) for v in verts}
    members = defaultdict(list)
    for v in verts:
        for j, i in enumerate(queries[v]):
            members[i].append((v, j))
    decoders = {v: _DecoderAt(D, v[0], v[1]) for v in verts}
    edges = []
    for i in sorted(members):
        C = members[i]
        X = build_expander(len(C), seed, expander_degree)
        for a, bb in X.directed_edges():
            (v1, j1), (v2, j2) = C[a], C[bb]
            edges.append(DEdge(v1, v2, v1[0], VertexPsi(_PositionEq(j1, j2), decoders[v1])))
    G = DecodingGraph(tuple(verts), D.t, tuple(edges), 2**D.q, vertex_decoding=True)

    def lift(proof):
        return {v: tuple(proof[i] for i in queries[v]) for v in verts}

    params = {
        "vertices": n_v,
        "expected_vertices": D.t * D.R,
        "regular_degree": D.q * expander_degree,
        "positions": len(members),
        "expander_degree": expander_degree,
    }
    return Stage("vertex_decoding_graph", G, lift, params)


# ------------------------------------------------------ degree reduction

def two_query_decoder(G: DecodingGraph) -> tuple[PCPDecoder, dict]:
    """The 2-query decoder "pick a uniform edge of E_k, query both endpoints".

    Randomness ranges over R = max_k |E_k|; ω selects edge ω mod |E_k|. The
    proof is the vertex labelling in the order of ``G.vertices``.
    """
    by_k = G.edges_by_index
    if any(not x for x in by_k):
        raise DecodingGraphError("some index has no edges")
    R = max(len(x) for x in by_k)
    pos = {v: n for n, v in enumerate(G.vertices)}
    edges = G.edges

    def edge_of(omega, k):
        lst = by_k[k]
        return edges[lst[omega % len(lst)]]

    def queries(omega, k):
        e = edge_of(omega, k)
        return (pos[e.u], pos[e.v])

    def decode(omega, k, ans):
        return edge_of(omega, k).psi(ans[0], ans[1])

    D = PCPDecoder(G.t, 0, R, 2, len(G.vertices), Fraction(0), queries, decode)
    return D, pos


def degree_reduce_decoding(
    G: DecodingGraph, expander_degree: int = DEFAULT_EXPANDER_DEGREE, seed: int = EXPANDER_SEED
) -> Stage:
    """A 2·d0-regular vertex-decoding graph with smoothness 1 and alphabet Σ²."""
    D, pos = two_query_decoder(G)
    inner = udpcp_to_vertex_decoding_graph(D, expander_degree, seed)
    order = list(G.vertices)

    def lift(pi):
        return inner.lift([pi[v] for v in order])

    gamma = smoothness(G)
    params = {
        "vertices": len(inner.graph.vertices),
        "vertex_bound": Fraction(len(G.edges)) / gamma,
        "regular_degree": 2 * expander_degree,
        "size_bound": 2 * expander_degree * Fraction(len(G.edges)) / gamma,
        "R": D.R,
    }
    return Stage("degree_reduced", inner.graph, lift, params)


# ----------------------------------------------------------------- padding

def pad_vertices(
    G: DecodingGraph,
    ell_prime: int,
    expander_degree: int = DEFAULT_EXPANDER_DEGREE,
    seed: int = EXPANDER_SEED,
) -> Stage:
    """Copy each vertex c or c+1 times to reach exactly ``ell_prime`` vertices.

    G-edges are repeated d0 times between same-numbered copies; the extra
    copies (set T, the first ell_prime mod ell vertices) get d0 trivial
    self-loops per outgoing edge; each outgoing edge of u also places an
    expander of equality checks on u's copies.
    """
    if not G.vertex_decoding:
        raise DecodingGraphError("pad_vertices needs a vertex-decoding graph")
    ell = len(G.vertices)
    if ell_prime < ell:
        raise DecodingGraphError(f"ell' = {ell_prime} < ell = {ell}")
    c, z = divmod(ell_prime, ell)
    T = set(G.vertices[:z])
    d0 = expander_degree
    copies = {v: [(v, l) for l in range(c + (1 if v in T else 0))] for v in G.vertices}
    verts = tuple(w for v in G.vertices for w in copies[v])
    edges = []
    for e in G.edges:
        for l in range(c):
            edges.extend(DEdge((e.u, l), (e.v, l), e.k, e.psi) for _ in range(d0))
    for e in G.edges:
        if e.u in T:
            loop = VertexPsi(None, e.psi.f)
            edges.extend(DEdge((e.u, c), (e.u, c), e.k, loop) for _ in range(d0))
    for e in G.edges:
        C = copies[e.u]
        X = build_expander(len(C), seed, d0)
        eq = VertexPsi(_equal, e.psi.f)
        for a, b in X.directed_edges():
            edges.append(DEdge(C[a], C[b], e.k, eq))
    out = DecodingGraph(verts, G.t, tuple(edges), G.alphabet_size, vertex_decoding=True)

    def lift(pi):
        return {w: pi[w[0]] for w in verts}

    degs = set(G.out_degrees().values())
    params = {
        "vertices": len(verts),
        "ell_prime": ell_prime,
        "c": c,
        "z": z,
        "size_bound": 2 * (c + 1) * d0 * len(G.edges),
        "degree_bound": 2 * d0 * max(degs),
        "smoothness_bound": smoothness(G) / 2,
    }
    return Stage("padded", out, lift, params)


# ---------------------------------------------------------- de Bruijn embed

def minimal_m(G: DecodingGraph, Lambda_size: int, expander_degree: int = DEFAULT_EXPANDER_DEGREE) -> int:
    """Smallest m with |Λ|^m >= 2·d0·n/γ."""
    need = 2 * expander_degree * Fraction(len(G.edges)) / smoothness(G)
    m = 1
    while Lambda_size**m < need:
        m += 1
    return m


def embed_decoding(
    G: DecodingGraph,
    Lambda_size: int,
    m: int,
    expander_degree: int = DEFAULT_EXPANDER_DEGREE,
    seed: int = EXPANDER_SEED,
) -> tuple[Stage, list[Stage]]:
    """Degree-reduce, pad to |Λ|^m vertices, then route onto DB(Λ, m).

    Returns the final stage and the two intermediate stages; each stage lifts
    from the one before it (see ``lift_through``). The |Λ| out-arcs
    of a word are assigned round-robin to the d out-edges of its G1 vertex;
    the arc decodes f_{e1} of slot (0, 0) of the tail label whenever the
    routing checks accept.
    """
    d0 = expander_degree
    gamma = smoothness(G)
    n = len(G.edges)
    if Lambda_size < 4 * d0 * d0:
        raise CapacityError(f"|Λ| = {Lambda_size} < 4·d0² = {4 * d0 * d0}")
    if Lambda_size**m < 2 * d0 * Fraction(n) / gamma:
        raise CapacityError(f"|Λ|^m = {Lambda_size ** m} < 2·d0·n/γ = {float(2 * d0 * n / gamma):.6g}")
    reduced = degree_reduce_decoding(G, d0, seed)
    padded = pad_vertices(reduced.graph, Lambda_size**m, d0, seed)
    G1 = padded.graph
    d = G1.regular_degree()
    if d is None or d != 4 * d0 * d0:
        raise DecodingGraphError(f"G1 is not {4 * d0 * d0}-regular")
    arcs = [(e.u, e.v) for e in G1.edges]
    plan = plan_routing(G1.vertices, arcs, Lambda_size, m)
    last = 2 * m
    cons_of = [PsiConstraint(e.psi) for e in G1.edges]
    edges = []
    assoc = defaultdict(int)
    for x, y in plan.db_arcs():
        srcs = [(i, cons_of[eid]) for i, eid in plan.arc_sources[(x, y)]]
        rc = RoutedConstraint(srcs, plan.arc_links[(x, y)], last)
        row = y[-1] % d
        e1 = G1.edges[plan.out_arc[row][x]]
        assoc[(x, row)] += 1
        edges.append(DEdge(x, y, e1.k, VertexPsi(rc.accepts, _FirstSlot(e1.psi.f))))
    counts = set(assoc.values())
    lo, hi = Lambda_size // d, -(-Lambda_size // d)
    if not counts <= {lo, hi}:
        raise DecodingGraphError("unbalanced arc association")
    out = DecodingGraph(tuple(plan.words), G.t, tuple(edges), None, vertex_decoding=True)
    out.meta = {"debruijn": {"alphabet_size": Lambda_size, "m": m, "d": d, "l": plan.slots}}

    def lift(pi1):
        return plan.lift(pi1, None)

    params = {
        "size": len(edges),
        "expected_size": Lambda_size ** (m + 1),
        "smoothness_bound": Fraction(1, 2 * Lambda_size),
        "d": d,
        "slots": plan.slots,
        "association_counts": sorted(counts),
    }
    return Stage("debruijn_embedded", out, lift, params), [reduced, padded]


def lift_through(stages, assignment):
    for st in stages:
        assignment = st.lift(assignment)
    return assignment
