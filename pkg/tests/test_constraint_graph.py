import json
import math
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcp_forge.constraint_graph.expander import adjacency, build_expander, second_eigenvalue
from pcp_forge.constraint_graph.graph import (
    AcceptAll,
    ConstraintGraph,
    Edge,
    Equality,
    MissingLabel,
    Pairs,
    Projection,
    assignment_from_json,
    assignment_to_json,
    cycle_graph,
    eval_sat,
    fglss_adapter,
    graph_from_json,
    graph_to_json,
    planted_graph,
    random_graph,
    sat_exact,
    sat_lower_bound,
)
from pcp_forge.constraint_graph.matching import (
    NotRegularError,
    decompose_arcs,
    hopcroft_karp,
    matching_decomposition,
)
from pcp_forge.constraint_graph.reduce import degree_reduce
from pcp_forge.debruijn.graph import build_debruijn
from pcp_forge.gf_linear.subspace import BudgetExceeded
from pcp_forge.rng import make_rng

REJECT_ALL = Pairs(frozenset())


def _graph(n, sigma, arcs, c):
    return ConstraintGraph(tuple(range(n)), sigma, tuple(Edge(u, v, c) for u, v in arcs))


# ------------------------------------------------------------------ eval_sat

def test_eval_sat_examples():
    assert eval_sat(_graph(3, 2, [(0, 1), (1, 2)], AcceptAll()), {0: 0, 1: 1, 2: 0}) == 1
    single = _graph(2, 3, [(0, 1)], Equality())
    assert eval_sat(single, {0: 2, 1: 2}) == 1
    assert eval_sat(single, {0: 2, 1: 1}) == 0
    eq_cycle = cycle_graph(3, 2, Equality())
    assert eval_sat(eq_cycle, {0: 0, 1: 0, 2: 1}) == Fraction(1, 3)


def test_missing_label():
    with pytest.raises(MissingLabel):
        eval_sat(cycle_graph(3), {0: 0, 1: 1})


def test_projection_constraint():
    c = Projection((1, 0, 2))
    assert c.accepts(0, 1) and not c.accepts(0, 0) and c.accepts(2, 2)


# ----------------------------------------------------------------- sat_exact

def test_sat_exact_examples():
    G, pi = planted_graph(6, 10, 2, make_rng(3))
    assert sat_exact(G)[0] == 1
    val, wit = sat_exact(cycle_graph(3))
    assert val == Fraction(2, 3)
    assert eval_sat(cycle_graph(3), wit) == val
    assert sat_exact(ConstraintGraph((0, 1), 2, ()))[0] == 1


def test_sat_exact_matches_itertools_oracle():
    import itertools

    rng = make_rng(21)
    for _ in range(10):
        G = random_graph(5, 8, 3, rng)
        best = max(
            eval_sat(G, dict(zip(G.vertices, lab))) for lab in itertools.product(range(3), repeat=5)
        )
        assert sat_exact(G)[0] == best


def test_sat_exact_budget():
    G = cycle_graph(30)
    with pytest.raises(BudgetExceeded):
        sat_exact(G, budget=1000)


def test_sat_lower_bound():
    rng = make_rng(4)
    G, _ = planted_graph(10, 25, 3, rng)
    assert sat_lower_bound(G, make_rng(5))[0] == 1
    for _ in range(10):
        H = random_graph(6, 12, 2, rng)
        lo, wit = sat_lower_bound(H, make_rng(6))
        assert lo <= sat_exact(H)[0]
        assert eval_sat(H, wit) == lo
    assert sat_lower_bound(_graph(3, 2, [(0, 1), (1, 2)], REJECT_ALL), make_rng(7))[0] == 0


# ------------------------------------------------------------------ expanders

def test_expander_n2():
    X = build_expander(2)
    arcs = X.directed_edges()
    outs = [sum(1 for a, _ in arcs if a == v) for v in range(2)]
    assert outs == [X.spec.degree] * 2


def test_expander_n64_spectral_bound():
    X = build_expander(64)
    assert X.spec.lambda2 <= 0.9
    assert X.spec.cheeger_h == pytest.approx((1 - X.spec.lambda2) / 2)
    # numpy eigensolver as the oracle; lambda2 is the signed second eigenvalue
    A = adjacency(64, X.pairs) / X.spec.degree
    ev = np.sort(np.linalg.eigvalsh(A))
    assert ev[-2] == pytest.approx(X.spec.lambda2, abs=1e-6)


def test_expander_regular_and_deterministic():
    a, b = build_expander(30, seed=99), build_expander(30, seed=99)
    assert json.dumps(a.spec.to_json()) == json.dumps(b.spec.to_json()) and a.pairs == b.pairs
    arcs = a.directed_edges()
    for v in range(30):
        assert sum(1 for x, _ in arcs if x == v) == a.spec.degree
        assert sum(1 for _, y in arcs if y == v) == a.spec.degree


def test_second_eigenvalue_cycle():
    n = 10
    pairs = [(i, (i + 1) % n) for i in range(n)]
    assert second_eigenvalue(adjacency(n, pairs), 2) == pytest.approx(math.cos(2 * math.pi / n), abs=1e-6)


# ------------------------------------------------------------------- matchings

def _is_permutation(vertices, arcs, part):
    tails = sorted(arcs[e][0] for e in part)
    heads = sorted(arcs[e][1] for e in part)
    return tails == sorted(vertices) == heads


def test_even_cycle_single_matching():
    arcs = [(i, (i + 1) % 6) for i in range(6)]
    parts = decompose_arcs(range(6), arcs)
    assert len(parts) == 1 and sorted(parts[0]) == list(range(6))


@pytest.mark.parametrize("L,m", [(2, 3), (3, 2), (4, 2)])
def test_debruijn_matchings(L, m):
    db = build_debruijn(L, m)
    words, arcs = db.words(), db.arcs()
    parts = decompose_arcs(words, arcs)
    assert len(parts) == L
    assert sorted(e for p in parts for e in p) == list(range(len(arcs)))
    assert all(_is_permutation(words, arcs, p) for p in parts)


def test_two_permutations_recovered():
    rng = make_rng(8)
    n = 12
    p1, p2 = rng.permutation(n).tolist(), rng.permutation(n).tolist()
    arcs = [(i, p1[i]) for i in range(n)] + [(i, p2[i]) for i in range(n)]
    G = ConstraintGraph(tuple(range(n)), 2, tuple(Edge(u, v, AcceptAll()) for u, v in arcs))
    parts = matching_decomposition(G)
    assert len(parts) == 2 and all(_is_permutation(range(n), arcs, p) for p in parts)


def test_not_regular_names_vertex():
    with pytest.raises(NotRegularError, match="vertex 2"):
        decompose_arcs([0, 1, 2], [(0, 1), (1, 0), (2, 2), (2, 2)])


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.integers(1, 8), st.lists(st.tuples(st.integers(0, 7), st.integers(0, 7)), max_size=30))
def test_hopcroft_karp_size_matches_networkx(nl, nr, pairs):
    pairs = [(a % nl, b % nr) for a, b in pairs]
    adj = [[] for _ in range(nl)]
    for eid, (a, b) in enumerate(pairs):
        adj[a].append((eid, b))
    pair_u, edge_u = hopcroft_karp(nl, nr, adj)
    matched = [(u, pair_u[u]) for u in range(nl) if pair_u[u] != -1]
    assert len({v for _, v in matched}) == len(matched)
    assert all(pairs[edge_u[u]] == (u, v) for u, v in matched)
    B = nx.Graph()
    B.add_nodes_from((("L", i) for i in range(nl)))
    B.add_nodes_from((("R", j) for j in range(nr)))
    B.add_edges_from((("L", a), ("R", b)) for a, b in pairs)
    ref = nx.bipartite.hopcroft_karp_matching(B, top_nodes=[("L", i) for i in range(nl)])
    assert len(matched) == len(ref) // 2


# ------------------------------------------------------------ degree reduction

def test_degree_reduce_planted_completeness():
    rng = make_rng(12)
    for _ in range(50):
        G, pi = planted_graph(int(rng.integers(3, 9)), int(rng.integers(2, 14)), 3, rng)
        red = degree_reduce(G)
        Gp = red.graph
        assert len(Gp.vertices) == 2 * len(G.edges)
        assert Gp.regular_degree() == red.degree
        assert eval_sat(Gp, red.lift(pi)) == 1


def test_degree_reduce_keeps_unsat_nonzero():
    red = degree_reduce(cycle_graph(3), expander_degree=2)
    assert len(red.graph.vertices) == 6
    assert sat_exact(red.graph)[0] < 1


# ----------------------------------------------------------------------- FGLSS

def test_fglss_adapter():
    rng = make_rng(13)
    G, pi = planted_graph(7, 20, 3, rng)
    V = fglss_adapter(G)
    assert V.acceptance_probability(pi) == 1
    assert V.randomness_complexity == math.ceil(math.log2(20))
    for _ in range(20):
        lab = dict(zip(G.vertices, rng.integers(0, 3, size=7).tolist()))
        assert V.acceptance_probability(lab) == eval_sat(G, lab)


# ----------------------------------------------------------------------- JSON

def test_json_roundtrip():
    rng = make_rng(14)
    G, pi = planted_graph(6, 9, 3, rng)
    H = ConstraintGraph(
        G.vertices, 3, G.edges + (Edge(0, 1, Projection((2, 1, 0))), Edge(1, 1, Equality()), Edge(2, 3, AcceptAll()))
    )
    back = graph_from_json(json.loads(json.dumps(graph_to_json(H))))
    assert back.vertices == H.vertices and back.alphabet_size == 3
    for lab in (pi, {v: 0 for v in H.vertices}):
        assert eval_sat(back, lab) == eval_sat(H, lab)
    assert assignment_from_json(json.loads(json.dumps(assignment_to_json(pi)))) == pi
