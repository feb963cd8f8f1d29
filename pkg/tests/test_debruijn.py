import itertools

import pytest

from pcp_forge.constraint_graph.graph import ConstraintGraph, Edge, Pairs, cycle_graph, eval_sat, planted_graph
from pcp_forge.debruijn.embedding import CapacityError, embed, embedding_satisfiable
from pcp_forge.debruijn.graph import LinearStructureError, build_debruijn, check_linear_structure
from pcp_forge.debruijn.routing import RoutingError, RoutingPaths, route, route_permutation, verify_routing
from pcp_forge.rng import make_rng


def test_successors_example():
    db = build_debruijn(2, 2)
    assert set(db.successors((0, 0))) == {(0, 0), (0, 1)}


@pytest.mark.parametrize("L,m", [(2, 1), (2, 4), (3, 3), (5, 2)])
def test_counts_and_degrees(L, m):
    db = build_debruijn(L, m)
    arcs = db.arcs()
    assert len(arcs) == L ** (m + 1) == db.n_edges
    indeg = {w: 0 for w in db.words()}
    for _, v in arcs:
        indeg[v] += 1
    assert set(indeg.values()) == {L}
    assert all(db.adjacent(u, v) for u, v in arcs)


def test_bad_parameters():
    with pytest.raises(ValueError):
        build_debruijn(1, 2)


# ------------------------------------------------------------ linear structure

@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_debruijn_is_linear(m):
    db = build_debruijn(2, m)
    rep = check_linear_structure((db.words(), db.arcs()), 2, m)
    assert rep.is_linear and rep.edge_space.dim == m + 1


def test_debruijn_over_f3_and_f4_is_linear():
    for q in (3, 4):
        db = build_debruijn(q, 2)
        assert check_linear_structure((db.words(), db.arcs()), q, 2).is_linear


def test_single_nonzero_edge_is_not_linear():
    rep = check_linear_structure(([(0,), (1,)], [((0,), (1,))]), 2, 1)
    assert not rep.is_linear and not rep.has_zero_edge


def test_complete_edge_set_is_linear():
    words = list(itertools.product(range(2), repeat=2))
    arcs = [(u, v) for u in words for v in words]
    assert check_linear_structure((words, arcs), 2, 2).is_linear


def test_three_cycle_rejected():
    with pytest.raises(LinearStructureError):
        check_linear_structure(cycle_graph(3), 2, 2)


# ------------------------------------------------------------------- routing

def _random_perm(L, m, rng):
    words = list(itertools.product(range(L), repeat=m))
    p = rng.permutation(len(words))
    return {w: words[int(p[i])] for i, w in enumerate(words)}


def _independent_check(R: RoutingPaths, M, L, m):
    db = build_debruijn(L, m)
    words = db.words()
    for s, p in R.paths.items():
        assert len(p) == 2 * m + 1 and p[0] == s and p[-1] == M[s]
        assert all(db.adjacent(a, b) for a, b in zip(p, p[1:]))
    for j in range(2 * m + 1):
        assert sorted(p[j] for p in R.paths.values()) == sorted(words)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_identity_routing(m):
    M = {w: w for w in itertools.product(range(2), repeat=m)}
    R = route_permutation(M, 2, m)
    assert verify_routing(R, M) == []
    _independent_check(R, M, 2, m)


def test_fifty_permutations_over_three_letters():
    rng = make_rng(31)
    for _ in range(50):
        M = _random_perm(3, 3, rng)
        R = route_permutation(M, 3, 3)
        assert verify_routing(R, M) == []
        _independent_check(R, M, 3, 3)


def test_partial_route_zero_steps():
    R = route({(): ()}, 2, 3, 0)
    assert R.steps == 0
    assert all(p == (s,) for s, p in R.paths.items())


def test_partial_route_suffix_permutation():
    mu = {(0,): (1,), (1,): (0,)}
    R = route(mu, 2, 3, 1)
    assert R.steps == 2
    M = {w: w[:2] + mu[w[2:]] for w in itertools.product(range(2), repeat=3)}
    assert verify_routing(R, M) == []


def test_non_bijection_rejected():
    words = list(itertools.product(range(2), repeat=2))
    M = {w: words[0] for w in words}
    with pytest.raises(RoutingError):
        route_permutation(M, 2, 2)


def test_verify_routing_catches_tampering():
    rng = make_rng(2)
    M = _random_perm(2, 3, rng)
    R = route_permutation(M, 2, 3)
    s = next(iter(R.paths))
    paths = dict(R.paths)
    paths[s] = paths[s][:-1] + (paths[s][0],)
    bad = RoutingPaths(R.Lambda_size, R.m, R.steps, paths)
    assert verify_routing(bad, M)


def test_routing_json_shape():
    M = {w: w for w in itertools.product(range(2), repeat=2)}
    js = route_permutation(M, 2, 2).to_json()
    assert len(js) == 4 and all(len(p) == 5 for p in js)


# ------------------------------------------------------------------ embedding

def test_embed_planted_eight_vertices():
    G, pi = planted_graph(8, 10, 2, make_rng(40))
    emb = embed(G, 2, 5)
    assert len(emb.graph.edges) == 2**6
    assert eval_sat(emb.graph, emb.lift(pi)) == 1
    d, slots = emb.label_shape
    assert slots == 2 * 5 + 1
    assert emb.graph.alphabet_size == G.alphabet_size ** (slots * d)


def test_embed_capacity():
    G, _ = planted_graph(4, 5, 2, make_rng(41))
    with pytest.raises(CapacityError):
        embed(G, 2, 3)


@pytest.mark.parametrize("q,m", [(2, 2), (2, 3), (3, 2), (4, 2)])
def test_embedded_graph_is_linear(q, m):
    G = ConstraintGraph((0, 1), 2, (Edge(0, 1, Pairs(frozenset({(0, 1), (1, 1)}))),))
    emb = embed(G, q, m)
    arcs = [(e.u, e.v) for e in emb.graph.edges]
    assert check_linear_structure((emb.graph.vertices, arcs), q, m).is_linear


def test_three_cycle_embedding_unsatisfiable():
    emb = embed(cycle_graph(3), 2, 3)
    ok, witness = embedding_satisfiable(emb)
    assert not ok and witness is None


def test_satisfiable_embedding_has_witness():
    G, _ = planted_graph(4, 4, 2, make_rng(42))
    emb = embed(G, 2, 3)
    ok, witness = embedding_satisfiable(emb)
    assert ok
    assert eval_sat(emb.graph, witness) == 1
