from collections import Counter
from fractions import Fraction

import pytest
from scipy.stats import chisquare

from pcp_forge.constraint_graph.graph import AcceptAll, ConstraintGraph, Edge, Pairs, cycle_graph, eval_sat
from pcp_forge.debruijn.graph import LinearStructureError
from pcp_forge.derand_rep import (
    LinearGraph,
    NotLinearError,
    estimate_hit_probability,
    estimate_product_sat,
    etest_draw_succeeds,
    etest_success_bound,
    exact_hit_probability,
    exact_product_sat,
    lift_assignment,
    materialize_small,
    materialized_distribution,
    product_verdict,
    params_check,
    planted_debruijn_graph,
    planted_linear_graph,
    random_product_assignment,
    refuse_everywhere,
    sample_etest_instance,
    tabulate,
)
from pcp_forge.experiment import wilson_interval
from pcp_forge.gf_linear.subspace import Subspace, enumerate_subspaces, is_disjoint, subspace_sum
from pcp_forge.rng import make_rng


@pytest.fixture(scope="module")
def db4():
    return planted_debruijn_graph(2, 4, 2, make_rng(200))


def _gauss(n, k, q):
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def _f_marginal_oracle(G, d1):
    """F-distribution by brute force over all ordered pairs of d1-subspaces of E.

    The conditions are checked straight from their definitions on point sets.
    """
    m = G.m
    subs = list(enumerate_subspaces(d1, G.E))
    counts = Counter()
    for F_L in subs:
        for F_R in subs:
            F = subspace_sum(F_L, F_R)
            if F.dim != 2 * d1:
                continue
            BL = Subspace.span([p[:m] for p in F_L.points()], m, G.q)
            BR = Subspace.span([p[m:] for p in F_R.points()], m, G.q)
            if BL.dim != d1 or BR.dim != d1:
                continue
            if set(BL.points()) & set(BR.points()) != {(0,) * m}:
                continue
            counts[F] += 1
    return counts


# ---------------------------------------------------------------- instances

def test_not_linear_rejected():
    with pytest.raises(LinearStructureError):
        LinearGraph.from_constraint_graph(cycle_graph(3), 2, 2)
    G = ConstraintGraph(((0,), (1,)), 2, (Edge((0,), (1,), AcceptAll()),))
    with pytest.raises(NotLinearError):
        LinearGraph.from_constraint_graph(G, 2, 1)


def test_params_validated(db4):
    G, _ = db4
    with pytest.raises(ValueError):
        sample_etest_instance(G, 2, 2, make_rng(0))
    with pytest.raises(ValueError):
        sample_etest_instance(G, 1, 3, make_rng(0))


def test_sampled_instances_meet_invariants(db4):
    G, _ = db4
    rng = make_rng(201)
    for _ in range(10_000):
        inst = sample_etest_instance(G, 1, 2, rng)
        assert inst.violations(1, 2) == []
        assert G.E.contains_subspace(inst.F)
        assert is_disjoint(inst.B_L, inst.B_R)


def test_draw_success_rate_above_bound_m8():
    G, _ = planted_linear_graph(2, 8, 10, 2, make_rng(202))
    bound = etest_success_bound(2, 8, 10, 2)
    assert bound == pytest.approx(1 - 8 / 16 - 4 / 64)
    rng = make_rng(203)
    n = 1000
    hits = sum(etest_draw_succeeds(G, 2, rng) for _ in range(n))
    assert wilson_interval(hits, n)[1] >= bound


def test_f_marginal_matches_brute_force(db4):
    G, _ = db4
    oracle = _f_marginal_oracle(G, 2)
    total = sum(oracle.values())
    keys = sorted(oracle, key=lambda S: S.basis)
    rng = make_rng(204)
    n = 4000
    seen = Counter(sample_etest_instance(G, 1, 2, rng).F for _ in range(n))
    assert set(seen) <= set(oracle)
    exp = [n * oracle[k] / total for k in keys]
    assert chisquare([seen[k] for k in keys], exp).pvalue > 0.01


def test_materialized_graph_matches_sampler(db4):
    G, _ = db4
    Gp = materialize_small(G, 1, 2)
    oracle = _f_marginal_oracle(G, 2)
    dist = materialized_distribution(Gp)
    f_counts = Counter()
    for (F, _, _), c in dist.items():
        f_counts[F] += c
    # every valid pair contributes the same number (3 x 3) of A choices
    assert {F: c // 9 for F, c in f_counts.items()} == dict(oracle)
    rng = make_rng(205)
    n = 3000
    seen = Counter((i.F, i.A_L, i.A_R) for i in (sample_etest_instance(G, 1, 2, rng) for _ in range(n)))
    byF = Counter()
    for (F, _, _), c in seen.items():
        byF[F] += c
    keys = sorted(f_counts, key=lambda S: S.basis)
    tot = sum(f_counts.values())
    assert chisquare([byF[k] for k in keys], [n * f_counts[k] / tot for k in keys]).pvalue > 0.01


def test_materialized_vertex_counts(db4):
    G, _ = db4
    Gp = materialize_small(G, 1, 2)
    left = [v for v in Gp.vertices if v[0] == "F"]
    right = [v for v in Gp.vertices if v[0] == "A"]
    assert len(left) == _gauss(G.dim_E, 4, 2) == 31
    assert len(right) == _gauss(4, 2, 2) == 35


# ------------------------------------------------------------ completeness

def test_completeness_over_planted_graphs():
    rng = make_rng(206)
    cases = [(2, 4, 1, 2), (2, 5, 1, 2), (2, 6, 1, 2), (4, 2, 0, 1)]
    checked = 0
    for i in range(20):
        q, m, d0, d1 = cases[i % len(cases)]
        G, pi = planted_debruijn_graph(q, m, 2, rng)
        assert eval_sat(G.graph, pi) == 1
        rep = estimate_product_sat(G, d0, d1, lift_assignment(pi, m), 10_000, seed=300 + i)
        assert rep.successes == rep.trials
        checked += 1
    for i in range(4):
        G, pi = planted_linear_graph(2, 4, 5 + i % 2, 3, rng)
        rep = estimate_product_sat(G, 1, 2, lift_assignment(pi, 4), 2000, seed=400 + i)
        assert rep.successes == rep.trials
        checked += 1
    assert checked >= 20


def test_refuse_gives_zero(db4):
    G, _ = db4
    assert exact_product_sat(G, 1, 2, refuse_everywhere(4)) == 0
    assert estimate_product_sat(G, 1, 2, refuse_everywhere(4), 200, seed=207).successes == 0


def test_tabulated_honest_proof_satisfies_materialized_graph(db4):
    G, pi = db4
    Gp = materialize_small(G, 1, 2)
    assert eval_sat(Gp, tabulate(lift_assignment(pi, 4), Gp)) == 1


# -------------------------------------------------------------- soundness

def test_violated_edges_reject_by_occurrence(db4):
    """Lifting an assignment that breaks some edges fails exactly when F holds one."""
    G, pi = db4
    bad = dict(pi)
    v = (1, 1, 0, 1)
    bad[v] = 1 - bad[v]
    violated = {tuple(e.u) + tuple(e.v) for e in G.graph.edges if not e.constraint.accepts(bad[e.u], bad[e.v])}
    assert violated
    sat = exact_product_sat(G, 1, 2, lift_assignment(bad, 4))
    hit = exact_hit_probability(G, 2, violated)
    assert sat == 1 - hit
    mc = estimate_product_sat(G, 1, 2, lift_assignment(bad, 4), 3000, seed=208)
    assert mc.within_sigma(float(sat), 4.0)


def test_random_product_assignment_mostly_rejected(db4):
    G, _ = db4
    rep = estimate_product_sat(G, 1, 2, random_product_assignment(4, 2, seed=209), 500, seed=210)
    assert rep.successes / rep.trials < 0.05


def test_rejection_grows_with_d1():
    """One edge rejects everything, so the planted labelling is a best assignment.

    Its honest lift fails exactly when F holds that edge; bigger F means more rejection.
    """
    G, pi = planted_debruijn_graph(2, 6, 2, make_rng(211))
    e = next(tuple(x.u) + tuple(x.v) for x in G.graph.edges if any(x.u) and any(x.v))
    cons = dict(G.constraints)
    cons[e] = Pairs(frozenset())
    H = LinearGraph(G.q, G.m, G.E, cons, G.graph)
    Pi = lift_assignment(pi, 6)
    small = estimate_product_sat(H, 1, 2, Pi, 3000, seed=212)
    big = estimate_product_sat(H, 1, 3, Pi, 3000, seed=213)
    rej_small, rej_big = 1 - small.estimate, 1 - big.estimate
    assert rej_big >= rej_small - 2 * max(small.stderr, big.stderr)
    assert rej_big > rej_small
    hit = estimate_hit_probability(H, 1, 3, {e}, 3000, seed=214)
    assert abs(hit.estimate - rej_big) <= 3 * (hit.stderr**2 + big.stderr**2) ** 0.5


# ------------------------------------------------------------------ params

def test_params_check_target_and_texts():
    r = params_check(2, 8, 9, 1, 2, rho=0.6)
    assert r["soundness_target"] == pytest.approx(0.5)
    assert [c["text"] for c in r["conditions"]] == ["d0 < m/h^2", "rho >= h*d0*q^(-d0/h)"]
    assert r["violated"] == []
    r = params_check(2, 8, 9, 1, 2, rho=0.4)
    assert r["violated"] == ["rho >= h*d0*q^(-d0/h)"]


def test_params_check_monotone():
    rhos = [0.1 * k for k in range(11)]
    holds = [params_check(2, 8, 9, 2, 3, rho=r)["conditions"][1]["holds"] for r in rhos]
    assert holds == sorted(holds)
    ms = range(1, 12)
    holds = [params_check(2, m, 9, 2, 3, rho=1, h=2.0)["conditions"][0]["holds"] for m in ms]
    assert holds == sorted(holds) and holds[-1] and not holds[0]
    assert Fraction(params_check(2, 8, 9, 3, 4, 1)["soundness_target"]).limit_denominator(100) == Fraction(3, 8)


def test_params_target_non_increasing_at_h1():
    for q in (2, 3, 4):
        targets = [params_check(q, 16, 17, d0, d0 + 1, 1.0)["soundness_target"] for d0 in range(1, 9)]
        assert all(b <= a + 1e-15 for a, b in zip(targets, targets[1:]))


# ------------------------------------------------------------ lift and verdict

def test_lift_of_constant_assignment():
    m = 4
    pi = {p: 1 for p in Subspace.full(m, 2).points()}
    Pi = lift_assignment(pi, m)
    A = next(iter(enumerate_subspaces(2, Subspace.full(m, 2))))
    assert set(Pi.query(A).values()) == {1}
    F = next(iter(enumerate_subspaces(2, Subspace.full(2 * m, 2))))
    assert set(Pi.query(F).values()) == {(1, 1)}


def test_lifted_labels_agree_on_shared_endpoints(db4):
    G, pi = db4
    Pi = lift_assignment(pi, 4)
    rng = make_rng(215)
    for _ in range(50):
        inst = sample_etest_instance(G, 1, 2, rng)
        seen = {}
        for e, (a, b) in Pi.query(inst.F).items():
            for v, lab in ((e[:4], a), (e[4:], b)):
                assert seen.setdefault(v, lab) == lab


def test_edge_violation_in_F_rejects(db4):
    G, pi = db4
    Pi = lift_assignment(pi, 4)
    inst = sample_etest_instance(G, 1, 2, make_rng(216))
    e = next(x for x in inst.F.points() if any(x))
    cons = dict(G.constraints)
    cons[e] = Pairs(frozenset())
    H = LinearGraph(G.q, G.m, G.E, cons, G.graph)
    assert product_verdict(Pi.query(inst.F), Pi.query(inst.A), inst, G) == (True, "accept")
    assert product_verdict(Pi.query(inst.F), Pi.query(inst.A), inst, H) == (False, "edge")


def test_relabelled_vertex_in_A_L_rejects(db4):
    """Relabel a vertex of A_L that is a left endpoint in F; only the A-side sees it."""
    G, pi = db4
    Pi = lift_assignment(pi, 4)
    rng = make_rng(217)
    done = 0
    for _ in range(50):
        inst = sample_etest_instance(G, 1, 2, rng)
        lefts = {e[:4] for e in inst.F.points()}
        v = next((p for p in inst.A_L.points() if p in lefts), None)
        if v is None:
            continue
        gA = dict(Pi.query(inst.A))
        gA[v] = 1 - gA[v]
        assert product_verdict(Pi.query(inst.F), gA, inst, G) == (False, "consistency")
        done += 1
    assert done == 50


def test_materialized_constraints_are_projections(db4):
    G, pi = db4
    Gp = materialize_small(G, 1, 2)
    Pi = lift_assignment(pi, 4)
    for edge in Gp.edges[:: max(1, len(Gp.edges) // 200)]:
        c = edge.constraint
        assert c.kind == "projection"
        fF = Pi.query(c.inst.F)
        proj = c.project(fF)
        gA = Pi.query(c.inst.A)
        assert all(gA[p] == lab for p, lab in proj.items())


def test_materialized_eval_equals_exact_for_bad_lift(db4):
    G, pi = db4
    bad = dict(pi)
    bad[(0, 0, 1, 1)] = 1 - bad[(0, 0, 1, 1)]
    Gp = materialize_small(G, 1, 2)
    Pi = lift_assignment(bad, 4)
    assert eval_sat(Gp, tabulate(Pi, Gp)) == exact_product_sat(G, 1, 2, Pi)
