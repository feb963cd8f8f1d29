"""Rejection of an honest lift on an unsatisfiable linear graph, as d1 grows.

One edge of a planted de Bruijn graph is made unsatisfiable, so the planted
labelling is a best assignment and its lift is rejected exactly when the
sampled F contains that edge.
"""
import argparse

from _out import write_table

from pcp_forge.constraint_graph import Pairs
from pcp_forge.derand_rep import (
    LinearGraph,
    estimate_hit_probability,
    estimate_product_sat,
    lift_assignment,
    planted_debruijn_graph,
)
from pcp_forge.rng import make_rng


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=6)
    ap.add_argument("--d0", type=int, default=1)
    ap.add_argument("--d1", default="2,3")
    ap.add_argument("--bad-edges", type=int, default=1)
    ap.add_argument("--trials", type=int, default=3000)
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--out", default="results/amplification_trend.csv")
    a = ap.parse_args()

    G, pi = planted_debruijn_graph(2, a.m, 2, make_rng(a.seed))
    cons = dict(G.constraints)
    bad = [tuple(x.u) + tuple(x.v) for x in G.graph.edges if any(x.u) and any(x.v)][: a.bad_edges]
    for e in bad:
        cons[e] = Pairs(frozenset())
    H = LinearGraph(G.q, G.m, G.E, cons, G.graph)
    Pi = lift_assignment(pi, a.m)
    unsat = len(bad) / len(H.graph.edges)
    rows = []
    for i, d1 in enumerate(int(s) for s in a.d1.split(",")):
        sat = estimate_product_sat(H, a.d0, d1, Pi, a.trials, seed=a.seed + 2 * i + 1)
        hit = estimate_hit_probability(H, a.d0, d1, set(bad), a.trials, seed=a.seed + 2 * i + 2)
        rows.append({
            "d1": d1,
            "unsat_input": f"{unsat:.6g}",
            "rejection": f"{1 - sat.estimate:.6g}",
            "rejection_stderr": f"{sat.stderr:.6g}",
            "hit_probability": f"{hit.estimate:.6g}",
            "hit_stderr": f"{hit.stderr:.6g}",
            "amplification": f"{(1 - sat.estimate) / unsat:.6g}",
        })
        print(rows[-1])
    write_table(a.out, rows, {"m": a.m, "d0": a.d0, "bad_edges": len(bad), "trials": a.trials}, a.seed)


if __name__ == "__main__":
    main()
