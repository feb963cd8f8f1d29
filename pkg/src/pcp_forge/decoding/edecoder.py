"""The E-decoder on decoding graphs with linear structure.

An instance fixes an edge e of index k and a pair (F_L, F_R) drawn like an
E-test pair but conditioned on e lying in F = F_L + F_R. Three samplers are
provided:

* ``weighted`` (default, exact): pick the decomposition e = f_L + f_R with
  weight N(f_L)·N(f_R), where N(f) counts d1-subspaces of E containing f,
  then extend f_L and f_R to uniform d1-subspaces and reject on the E-test
  conditions. Every valid pair with e in F has exactly one decomposition, so
  the accepted pair is uniform.
* ``naive``: f_L uniform in E. Valid pairs whose decomposition has a zero
  part are over-weighted by the ratio of the two N values.
* ``enumerate``: draw uniformly from the full list of valid pairs (micro only).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from ..constraint_graph.graph import ConstraintGraph, Edge
from ..debruijn.graph import build_debruijn
from ..derand_rep import (
    ETestInstance,
    LinearGraph,
    ProductAssignment,
    check_etest_params,
    enumerate_valid_pairs,
    product_verdict,
    side_pair,
)
from ..dp_tests import TestOutcome
from ..experiment import ExperimentReport, estimate
from ..rng import make_rng
from ..gf_linear.sampling import random_point_in, sample_subspace, sample_subspace_containing
from ..gf_linear.subspace import LIMITS, RetryCapExceeded, Subspace, gaussian_binomial, subspace_sum
from .graph import DecodingGraph, DEdge, DecodingGraphError, PsiConstraint, VertexPsi, smoothness

SAMPLER_MODES = ("weighted", "naive", "enumerate")


@dataclass
class LinearDecodingGraph:
    """A decoding graph on F_q^m whose edges form a subspace E, plus its constraint view."""

    dgraph: DecodingGraph
    linear: LinearGraph
    edge_of: dict  # edge vector -> DEdge

    @classmethod
    def from_decoding_graph(cls, G: DecodingGraph, q: int, m: int) -> "LinearDecodingGraph":
        core = ConstraintGraph(
            tuple(G.vertices), G.alphabet_size or 0, tuple(Edge(e.u, e.v, PsiConstraint(e.psi)) for e in G.edges)
        )
        lin = LinearGraph.from_constraint_graph(core, q, m)
        edge_of = {tuple(e.u) + tuple(e.v): e for e in G.edges}
        return cls(G, lin, edge_of)

    @property
    def t(self) -> int:
        return self.dgraph.t

    def edges_of_index(self, k: int) -> list[tuple]:
        return [tuple(self.dgraph.edges[n].u) + tuple(self.dgraph.edges[n].v) for n in self.dgraph.edges_by_index[k]]


# ------------------------------------------------------------ synthetic graph

class _Coord:
    __slots__ = ("k",)

    def __init__(self, k):
        self.k = k

    def __call__(self, a):
        return a[0][self.k]


class _NoiseCheck:
    __slots__ = ("allowed",)

    def __init__(self, allowed):
        self.allowed = allowed

    def __call__(self, a, b):
        return (a[1], b[1]) in self.allowed


def synthetic_linear_decoding_graph(q: int, m: int, t: int, x, rng, density: float = 0.3):
    """DB(F_q, m) as a vertex-decoding graph with indices assigned round-robin.

    A label is (witness, noise bit). Edge e of index k decodes witness[k] of
    its tail and checks only a planted pair-constraint on the noise bits, so
    a corrupted witness part is invisible to the edge itself. Returns the
    graph and the honest labelling.
    """
    db = build_debruijn(q, m)
    words = list(db.words())
    arcs = db.arcs()
    if len(arcs) < t:
        raise DecodingGraphError("fewer edges than indices")
    x = tuple(tuple(s) if isinstance(s, (list, tuple)) else s for s in x)
    noise = {w: int(rng.integers(0, 2)) for w in words}
    pi = {w: (x, noise[w]) for w in words}
    edges = []
    for n, (u, v) in enumerate(arcs):
        allowed = {(noise[u], noise[v])} | {(a, b) for a in (0, 1) for b in (0, 1) if rng.random() < density}
        edges.append(DEdge(u, v, n % t, VertexPsi(_NoiseCheck(frozenset(allowed)), _Coord(n % t))))
    G = DecodingGraph(tuple(words), t, tuple(edges), None, vertex_decoding=True)
    return LinearDecodingGraph.from_decoding_graph(G, q, m), pi


# ---------------------------------------------------------------- sampling

def _n_containing(f_zero: bool, D: int, d1: int, q: int) -> int:
    if f_zero:
        return gaussian_binomial(D, d1, q)
    return gaussian_binomial(D - 1, d1 - 1, q)


def _draw_decomposition(e, E: Subspace, d1: int, rng, mode: str):
    q = E.q
    zero = (0,) * E.ambient_dim
    fld = E.field
    if mode == "naive":
        f_L = random_point_in(E, rng)
    else:
        D = E.dim
        n0 = _n_containing(True, D, d1, q)
        n1 = _n_containing(False, D, d1, q)
        size = q**D
        if e == zero:
            w_zero, w_e, w_other, n_other = n0 * n0, 0, n1 * n1, size - 1
        else:
            w_zero, w_e, w_other, n_other = n0 * n1, n1 * n0, n1 * n1, size - 2
        total = w_zero + w_e + w_other * n_other
        r = int(rng.integers(0, total))
        if r < w_zero:
            f_L = zero
        elif r < w_zero + w_e:
            f_L = e
        else:
            while True:
                f_L = random_point_in(E, rng)
                if f_L != zero and f_L != e:
                    break
    f_R = tuple(fld.sub(a, b) for a, b in zip(e, f_L))
    return f_L, f_R


def _extend(f, d1: int, E: Subspace, rng) -> Subspace:
    W0 = Subspace.span([f], E.ambient_dim, E.q)
    if W0.dim == 0:
        return sample_subspace(d1, E, rng)
    return sample_subspace_containing(d1, W0, E, rng)


def _finish(G: LinearGraph, d0: int, F_L, F_R, got, rng) -> ETestInstance:
    F, B_L, B_R = got
    A_L = sample_subspace(d0, B_L, rng)
    A_R = sample_subspace(d0, B_R, rng)
    return ETestInstance(F_L, F_R, F, B_L, B_R, A_L, A_R, subspace_sum(A_L, A_R))


_ENUM_CACHE: dict = {}


def _pairs_by_edge(G: LinearGraph, d1: int) -> dict:
    # keyed by id(G) but holding G itself, so the id cannot be recycled
    key = (id(G), d1)
    if key not in _ENUM_CACHE:
        by_edge: dict = {}
        for p in enumerate_valid_pairs(G, d1):
            for pt in p[2].points():
                by_edge.setdefault(pt, []).append(p)
        _ENUM_CACHE[key] = (G, by_edge)
    return _ENUM_CACHE[key][1]


def valid_pairs_containing(G: LinearGraph, d1: int, e) -> list:
    return _pairs_by_edge(G, d1).get(tuple(e), [])


def sample_conditioned_pair(G: LinearGraph, e, d0: int, d1: int, rng, mode: str = "weighted", retry_cap=None) -> ETestInstance:
    if mode not in SAMPLER_MODES:
        raise ValueError(f"unknown sampler mode {mode!r}")
    check_etest_params(G, d0, d1)
    e = tuple(e)
    if mode == "enumerate":
        pairs = valid_pairs_containing(G, d1, e)
        if not pairs:
            raise RetryCapExceeded("no valid pair contains this edge")
        F_L, F_R, F, B_L, B_R = pairs[int(rng.integers(0, len(pairs)))]
        return _finish(G, d0, F_L, F_R, (F, B_L, B_R), rng)
    cap = LIMITS.retry_cap if retry_cap is None else retry_cap
    for _ in range(cap):
        f_L, f_R = _draw_decomposition(e, G.E, d1, rng, mode)
        F_L = _extend(f_L, d1, G.E, rng)
        F_R = _extend(f_R, d1, G.E, rng)
        got = side_pair(F_L, F_R, G.m, d1)
        if got is not None:
            return _finish(G, d0, F_L, F_R, got, rng)
    raise RetryCapExceeded(f"E-decoder conditioning failed {cap} times; use a larger m or a smaller d1")


def sample_edecoder_instance(LG: LinearDecodingGraph, k: int, d0: int, d1: int, rng, mode: str = "weighted"):
    """(e, instance): e uniform among the edges of index k, instance conditioned on e in F."""
    Ek = LG.edges_of_index(k)
    if not Ek:
        raise DecodingGraphError(f"index {k} has no edges")
    e = Ek[int(rng.integers(0, len(Ek)))]
    return e, sample_conditioned_pair(LG.linear, e, d0, d1, rng, mode)


def run_e_decoder(Pi: ProductAssignment, inst: ETestInstance, e, LG: LinearDecodingGraph, rng=None):
    """⊥ (None) on any step-3 failure, else ψ_e applied to e's own label pair in Π(F)."""
    fF = Pi.query(inst.F, rng)
    gA = Pi.query(inst.A, rng)
    ok, _ = product_verdict(fF, gA, inst, LG.linear)
    if not ok:
        return None
    a, b = fF[tuple(e)]
    return LG.edge_of[tuple(e)].psi(a, b)


def decoder_transcript(Pi, inst, e, LG, rng=None) -> TestOutcome:
    fF = Pi.query(inst.F, rng)
    gA = Pi.query(inst.A, rng)
    ok, why = product_verdict(fF, gA, inst, LG.linear)
    out = LG.edge_of[tuple(e)].psi(*fF[tuple(e)]) if ok else None
    return TestOutcome(ok, {"reason": why, "output": out})


def estimate_decoding(LG: LinearDecodingGraph, Pi: ProductAssignment, x, d0: int, d1: int, trials: int, seed: int, workers: int = 1, mode: str = "weighted") -> ExperimentReport:
    """Frequency of decoding x_k correctly, with k uniform (the decoding distribution)."""
    x = tuple(x)

    def trial(rng):
        k = int(rng.integers(0, LG.t))
        e, inst = sample_edecoder_instance(LG, k, d0, d1, rng, mode)
        return run_e_decoder(Pi, inst, e, LG, rng) == x[k]

    params = {"q": LG.linear.q, "m": LG.linear.m, "d0": d0, "d1": d1, "t": LG.t, "mode": mode}
    return estimate("E-decoder", trial, trials, seed, params, workers)


# ----------------------------------------------------------- exact oracles

def exact_F_marginal(G: LinearGraph, d1: int, e) -> dict:
    """Exact distribution of F = F_L + F_R given e in F (uniform over valid pairs)."""
    pairs = valid_pairs_containing(G, d1, tuple(e))
    c = Counter(p[2] for p in pairs)
    n = len(pairs)
    return {F: Fraction(v, n) for F, v in c.items()}


def sampled_F_marginal(G: LinearGraph, e, d0: int, d1: int, samples: int, seed: int, mode: str = "weighted") -> Counter:
    rng = make_rng(seed, 0)
    return Counter(sample_conditioned_pair(G, e, d0, d1, rng, mode).F for _ in range(samples))


def total_variation(exact: dict, counts: Counter) -> float:
    n = sum(counts.values())
    keys = set(exact) | set(counts)
    return 0.5 * sum(abs(float(exact.get(k, 0)) - counts.get(k, 0) / n) for k in keys)


def instance_F_distributions(LG: LinearDecodingGraph, d1: int) -> tuple[dict, dict]:
    """Exact F-marginals when e is G-uniform and when e follows the decoding distribution."""
    G = LG.linear
    dg = LG.dgraph
    counts = dg.index_counts()
    n = len(dg.edges)
    uni: dict = {}
    dec: dict = {}
    for de in dg.edges:
        e = tuple(de.u) + tuple(de.v)
        pe_u = Fraction(1, n)
        pe_d = Fraction(1, dg.t * counts[de.k])
        for F, p in exact_F_marginal(G, d1, e).items():
            uni[F] = uni.get(F, 0) + pe_u * p
            dec[F] = dec.get(F, 0) + pe_d * p
    return uni, dec


def similarity_propagation(LG: LinearDecodingGraph, d1: int) -> dict:
    """Check that the two F-marginals are γ-similar for γ = smoothness of the graph."""
    gamma = smoothness(LG.dgraph)
    uni, dec = instance_F_distributions(LG, d1)
    def ratio(F):
        a, b = uni.get(F, 0), dec.get(F, 0)
        return min(b / a, a / b) if a and b else Fraction(0)

    worst = min(ratio(F) for F in set(uni) | set(dec))
    return {"gamma": gamma, "worst_ratio": worst, "ok": worst >= gamma, "support": len(uni)}


__all__ = [
    "LinearDecodingGraph",
    "SAMPLER_MODES",
    "decoder_transcript",
    "estimate_decoding",
    "exact_F_marginal",
    "instance_F_distributions",
    "run_e_decoder",
    "sample_conditioned_pair",
    "sample_edecoder_instance",
    "sampled_F_marginal",
    "similarity_propagation",
    "synthetic_linear_decoding_graph",
    "total_variation",
    "valid_pairs_containing",
]
