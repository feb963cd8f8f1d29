"""Derandomized parallel repetition of a graph with linear structure.

The product graph is never stored: a test instance is a pair of edge
subspaces (F_L, F_R) with vertex subspaces A_L, A_R inside their outer
projections, and the verifier compares the label of F = F_L + F_R (a label
pair per edge of F) with the label of A = A_L + A_R.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from .constraint_graph.graph import Constraint, ConstraintGraph, Edge, Pairs
from .debruijn.graph import build_debruijn, check_linear_structure
from .dp_tests import REFUSE, MalformedAnswer, TestOutcome, key_digest
from .experiment import ExperimentReport, estimate
from .gf_linear.sampling import sample_subspace
from .gf_linear.subspace import (
    LIMITS,
    BudgetExceeded,
    RetryCapExceeded,
    Subspace,
    count_subspaces,
    enumerate_subspaces,
    is_disjoint,
    subspace_sum,
)
from .rng import make_rng


class NotLinearError(ValueError):
    pass


@dataclass
class LinearGraph:
    """Constraint graph on F_q^m whose edge set is the subspace ``E`` of F_q^{2m}."""

    q: int
    m: int
    E: Subspace
    constraints: dict  # edge vector (left + right) -> Constraint
    graph: ConstraintGraph | None = None

    @classmethod
    def from_constraint_graph(cls, G: ConstraintGraph, q: int, m: int) -> "LinearGraph":
        rep = check_linear_structure(G, q, m)
        if not rep.is_linear:
            raise NotLinearError(f"graph has no linear structure: {rep.certificate()}")
        if rep.parallel_edges:
            raise NotLinearError("parallel edges: the edge set is a multiset, not a subspace")
        cons = {tuple(e.u) + tuple(e.v): e.constraint for e in G.edges}
        return cls(q, m, rep.edge_space, cons, G)

    @property
    def dim_E(self) -> int:
        return self.E.dim

    def constraint(self, e) -> Constraint:
        return self.constraints[tuple(e)]

    def vertex_space(self) -> Subspace:
        return Subspace.full(self.m, self.q)


def _left(S: Subspace, m: int) -> Subspace:
    return Subspace.span([r[:m] for r in S.basis], m, S.q)


def _right(S: Subspace, m: int) -> Subspace:
    return Subspace.span([r[m:] for r in S.basis], m, S.q)


@dataclass(frozen=True)
class ETestInstance:
    F_L: Subspace
    F_R: Subspace
    F: Subspace
    B_L: Subspace
    B_R: Subspace
    A_L: Subspace
    A_R: Subspace
    A: Subspace

    def violations(self, d0: int, d1: int) -> list[str]:
        out = []
        if self.F != subspace_sum(self.F_L, self.F_R) or self.F.dim != 2 * d1:
            out.append("dim F != 2 d1")
        if self.F_L.dim != d1 or self.F_R.dim != d1:
            out.append("dim F_L or dim F_R != d1")
        m = self.B_L.ambient_dim
        if self.B_L != _left(self.F_L, m) or self.B_L.dim != d1:
            out.append("B_L is not a d1-dimensional left projection of F_L")
        if self.B_R != _right(self.F_R, m) or self.B_R.dim != d1:
            out.append("B_R is not a d1-dimensional right projection of F_R")
        if not is_disjoint(self.B_L, self.B_R):
            out.append("B_L meets B_R")
        if not (self.B_L.contains_subspace(self.A_L) and self.B_R.contains_subspace(self.A_R)):
            out.append("A_L or A_R outside its side")
        if self.A_L.dim != d0 or self.A_R.dim != d0 or self.A.dim != 2 * d0:
            out.append("A dimensions wrong")
        if self.A != subspace_sum(self.A_L, self.A_R):
            out.append("A != A_L + A_R")
        return out


def side_pair(F_L: Subspace, F_R: Subspace, m: int, d1: int):
    """``(F, B_L, B_R)`` if (F_L, F_R) meets all four conditions, else None."""
    F = subspace_sum(F_L, F_R)
    if F.dim != 2 * d1:
        return None
    B_L = _left(F_L, m)
    if B_L.dim != d1:
        return None
    B_R = _right(F_R, m)
    if B_R.dim != d1 or not is_disjoint(B_L, B_R):
        return None
    return F, B_L, B_R


def check_etest_params(G: LinearGraph, d0: int, d1: int) -> None:
    if not d0 < d1:
        raise ValueError("need d0 < d1")
    if 2 * d1 > min(G.dim_E, G.m):
        raise ValueError(f"need 2 d1 <= min(dim E, m) = {min(G.dim_E, G.m)}")


def sample_etest_instance(G: LinearGraph, d0: int, d1: int, rng, retry_cap: int | None = None) -> ETestInstance:
    """Draw (F_L, F_R) jointly uniform given the four conditions, then A_L, A_R."""
    check_etest_params(G, d0, d1)
    cap = LIMITS.retry_cap if retry_cap is None else retry_cap
    for _ in range(cap):
        F_L = sample_subspace(d1, G.E, rng)
        F_R = sample_subspace(d1, G.E, rng)
        got = side_pair(F_L, F_R, G.m, d1)
        if got is not None:
            F, B_L, B_R = got
            A_L = sample_subspace(d0, B_L, rng)
            A_R = sample_subspace(d0, B_R, rng)
            return ETestInstance(F_L, F_R, F, B_L, B_R, A_L, A_R, subspace_sum(A_L, A_R))
    raise RetryCapExceeded(f"E-test conditioning failed {cap} times; use a larger m or a smaller d1")


def etest_draw_succeeds(G: LinearGraph, d1: int, rng) -> bool:
    """One raw (F_L, F_R) draw; True iff it meets the conditioning."""
    F_L = sample_subspace(d1, G.E, rng)
    F_R = sample_subspace(d1, G.E, rng)
    return side_pair(F_L, F_R, G.m, d1) is not None


def etest_success_bound(q: int, m: int, dim_E: int, d1: int) -> float:
    return 1 - 4 * d1 / q ** (m - 2 * d1) - 2 * d1 / q ** (dim_E - 2 * d1)


def enumerate_valid_pairs(G: LinearGraph, d1: int, budget: int | None = None):
    """Every (F_L, F_R, F, B_L, B_R) meeting the conditioning, in a fixed order."""
    n = count_subspaces(d1, G.dim_E, G.q)
    b = LIMITS.enum_budget if budget is None else budget
    if n * n > b:
        raise BudgetExceeded("enumerate_valid_pairs", n * n, b)
    subs = list(enumerate_subspaces(d1, G.E))
    for F_L in subs:
        for F_R in subs:
            got = side_pair(F_L, F_R, G.m, d1)
            if got is not None:
                yield (F_L, F_R) + got


# ---------------------------------------------------------- product oracle

@dataclass
class ProductAssignment:
    """Labels for vertex subspaces (point -> symbol) and edge subspaces (edge -> label pair)."""

    m: int
    oracle: Callable[..., Any]
    mode: str = "honest"
    memo: dict = field(default_factory=dict, repr=False)

    def query(self, S: Subspace, rng=None):
        if self.mode == "randomized":
            return self.oracle(S, rng)
        if self.mode == "table":
            if S not in self.memo:
                self.memo[S] = self.oracle(S)
            return self.memo[S]
        return self.oracle(S)


def lift_assignment(pi, m: int) -> ProductAssignment:
    """A -> pi restricted to A; F -> (pi(left(e)), pi(right(e))) for each edge e of F."""

    def oracle(S: Subspace):
        if S.ambient_dim == m:
            return {p: pi[p] for p in S.points()}
        return {e: (pi[e[:m]], pi[e[m:]]) for e in S.points()}

    return ProductAssignment(m, oracle)


def refuse_everywhere(m: int) -> ProductAssignment:
    return ProductAssignment(m, lambda S: REFUSE)


def random_product_assignment(m: int, alphabet_size: int, seed: int) -> ProductAssignment:
    """Independent uniform labels per query key, fixed by (seed, key)."""

    def oracle(S: Subspace):
        h = key_digest(S)
        rng = make_rng(seed, h >> 32, h & 0xFFFFFFFF)
        pts = S.points()
        if S.ambient_dim == m:
            return dict(zip(pts, rng.integers(0, alphabet_size, size=len(pts)).tolist()))
        vals = rng.integers(0, alphabet_size, size=(len(pts), 2)).tolist()
        return {e: tuple(v) for e, v in zip(pts, vals)}

    return ProductAssignment(m, oracle, mode="table")


def table_with_overrides(base: ProductAssignment, overrides: dict) -> ProductAssignment:
    """Table-mode copy of ``base``; ``overrides`` maps a subspace to a function of its honest answer."""

    def oracle(S):
        ans = base.query(S)
        fn = overrides.get(S)
        return fn(ans) if fn else ans

    return ProductAssignment(base.m, oracle, mode="table")


def product_verdict(fF, gA, inst: ETestInstance, G: LinearGraph) -> tuple[bool, str]:
    """Step-3 decision on already-fetched answers, with the reason for a rejection."""
    if fF is REFUSE or gA is REFUSE:
        return False, "refuse"
    m = G.m
    pts = inst.F.points()
    if not isinstance(fF, dict) or len(fF) != len(pts):
        raise MalformedAnswer("edge-subspace answer does not label every edge of F")
    in_AL = set(inst.A_L.points())
    in_AR = set(inst.A_R.points())
    cons = G.constraints
    for e in pts:
        try:
            a, b = fF[e]
        except KeyError:
            raise MalformedAnswer("edge-subspace answer is missing an edge of F") from None
        if not cons[e].accepts(a, b):
            return False, "edge"
        left, right = e[:m], e[m:]
        if left in in_AL and gA[left] != a:
            return False, "consistency"
        if right in in_AR and gA[right] != b:
            return False, "consistency"
    return True, "accept"


def run_e_test(Pi: ProductAssignment, inst: ETestInstance, G: LinearGraph, rng=None) -> TestOutcome:
    fF = Pi.query(inst.F, rng)
    gA = Pi.query(inst.A, rng)
    ok, why = product_verdict(fF, gA, inst, G)
    return TestOutcome(ok, {"instance": inst, "answer_F": fF, "answer_A": gA, "reason": why})


def estimate_product_sat(G: LinearGraph, d0: int, d1: int, Pi: ProductAssignment, trials: int, seed: int, workers: int = 1) -> ExperimentReport:
    check_etest_params(G, d0, d1)

    def trial(rng):
        return run_e_test(Pi, sample_etest_instance(G, d0, d1, rng), G, rng).accepted

    params = {"q": G.q, "m": G.m, "dim_E": G.dim_E, "d0": d0, "d1": d1, "mode": Pi.mode}
    return estimate("E-test", trial, trials, seed, params, workers)


def estimate_hit_probability(G: LinearGraph, d0: int, d1: int, violated: set, trials: int, seed: int, workers: int = 1) -> ExperimentReport:
    """Pr[F contains an edge from ``violated``], estimated without any oracle."""
    violated = {tuple(e) for e in violated}

    def trial(rng):
        inst = sample_etest_instance(G, d0, d1, rng)
        return any(e in violated for e in inst.F.points())

    params = {"q": G.q, "m": G.m, "dim_E": G.dim_E, "d0": d0, "d1": d1, "violated": len(violated)}
    return estimate("F-hits-violated", trial, trials, seed, params, workers)


def instances_exact(G: LinearGraph, d0: int, d1: int):
    """Every instance with its exact probability under the sampler."""
    pairs = list(enumerate_valid_pairs(G, d1))
    w_pair = Fraction(1, len(pairs))
    sub_cache: dict = {}

    def subs(B):
        if B not in sub_cache:
            sub_cache[B] = list(enumerate_subspaces(d0, B))
        return sub_cache[B]

    for F_L, F_R, F, B_L, B_R in pairs:
        ALs, ARs = subs(B_L), subs(B_R)
        w = w_pair / (len(ALs) * len(ARs))
        for A_L in ALs:
            for A_R in ARs:
                yield ETestInstance(F_L, F_R, F, B_L, B_R, A_L, A_R, subspace_sum(A_L, A_R)), w


def exact_product_sat(G: LinearGraph, d0: int, d1: int, Pi: ProductAssignment) -> Fraction:
    check_etest_params(G, d0, d1)
    total = Fraction(0)
    for inst, w in instances_exact(G, d0, d1):
        if run_e_test(Pi, inst, G).accepted:
            total += w
    return total


def exact_hit_probability(G: LinearGraph, d1: int, violated: set) -> Fraction:
    violated = {tuple(e) for e in violated}
    pairs = list(enumerate_valid_pairs(G, d1))
    hits = sum(1 for _, _, F, _, _ in pairs if any(e in violated for e in F.points()))
    return Fraction(hits, len(pairs))


# ---------------------------------------------------------- materialization

class ETestProjection(Constraint):
    """Step-3 check between an F-label and an A-label.

    The F-label determines the A-label on A_L ∪ A_R (the points the check
    reads); ``project`` returns that partial function, or None when the
    F-label already violates an edge of F.
    """

    kind = "projection"

    def __init__(self, G: LinearGraph, inst: ETestInstance):
        self.G = G
        self.inst = inst

    def project(self, fF):
        if fF is REFUSE:
            return None
        m = self.G.m
        inst = self.inst
        in_AL = set(inst.A_L.points())
        in_AR = set(inst.A_R.points())
        out: dict = {}
        for e in inst.F.points():
            a, b = fF[e]
            if not self.G.constraints[e].accepts(a, b):
                return None
            for pt, lab, side in ((e[:m], a, in_AL), (e[m:], b, in_AR)):
                if pt in side:
                    if out.setdefault(pt, lab) != lab:
                        return None
        return out

    def accepts(self, a, b) -> bool:
        return product_verdict(a, b, self.inst, self.G)[0]

    def to_json(self) -> dict:
        i = self.inst
        return {
            "type": "etest_projection",
            "data": {"F_L": i.F_L.to_json(), "F_R": i.F_R.to_json(), "A_L": i.A_L.to_json(), "A_R": i.A_R.to_json()},
        }


def materialize_small(G: LinearGraph, d0: int, d1: int, budget: int | None = None) -> ConstraintGraph:
    """The explicit product graph at micro scale.

    Left vertices ``("F", F)`` are all 2d1-subspaces of E, right vertices
    ``("A", A)`` all 2d0-subspaces of F^m. Each generable (F_L, F_R, A_L, A_R)
    contributes one edge, so parallel edges carry the sampler's weights and
    the uniform edge distribution equals the instance distribution.
    """
    check_etest_params(G, d0, d1)
    n_left = count_subspaces(2 * d1, G.dim_E, G.q)
    n_right = count_subspaces(2 * d0, G.m, G.q)
    b = LIMITS.enum_budget if budget is None else budget
    if n_left + n_right > b:
        raise BudgetExceeded("materialize_small vertices", n_left + n_right, b)
    left = [("F", F) for F in enumerate_subspaces(2 * d1, G.E)]
    right = [("A", A) for A in enumerate_subspaces(2 * d0, G.vertex_space())]
    cache: dict = {}
    edges = []
    for inst, _ in instances_exact(G, d0, d1):
        k = (inst.F, inst.A_L, inst.A_R)
        c = cache.get(k)
        if c is None:
            c = cache[k] = ETestProjection(G, inst)
        edges.append(Edge(("F", inst.F), ("A", inst.A), c))
    sigma = 2 ** 62  # labels are local functions; the size is only nominal here
    meta = (("product", {"q": G.q, "m": G.m, "dim_E": G.dim_E, "d0": d0, "d1": d1, "left": n_left, "right": n_right}),)
    return ConstraintGraph(tuple(left + right), sigma, tuple(edges), meta)


def tabulate(Pi: ProductAssignment, Gp: ConstraintGraph) -> dict:
    return {v: Pi.query(v[1]) for v in Gp.vertices}


def instance_key(inst: ETestInstance) -> tuple:
    return inst.F, inst.A_L, inst.A_R


def materialized_distribution(Gp: ConstraintGraph) -> Counter:
    return Counter((e.constraint.inst.F, e.constraint.inst.A_L, e.constraint.inst.A_R) for e in Gp.edges)


# ------------------------------------------------------------------- params

def params_check(q: int, m: int, dimE: int, d0: int, d1: int, rho: float, h: float = 1.0) -> dict:
    """Advisory evaluation of the repetition lemma's preconditions for a configured h."""
    target = h * d0 * q ** (-d0 / h)
    c1 = d0 < m / h**2
    c2 = rho >= target
    return {
        "q": q,
        "m": m,
        "dim_E": dimE,
        "d0": d0,
        "d1": d1,
        "rho": rho,
        "h": h,
        "soundness_target": target,
        "conditions": [
            {"text": "d0 < m/h^2", "lhs": d0, "rhs": m / h**2, "holds": c1},
            {"text": "rho >= h*d0*q^(-d0/h)", "lhs": rho, "rhs": target, "holds": c2},
        ],
        "violated": [t for t, ok in (("d0 < m/h^2", c1), ("rho >= h*d0*q^(-d0/h)", c2)) if not ok],
    }


# --------------------------------------------------------------- generators

def _planted_on(vertices, arcs, alphabet_size: int, rng, density: float, pi=None):
    if pi is None:
        pi = {v: int(rng.integers(0, alphabet_size)) for v in vertices}
    edges = []
    for u, v in arcs:
        allowed = {(pi[u], pi[v])}
        for a in range(alphabet_size):
            for b in range(alphabet_size):
                if rng.random() < density:
                    allowed.add((a, b))
        edges.append(Edge(u, v, Pairs(frozenset(allowed))))
    return ConstraintGraph(tuple(vertices), alphabet_size, tuple(edges)), pi


def planted_debruijn_graph(q: int, m: int, alphabet_size: int, rng, density: float = 0.3):
    """Satisfiable graph on DB(F_q, m) with a hidden assignment; returns (LinearGraph, pi)."""
    db = build_debruijn(q, m)
    G, pi = _planted_on(list(db.words()), db.arcs(), alphabet_size, rng, density)
    return LinearGraph.from_constraint_graph(G, q, m), pi


def planted_linear_graph(q: int, m: int, dim_E: int, alphabet_size: int, rng, density: float = 0.3):
    """Satisfiable graph whose edge space is a random dim_E-subspace of F^{2m} with full projections."""
    if not m <= dim_E <= 2 * m:
        raise ValueError("need m <= dim_E <= 2m")
    full = Subspace.full(2 * m, q)
    for _ in range(LIMITS.retry_cap):
        E = sample_subspace(dim_E, full, rng)
        if _left(E, m).dim == m and _right(E, m).dim == m:
            break
    else:
        raise RetryCapExceeded("no edge space with full projections found")
    verts = [tuple(p) for p in Subspace.full(m, q).points()]
    arcs = [(e[:m], e[m:]) for e in E.points()]
    G, pi = _planted_on(verts, arcs, alphabet_size, rng, density)
    return LinearGraph.from_constraint_graph(G, q, m), pi
