"""Directed constraint graphs over a finite alphabet."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Callable, Hashable

from ..gf_linear.subspace import LIMITS, BudgetExceeded


# ---------------------------------------------------------------- constraints

class Constraint:
    """A binary predicate on label pairs. Subclasses provide ``accepts``."""

    kind = "abstract"

    def accepts(self, a, b) -> bool:  # pragma: no cover - interface
        raise NotImplementedError

    def to_json(self) -> dict:  # pragma: no cover - interface
        raise NotImplementedError


@dataclass(frozen=True)
class Pairs(Constraint):
    allowed: frozenset
    kind = "pairs"

    def accepts(self, a, b):
        return (a, b) in self.allowed

    def to_json(self):
        return {"type": "pairs", "data": sorted([list(p) for p in self.allowed])}


@dataclass(frozen=True)
class Projection(Constraint):
    """Accepts (a, b) iff f(a) = b; ``f`` is a tuple indexed by symbol."""

    f: tuple
    kind = "projection"

    def accepts(self, a, b):
        return self.f[a] == b

    def to_json(self):
        return {"type": "projection", "data": list(self.f)}


@dataclass(frozen=True)
class Equality(Constraint):
    kind = "equality"

    def accepts(self, a, b):
        return a == b

    def to_json(self):
        return {"type": "equality", "data": None}


@dataclass(frozen=True)
class AcceptAll(Constraint):
    kind = "all"

    def accepts(self, a, b):
        return True

    def to_json(self):
        return {"type": "all", "data": None}


@dataclass(frozen=True)
class Transposed(Constraint):
    """The inner constraint read with its arguments swapped."""

    inner: Constraint
    kind = "transposed"

    def accepts(self, a, b):
        return self.inner.accepts(b, a)

    def to_json(self):
        return {"type": "transposed", "data": self.inner.to_json()}


def transpose(c: Constraint) -> Constraint:
    if isinstance(c, (Equality, AcceptAll)):
        return c
    if isinstance(c, Pairs):
        return Pairs(frozenset((b, a) for a, b in c.allowed))
    if isinstance(c, Transposed):
        return c.inner
    return Transposed(c)


INEQUALITY_2 = Pairs(frozenset({(0, 1), (1, 0)}))


def inequality(alphabet_size: int) -> Pairs:
    return Pairs(frozenset((a, b) for a in range(alphabet_size) for b in range(alphabet_size) if a != b))


CONSTRAINT_DECODERS: dict[str, Callable[[Any], Constraint]] = {
    "pairs": lambda data: Pairs(frozenset(tuple(p) for p in data)),
    "projection": lambda data: Projection(tuple(data)),
    "equality": lambda data: Equality(),
    "all": lambda data: AcceptAll(),
    "transposed": lambda data: Transposed(constraint_from_json(data)),
}


def constraint_from_json(obj: dict) -> Constraint:
    try:
        dec = CONSTRAINT_DECODERS[obj["type"]]
    except KeyError:
        raise ValueError(f"unknown constraint type {obj.get('type')!r}") from None
    return dec(obj.get("data"))


# ---------------------------------------------------------------------- graph

@dataclass(frozen=True)
class Edge:
    u: Hashable
    v: Hashable
    constraint: Constraint


@dataclass(frozen=True)
class ConstraintGraph:
    """Directed multigraph with a constraint on every edge.

    ``vertices`` fixes the vertex order; parallel edges and self-loops are
    allowed. Symbols of the alphabet are ``0 .. alphabet_size - 1`` for graphs
    built here; derived graphs may use structured labels instead.
    """

    vertices: tuple
    alphabet_size: int
    edges: tuple
    meta: tuple = ()

    @cached_property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def size(self) -> int:
        return len(self.edges)

    def out_degrees(self) -> dict:
        deg = {v: 0 for v in self.vertices}
        for e in self.edges:
            deg[e.u] += 1
        return deg

    def in_degrees(self) -> dict:
        deg = {v: 0 for v in self.vertices}
        for e in self.edges:
            deg[e.v] += 1
        return deg

    def regular_degree(self) -> int | None:
        """d if every vertex has in- and out-degree d, else None."""
        outs, ins = self.out_degrees(), self.in_degrees()
        vals = set(outs.values()) | set(ins.values())
        return vals.pop() if len(vals) == 1 else None

    def is_projection(self) -> bool:
        return all(isinstance(e.constraint, Projection) for e in self.edges)

    def meta_dict(self) -> dict:
        return dict(self.meta)


class MissingLabel(KeyError):
    pass


def _label(pi, v):
    try:
        return pi[v]
    except KeyError:
        raise MissingLabel(f"assignment has no label for vertex {v!r}") from None


def satisfied_count(G: ConstraintGraph, pi) -> int:
    return sum(1 for e in G.edges if e.constraint.accepts(_label(pi, e.u), _label(pi, e.v)))


def eval_sat(G: ConstraintGraph, pi) -> Fraction:
    """Exact fraction of satisfied edges; an edgeless graph counts as fully satisfied."""
    for v in G.vertices:
        _label(pi, v)
    if not G.edges:
        return Fraction(1)
    return Fraction(satisfied_count(G, pi), len(G.edges))


def violated_edges(G: ConstraintGraph, pi) -> list[int]:
    return [i for i, e in enumerate(G.edges) if not e.constraint.accepts(pi[e.u], pi[e.v])]


def sat_exact(G: ConstraintGraph, budget: int | None = None) -> tuple[Fraction, dict]:
    """Brute-force max sat over all |Σ|^|V| assignments, with a witness."""
    n = len(G.vertices)
    total = G.alphabet_size ** n
    b = LIMITS.enum_budget if budget is None else budget
    if total > b:
        raise BudgetExceeded("sat_exact (use sat_lower_bound)", total, b)
    if not G.edges:
        return Fraction(1), {v: 0 for v in G.vertices}
    idx = G.index
    edges = [(idx[e.u], idx[e.v], e.constraint.accepts) for e in G.edges]
    best, best_pi = -1, None
    for labels in itertools.product(range(G.alphabet_size), repeat=n):
        s = 0
        for iu, iv, acc in edges:
            if acc(labels[iu], labels[iv]):
                s += 1
        if s > best:
            best, best_pi = s, labels
            if s == len(edges):
                break
    return Fraction(best, len(edges)), dict(zip(G.vertices, best_pi))


@dataclass
class LocalSearch:
    restarts: int = 20
    steps: int = 200


def sat_lower_bound(G: ConstraintGraph, rng, strategies: LocalSearch | None = None) -> tuple[Fraction, dict]:
    """Random restarts plus greedy min-conflict moves; returns a witnessed lower bound."""
    cfg = strategies or LocalSearch()
    if not G.edges:
        return Fraction(1), {v: 0 for v in G.vertices}
    n = len(G.vertices)
    idx = G.index
    edges = [(idx[e.u], idx[e.v], e.constraint.accepts) for e in G.edges]
    incident: list[list[int]] = [[] for _ in range(n)]
    for k, (iu, iv, _) in enumerate(edges):
        incident[iu].append(k)
        if iv != iu:
            incident[iv].append(k)
    sigma = G.alphabet_size

    def ok(lab, k):
        iu, iv, acc = edges[k]
        return acc(lab[iu], lab[iv])

    best, best_lab = -1, None
    for _ in range(cfg.restarts):
        lab = rng.integers(0, sigma, size=n).tolist()
        for _ in range(cfg.steps):
            bad = [k for k in range(len(edges)) if not ok(lab, k)]
            if not bad:
                break
            k = bad[int(rng.integers(0, len(bad)))]
            w = edges[k][int(rng.integers(0, 2))]
            scores = []
            for a in range(sigma):
                lab[w] = a
                scores.append(sum(ok(lab, j) for j in incident[w]))
            top = max(scores)
            choices = [a for a, s in enumerate(scores) if s == top]
            lab[w] = choices[int(rng.integers(0, len(choices)))]
        s = sum(ok(lab, k) for k in range(len(edges)))
        if s > best:
            best, best_lab = s, list(lab)
            if s == len(edges):
                break
    return Fraction(best, len(edges)), dict(zip(G.vertices, best_lab))


# ----------------------------------------------------------------------- FGLSS

@dataclass(frozen=True)
class TwoQueryVerifier:
    """Randomness r in [|E|] selects an edge; the proof is a vertex labelling."""

    graph: ConstraintGraph

    @property
    def randomness_space(self) -> int:
        return len(self.graph.edges)

    @property
    def randomness_complexity(self) -> int:
        return math.ceil(math.log2(len(self.graph.edges))) if len(self.graph.edges) > 1 else 0

    def queries(self, r: int) -> tuple:
        e = self.graph.edges[r]
        return e.u, e.v

    def decide(self, r: int, a, b) -> bool:
        return self.graph.edges[r].constraint.accepts(a, b)

    def acceptance_probability(self, proof) -> Fraction:
        if not self.graph.edges:
            return Fraction(1)
        acc = 0
        for r in range(self.randomness_space):
            u, v = self.queries(r)
            acc += self.decide(r, proof[u], proof[v])
        return Fraction(acc, self.randomness_space)


def fglss_adapter(G: ConstraintGraph) -> TwoQueryVerifier:
    return TwoQueryVerifier(G)


# ------------------------------------------------------------------ generators

def cycle_graph(n: int = 3, alphabet_size: int = 2, constraint: Constraint | None = None) -> ConstraintGraph:
    c = constraint if constraint is not None else inequality(alphabet_size)
    verts = tuple(range(n))
    return ConstraintGraph(verts, alphabet_size, tuple(Edge(i, (i + 1) % n, c) for i in range(n)))


def planted_graph(n: int, n_edges: int, alphabet_size: int, rng, density: float = 0.5) -> tuple[ConstraintGraph, dict]:
    """Random graph whose random pair-constraints all accept a hidden assignment."""
    pi = rng.integers(0, alphabet_size, size=n).tolist()
    edges = []
    for _ in range(n_edges):
        u, v = (int(x) for x in rng.integers(0, n, size=2))
        allowed = {(pi[u], pi[v])}
        for a in range(alphabet_size):
            for b in range(alphabet_size):
                if rng.random() < density:
                    allowed.add((a, b))
        edges.append(Edge(u, v, Pairs(frozenset(allowed))))
    return ConstraintGraph(tuple(range(n)), alphabet_size, tuple(edges)), dict(enumerate(pi))


def random_graph(n: int, n_edges: int, alphabet_size: int, rng, density: float = 0.5) -> ConstraintGraph:
    edges = []
    for _ in range(n_edges):
        u, v = (int(x) for x in rng.integers(0, n, size=2))
        allowed = {(a, b) for a in range(alphabet_size) for b in range(alphabet_size) if rng.random() < density}
        edges.append(Edge(u, v, Pairs(frozenset(allowed))))
    return ConstraintGraph(tuple(range(n)), alphabet_size, tuple(edges))


# ------------------------------------------------------------------------ JSON

def _vertex_to_json(v):
    return list(v) if isinstance(v, tuple) else v


def _vertex_from_json(v):
    return tuple(_vertex_from_json(x) for x in v) if isinstance(v, list) else v


def graph_to_json(G: ConstraintGraph) -> dict:
    out = {
        "alphabet_size": G.alphabet_size,
        "vertices": [_vertex_to_json(v) for v in G.vertices],
        "edges": [{"u": _vertex_to_json(e.u), "v": _vertex_to_json(e.v), "constraint": e.constraint.to_json()} for e in G.edges],
    }
    for k, val in G.meta:
        out[k] = val if not isinstance(val, tuple) else list(val)
    return out


def graph_from_json(obj: dict) -> ConstraintGraph:
    try:
        verts = tuple(_vertex_from_json(v) for v in obj["vertices"])
        edges = tuple(
            Edge(_vertex_from_json(e["u"]), _vertex_from_json(e["v"]), constraint_from_json(e["constraint"])) for e in obj["edges"]
        )
        sigma = int(obj["alphabet_size"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed graph JSON: {exc}") from None
    known = set(verts)
    for e in edges:
        if e.u not in known or e.v not in known:
            raise ValueError(f"edge endpoint not among vertices: {e.u!r} -> {e.v!r}")
    meta = tuple((k, v) for k, v in obj.items() if k not in ("alphabet_size", "vertices", "edges"))
    return ConstraintGraph(verts, sigma, edges, meta)


def assignment_to_json(pi: dict) -> dict:
    return {json.dumps(_vertex_to_json(k)): v for k, v in pi.items()}


def assignment_from_json(obj: dict) -> dict:
    return {_vertex_from_json(json.loads(k)): v for k, v in obj.items()}
