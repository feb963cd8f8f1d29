"""Decoding graphs: constraint graphs whose edges also decode an indexed symbol.

An edge carries an index k in [t] and a map ψ(a, b) -> Γ-symbol or None
(None is ⊥, i.e. the edge rejects). Probabilities are exact Fractions under
the decoding distribution: k uniform in [t], then a uniform edge of E_k.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from ..constraint_graph.graph import Constraint, ConstraintGraph, Edge
from .circuit import Circuit, satisfying_assignments


class DecodingGraphError(ValueError):
    pass


class Psi:
    vertex_decoding = False

    def __call__(self, a, b):  # pragma: no cover - interface
        raise NotImplementedError

    def accepts(self, a, b) -> bool:
        return self(a, b) is not None


class VertexPsi(Psi):
    """ψ(a, b) = f(a) if check(a, b) else ⊥; ``check=None`` always passes."""

    vertex_decoding = True
    __slots__ = ("check", "f")

    def __init__(self, check, f):
        self.check = check
        self.f = f

    def accepts(self, a, b) -> bool:
        return self.check is None or self.check(a, b)

    def __call__(self, a, b):
        if self.check is None or self.check(a, b):
            return self.f(a)
        return None


class TablePsi(Psi):
    """Explicit table of (a, b) -> symbol; missing pairs decode to ⊥."""

    def __init__(self, table: dict):
        self.table = dict(table)

    def __call__(self, a, b):
        return self.table.get((a, b))

    @property
    def vertex_decoding(self) -> bool:
        seen: dict = {}
        for (a, _), s in self.table.items():
            if s is not None and seen.setdefault(a, s) != s:
                return False
        return True

    def f(self, a):
        for (x, _), s in self.table.items():
            if x == a and s is not None:
                return s
        return None


class PsiConstraint(Constraint):
    """The constraint "ψ does not output ⊥"."""

    kind = "decoding"

    def __init__(self, psi: Psi):
        self.psi = psi

    def accepts(self, a, b) -> bool:
        return self.psi.accepts(a, b)

    def to_json(self) -> dict:
        raise TypeError("decoding constraints are not serializable as plain constraints")


@dataclass(frozen=True)
class DEdge:
    u: object
    v: object
    k: int
    psi: Psi


@dataclass
class DecodingGraph:
    vertices: tuple
    t: int
    edges: tuple
    alphabet_size: int | None = None  # nominal; labels are structured tuples
    vertex_decoding: bool = False
    projection: bool = False
    meta: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.edges)

    @cached_property
    def edges_by_index(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.t)]
        for n, e in enumerate(self.edges):
            out[e.k].append(n)
        return out

    def index_counts(self) -> list[int]:
        return [len(x) for x in self.edges_by_index]

    def out_degrees(self) -> Counter:
        c = Counter({v: 0 for v in self.vertices})
        c.update(e.u for e in self.edges)
        return c

    def in_degrees(self) -> Counter:
        c = Counter({v: 0 for v in self.vertices})
        c.update(e.v for e in self.edges)
        return c

    def regular_degree(self) -> int | None:
        outs = set(self.out_degrees().values())
        ins = set(self.in_degrees().values())
        if len(outs) == 1 and outs == ins:
            return outs.pop()
        return None

    def validate(self) -> list[str]:
        problems = []
        vs = set(self.vertices)
        for n, e in enumerate(self.edges):
            if not 0 <= e.k < self.t:
                problems.append(f"edge {n}: index {e.k} outside [0, {self.t})")
            if e.u not in vs or e.v not in vs:
                problems.append(f"edge {n}: endpoint not a vertex")
        if self.vertex_decoding:
            if any(not e.psi.vertex_decoding for e in self.edges):
                problems.append("vertex_decoding flag set but some ψ is not of the form f(a)")
            lonely = [v for v, d in self.out_degrees().items() if d == 0]
            if lonely:
                problems.append(f"{len(lonely)} vertices have no outgoing edge")
        return problems

    def core(self) -> ConstraintGraph:
        edges = tuple(Edge(e.u, e.v, PsiConstraint(e.psi)) for e in self.edges)
        return ConstraintGraph(tuple(self.vertices), self.alphabet_size or 0, edges)


def _outcomes(G: DecodingGraph, pi, x):
    for e in G.edges:
        out = e.psi(pi[e.u], pi[e.v])
        if out is None:
            yield e.k, "reject"
        elif out == tuple(x[e.k]):
            yield e.k, "ok"
        else:
            yield e.k, "err"


def eval_decoding(G: DecodingGraph, pi, x) -> tuple[Fraction, Fraction]:
    """(decoding error, rejection) of π with respect to x under the decoding distribution."""
    counts = G.index_counts()
    if any(c == 0 for c in counts):
        raise DecodingGraphError("some index has no edges; the decoding distribution is undefined")
    err = [0] * G.t
    rej = [0] * G.t
    for k, o in _outcomes(G, pi, x):
        if o == "err":
            err[k] += 1
        elif o == "reject":
            rej[k] += 1
    e = sum(Fraction(err[k], counts[k]) for k in range(G.t)) / G.t
    r = sum(Fraction(rej[k], counts[k]) for k in range(G.t)) / G.t
    return e, r


def eval_decoding_uniform(G: DecodingGraph, pi, x) -> tuple[Fraction, Fraction]:
    """The same two probabilities under the uniform edge distribution."""
    c = Counter(o for _, o in _outcomes(G, pi, x))
    n = len(G.edges)
    return Fraction(c["err"], n), Fraction(c["reject"], n)


def decoding_error(G: DecodingGraph, pi, phi: Circuit) -> tuple[Fraction, tuple]:
    """Minimum decoding error over satisfying assignments of φ, with the minimizer."""
    if phi.n_inputs > 20:
        raise DecodingGraphError("t*u > 20: satisfying assignments are not enumerable")
    sat = satisfying_assignments(phi)
    if not sat:
        raise DecodingGraphError("no satisfying assignment")
    best = None
    for x in sat:
        err, _ = eval_decoding(G, pi, x)
        if best is None or err < best[0]:
            best = (err, x)
    return best


def smoothness(G: DecodingGraph) -> Fraction:
    """Largest γ with γ|E|/t <= |E_k| <= |E|/(γ t) for every k."""
    counts = G.index_counts()
    if any(c == 0 for c in counts):
        raise DecodingGraphError("some index has no edges")
    n, t = len(G.edges), G.t
    return min(min(Fraction(c * t, n), Fraction(n, c * t)) for c in counts)


def edge_probabilities(G: DecodingGraph) -> tuple[list[Fraction], list[Fraction]]:
    """Per-edge probability under the decoding and under the uniform distribution."""
    counts = G.index_counts()
    n = len(G.edges)
    dec = [Fraction(1, G.t * counts[e.k]) for e in G.edges]
    return dec, [Fraction(1, n)] * n


def similarity_check(G: DecodingGraph, event) -> dict:
    """Compare Pr[event] under both distributions against the smoothness factor.

    ``event`` is a predicate on edge positions.
    """
    gamma = smoothness(G)
    dec, uni = edge_probabilities(G)
    pd = sum((p for n, p in enumerate(dec) if event(n)), Fraction(0))
    pu = sum((p for n, p in enumerate(uni) if event(n)), Fraction(0))
    ok = gamma * pu <= pd and (pd <= pu / gamma)
    return {"gamma": gamma, "decoding": pd, "uniform": pu, "ok": ok}


def decoding_graph_to_json(G: DecodingGraph) -> dict:
    """Table-form decoding graphs only; other ψ maps are closures over pipeline state."""
    edges = []
    for e in G.edges:
        if not isinstance(e.psi, TablePsi):
            raise TypeError("only TablePsi edges serialize")
        edges.append(
            {
                "u": e.u,
                "v": e.v,
                "k": e.k,
                "psi": {"type": "table", "rows": [[a, b, s] for (a, b), s in sorted(e.psi.table.items())]},
            }
        )
    return {"vertices": list(G.vertices), "t": G.t, "alphabet_size": G.alphabet_size, "edges": edges}


def decoding_graph_from_json(obj: dict) -> DecodingGraph:
    def sym(s):
        return None if s is None else (tuple(s) if isinstance(s, list) else s)

    edges = []
    for e in obj["edges"]:
        psi = e["psi"]
        if psi.get("type") != "table":
            raise DecodingGraphError(f"unsupported psi type {psi.get('type')!r}")
        table = {(a, b): sym(s) for a, b, s in psi["rows"]}
        edges.append(DEdge(e["u"], e["v"], int(e["k"]), TablePsi(table)))
    G = DecodingGraph(tuple(obj["vertices"]), int(obj["t"]), tuple(edges), obj.get("alphabet_size"))
    G.vertex_decoding = all(e.psi.vertex_decoding for e in edges)
    return G
