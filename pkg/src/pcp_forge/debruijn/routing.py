"""Permutation routing on de Bruijn graphs.

A permutation ``M`` of Λ^m that leaves the first m-k letters of every word
alone is routed by paths of 2k steps. One level of the recursion:

* contract each word to its first m-1 letters; the arcs ``v[:-1] -> M(v)[:-1]``
  form a |Λ|-regular bipartite multigraph, split into |Λ| perfect matchings;
* a word whose arc lands in matching ``b`` steps backwards to ``(b,) + v[:-1]``;
* the inner permutation ``(b,) + v[:-1] -> (b,) + M(v)[:-1]`` fixes m-k+1
  leading letters and is routed recursively with 2(k-1) steps;
* a final forward step shifts in the last letter of ``M(v)``.

The inner permutation may depend on the fixed prefix, which is why the
recursion carries a whole permutation of Λ^m rather than one of Λ^k.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

from ..constraint_graph.matching import decompose_arcs


class RoutingError(ValueError):
    pass


@dataclass(frozen=True)
class RoutingPaths:
    Lambda_size: int
    m: int
    steps: int
    paths: dict  # source word -> tuple of steps + 1 words

    @cached_property
    def positions(self) -> list[dict]:
        """``positions[j][w]``: the source of the path whose j-th vertex is w."""
        out = [dict() for _ in range(self.steps + 1)]
        for s, p in self.paths.items():
            for j, w in enumerate(p):
                out[j][w] = s
        return out

    def to_json(self) -> list:
        return [[list(w) for w in self.paths[s]] for s in sorted(self.paths)]


def _check_bijection(M: dict, words) -> None:
    if set(M) != set(words) or set(M.values()) != set(words):
        raise RoutingError("mu is not a bijection on the word set")


def _route(M: dict, words: list, k: int) -> dict:
    if k == 0:
        for v, w in M.items():
            if v != w:
                raise RoutingError(f"permutation moves {v} -> {w} but no routing steps remain")
        return {v: (v,) for v in words}
    prefixes = sorted({v[:-1] for v in words})
    arcs = [(v[:-1], M[v][:-1]) for v in words]
    color = {}
    for b, matching in enumerate(decompose_arcs(prefixes, arcs)):
        for eid in matching:
            color[words[eid]] = b
    N = {(color[v],) + v[:-1]: (color[v],) + M[v][:-1] for v in words}
    inner = _route(N, words, k - 1)
    return {v: (v,) + inner[(color[v],) + v[:-1]] + (M[v],) for v in words}


def route_permutation(M: dict, Lambda_size: int, m: int, k: int | None = None) -> RoutingPaths:
    """Route a permutation of Λ^m that fixes the first m - k letters (k defaults to m)."""
    k = m if k is None else k
    if not 0 <= k <= m:
        raise RoutingError("need 0 <= k <= m")
    words = list(itertools.product(range(Lambda_size), repeat=m))
    M = {tuple(a): tuple(b) for a, b in M.items()}
    _check_bijection(M, words)
    for v, w in M.items():
        if v[: m - k] != w[: m - k]:
            raise RoutingError(f"{v} -> {w} changes one of the first {m - k} letters")
    return RoutingPaths(Lambda_size, m, 2 * k, _route(M, words, k))


def route(mu: dict, Lambda_size: int, m: int, i: int) -> RoutingPaths:
    """Route w -> w[:m-i] + mu(w[m-i:]) for a bijection ``mu`` of Λ^i, with 2i steps."""
    if not 0 <= i <= m:
        raise RoutingError("need 0 <= i <= m")
    suffixes = list(itertools.product(range(Lambda_size), repeat=i))
    mu = {tuple(a): tuple(b) for a, b in mu.items()}
    _check_bijection(mu, suffixes)
    words = itertools.product(range(Lambda_size), repeat=m)
    M = {w: w[: m - i] + mu[w[m - i:]] for w in words}
    return route_permutation(M, Lambda_size, m, i)


def verify_routing(R: RoutingPaths, M: dict) -> list[str]:
    """Every violated routing invariant, as a message; empty means valid."""
    problems = []
    words = set(itertools.product(range(R.Lambda_size), repeat=R.m))
    for s, p in R.paths.items():
        if len(p) != R.steps + 1:
            problems.append(f"path from {s} has {len(p) - 1} steps, expected {R.steps}")
        if p[0] != s or p[-1] != tuple(M[s]):
            problems.append(f"path from {s} runs {p[0]} -> {p[-1]}, expected {s} -> {M[s]}")
        for x, y in zip(p, p[1:]):
            if not (x[1:] == y[:-1] or y[1:] == x[:-1]):
                problems.append(f"path from {s}: {x} and {y} are not adjacent")
    for j in range(R.steps + 1):
        at_j = [p[j] for p in R.paths.values() if len(p) > j]
        if len(at_j) != len(words) or set(at_j) != words:
            problems.append(f"position {j} is not a bijection onto the vertex set")
    return problems
