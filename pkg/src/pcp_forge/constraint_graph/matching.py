"""Hopcroft–Karp and perfect-matching decomposition of regular directed multigraphs."""

from __future__ import annotations

from collections import Counter, deque

INF = float("inf")


class NotRegularError(ValueError):
    pass


def hopcroft_karp(n_left: int, n_right: int, adj) -> tuple[list[int], list[int]]:
    """Maximum matching in a bipartite multigraph.

    ``adj[u]`` lists ``(edge_id, v)`` arcs. Returns ``(pair_u, edge_u)``: the
    right vertex and the edge id matched to each left vertex, or -1.
    """
    pair_u = [-1] * n_left
    edge_u = [-1] * n_left
    pair_v = [-1] * n_right
    dist = [0.0] * n_left

    def bfs() -> bool:
        queue = deque()
        for u in range(n_left):
            if pair_u[u] == -1:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = INF
        found = False
        while queue:
            u = queue.popleft()
            for _, v in adj[u]:
                w = pair_v[v]
                if w == -1:
                    found = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(root: int, ptr: list[int]) -> bool:
        stack = [root]
        trail = []
        while stack:
            u = stack[-1]
            arcs = adj[u]
            advanced = False
            while ptr[u] < len(arcs):
                eid, v = arcs[ptr[u]]
                ptr[u] += 1
                w = pair_v[v]
                if w == -1:
                    trail.append((u, eid, v))
                    for a, e, b in trail:
                        pair_u[a] = b
                        edge_u[a] = e
                        pair_v[b] = a
                    return True
                if dist[w] == dist[u] + 1:
                    trail.append((u, eid, v))
                    stack.append(w)
                    advanced = True
                    break
            if not advanced:
                dist[u] = INF
                stack.pop()
                if trail:
                    trail.pop()
        return False

    while bfs():
        ptr = [0] * n_left
        for u in range(n_left):
            if pair_u[u] == -1:
                dfs(u, ptr)
    return pair_u, edge_u


def check_regular(vertices, arcs) -> int:
    """Common in/out degree, or NotRegularError naming a vertex that breaks it."""
    outs = Counter(u for u, _ in arcs)
    ins = Counter(v for _, v in arcs)
    if not vertices:
        return 0
    d = outs.get(vertices[0], 0)
    for v in vertices:
        if outs.get(v, 0) != d or ins.get(v, 0) != d:
            raise NotRegularError(
                f"graph is not regular: vertex {v!r} has out-degree {outs.get(v, 0)} and in-degree {ins.get(v, 0)}, expected {d}"
            )
    return d


def decompose_arcs(vertices, arcs) -> list[list[int]]:
    """Split the arcs of a d-regular directed multigraph into d permutations.

    Self-loops count once toward in- and once toward out-degree, so they can
    sit in a matching like any other arc.
    """
    vertices = list(vertices)
    d = check_regular(vertices, arcs)
    idx = {v: i for i, v in enumerate(vertices)}
    n = len(vertices)
    remaining = set(range(len(arcs)))
    enc = [(idx[u], idx[v]) for u, v in arcs]
    out = []
    for _ in range(d):
        adj = [[] for _ in range(n)]
        for eid in sorted(remaining):
            a, b = enc[eid]
            adj[a].append((eid, b))
        pair_u, edge_u = hopcroft_karp(n, n, adj)
        if any(p == -1 for p in pair_u):  # pragma: no cover - impossible for regular input
            raise RuntimeError("no perfect matching in a regular bipartite graph")
        out.append(sorted(edge_u, key=lambda e: enc[e][0]))
        remaining.difference_update(edge_u)
    return out


def matching_decomposition(G) -> list[list[int]]:
    """Edge-index lists of d perfect matchings of a d-regular ConstraintGraph."""
    arcs = [(e.u, e.v) for e in G.edges]
    return decompose_arcs(G.vertices, arcs)


def matching_as_map(vertices, arcs, matching) -> dict:
    return {arcs[e][0]: arcs[e][1] for e in matching}
