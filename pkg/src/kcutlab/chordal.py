"""Chordal extension, chordality certification and maximal cliques.

Tie-breaking is by vertex id everywhere so the reduced edge-based models
built on top of this are reproducible.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations

from .errors import InvalidPeo, NotChordal
from .graph import Graph


@dataclass(frozen=True)
class ChordalInfo:
    fill_edges: tuple[tuple[int, int], ...]
    peo: tuple[int, ...]
    maximal_cliques: tuple[tuple[int, ...], ...]
    graph: Graph  # original edges plus fill edges (weight 0 on fill)

    @property
    def edge_pairs(self) -> list[tuple[int, int]]:
        return [(u, v) for u, v, _ in self.graph.edges]


def _adjacency_sets(g: Graph) -> list[set]:
    return [set(s) for s in g.adjacency]


def extended_graph(g: Graph, fill) -> Graph:
    return Graph.from_edges(g.n, list(g.edges) + [(u, v, 0.0) for u, v in fill])


def chordal_extend(g: Graph) -> ChordalInfo:
    """Greedy minimum-degree elimination.

    Repeatedly eliminate a minimum-degree vertex of the remaining graph (ties:
    smallest id), joining its remaining neighbours into a clique. The
    elimination order is a perfect elimination ordering of the filled graph.
    """
    cur = _adjacency_sets(g)
    alive = set(range(g.n))
    order, fill = [], []
    while alive:
        v = min(alive, key=lambda x: (len(cur[x]), x))
        nbrs = sorted(cur[v])
        for a, b in combinations(nbrs, 2):
            if b not in cur[a]:
                cur[a].add(b)
                cur[b].add(a)
                fill.append((a, b))
        for u in nbrs:
            cur[u].discard(v)
        cur[v] = set()
        alive.remove(v)
        order.append(v)
    fill = tuple(sorted(fill))
    h = extended_graph(g, fill)
    cliques = maximal_cliques(h, order)
    return ChordalInfo(fill, tuple(order), cliques, h)


def mcs_order(g: Graph) -> list[int]:
    """Maximum cardinality search visit order (ties: smallest id)."""
    weight = [0] * g.n
    visited = [False] * g.n
    order = []
    for _ in range(g.n):
        v = max((x for x in range(g.n) if not visited[x]), key=lambda x: (weight[x], -x))
        visited[v] = True
        order.append(v)
        for u in g.adjacency[v]:
            if not visited[u]:
                weight[u] += 1
    return order


def _is_peo(g: Graph, order) -> tuple[int, int, int] | None:
    """Return ``(v, a, b)`` with a, b non-adjacent later neighbours of v, or None."""
    pos = {v: i for i, v in enumerate(order)}
    for v in order:
        later = sorted((u for u in g.adjacency[v] if pos[u] > pos[v]), key=pos.get)
        for a, b in combinations(later, 2):
            if not g.has_edge(a, b):
                return v, a, b
    return None


def _chordless_cycle(g: Graph) -> list[int]:
    # a cycle v-a-...-b-v is chordless when the a..b path is a shortest path
    # avoiding every other neighbour of v
    for v in range(g.n):
        nbrs = sorted(g.adjacency[v])
        for a, b in combinations(nbrs, 2):
            if g.has_edge(a, b):
                continue
            blocked = (set(nbrs) | {v}) - {a, b}
            prev = {a: None}
            queue = deque([a])
            while queue and b not in prev:
                x = queue.popleft()
                for y in sorted(g.adjacency[x]):
                    if y not in prev and y not in blocked:
                        prev[y] = x
                        queue.append(y)
            if b in prev:
                path = [b]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                return [v] + path[::-1]
    raise AssertionError("no chordless cycle found in a non-chordal graph")


def verify_chordal(g: Graph) -> list[int]:
    """Return a perfect elimination ordering of ``g`` or raise :class:`NotChordal`.

    The candidate ordering is the reverse of a maximum cardinality search; it
    is a PEO exactly when ``g`` is chordal.
    """
    peo = mcs_order(g)[::-1]
    if _is_peo(g, peo) is None:
        return peo
    raise NotChordal(_chordless_cycle(g))


def maximal_cliques(g: Graph, peo) -> tuple[tuple[int, ...], ...]:
    """Maximal cliques of a chordal graph from a PEO.

    Each vertex proposes itself plus its later neighbours; inclusion-maximal
    proposals are the maximal cliques (at most ``n`` of them).
    """
    peo = list(peo)
    if sorted(peo) != list(range(g.n)):
        raise InvalidPeo("ordering is not a permutation of the vertices")
    bad = _is_peo(g, peo)
    if bad is not None:
        v, a, b = bad
        raise InvalidPeo(f"later neighbours {a}, {b} of vertex {v} are not adjacent")
    pos = {v: i for i, v in enumerate(peo)}
    cands = [frozenset([v, *(u for u in g.adjacency[v] if pos[u] > pos[v])]) for v in peo]
    out, seen = [], set()
    for c in cands:
        if c in seen or any(c < d for d in cands):
            continue
        seen.add(c)
        out.append(tuple(sorted(c)))
    return tuple(sorted(out))
