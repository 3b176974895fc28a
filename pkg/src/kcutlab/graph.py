"""Weighted undirected graphs: representation, edge-list I/O and generators."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import BadParams, DuplicateEdge, MalformedLine, VertexOutOfRange


@dataclass(frozen=True)
class Graph:
    """Simple weighted graph on vertices ``0..n-1``.

    ``edges`` holds ``(u, v, w)`` triples with ``u < v``, sorted. Use
    :meth:`from_edges` to build from arbitrary orientation.
    """

    n: int
    edges: tuple[tuple[int, int, float], ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise BadParams(f"graph needs at least one vertex, got n={self.n}")
        seen = set()
        for u, v, _ in self.edges:
            if not (0 <= u < v < self.n):
                raise VertexOutOfRange(f"edge ({u}, {v}) invalid for n={self.n}")
            if (u, v) in seen:
                raise DuplicateEdge(f"duplicate edge ({u}, {v})")
            seen.add((u, v))

    @classmethod
    def from_edges(cls, n, edges):
        norm = []
        for e in edges:
            u, v = int(e[0]), int(e[1])
            w = float(e[2]) if len(e) > 2 else 1.0
            if u == v:
                raise MalformedLine(f"self-loop at vertex {u}")
            if u > v:
                u, v = v, u
            norm.append((u, v, w))
        norm.sort()
        return cls(n, tuple(norm))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def weight_matrix(self) -> np.ndarray:
        W = np.zeros((self.n, self.n))
        for u, v, w in self.edges:
            W[u, v] = W[v, u] = w
        W.setflags(write=False)
        return W

    @cached_property
    def adjacency(self) -> tuple[frozenset, ...]:
        nbrs = [set() for _ in range(self.n)]
        for u, v, _ in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)

    def has_edge(self, u, v) -> bool:
        return v in self.adjacency[u]

    def total_weight(self) -> float:
        return float(sum(w for _, _, w in self.edges))

    def edge_index(self) -> dict:
        return {(u, v): i for i, (u, v, _) in enumerate(self.edges)}


def complete_graph(n, weight=1.0) -> Graph:
    return Graph.from_edges(n, [(u, v, weight) for u in range(n) for v in range(u + 1, n)])


def cycle_graph(n, weight=1.0) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n, weight) for i in range(n)])


def path_graph(n, weight=1.0) -> Graph:
    return Graph.from_edges(n, [(i, i + 1, weight) for i in range(n - 1)])


def _comment(line: str) -> bool:
    return line.startswith("#") or line.startswith("c")


def parse_edge_list(text) -> Graph:
    """Parse the ``n m`` / ``u v w`` edge-list format (1-based vertex ids).

    ``text`` may be a string or any iterable of lines. Blank lines and lines
    starting with ``#`` or ``c`` are skipped.
    """
    if isinstance(text, str):
        text = text.splitlines()
    header = None
    edges = []
    for lineno, raw in enumerate(text, start=1):
        line = raw.strip()
        if not line or _comment(line):
            continue
        parts = line.split()
        if header is None:
            if len(parts) != 2:
                raise MalformedLine(f"line {lineno}: expected header 'n m', got {line!r}")
            try:
                header = (int(parts[0]), int(parts[1]))
            except ValueError:
                raise MalformedLine(f"line {lineno}: non-integer header {line!r}") from None
            if header[0] < 1 or header[1] < 0:
                raise MalformedLine(f"line {lineno}: bad header {line!r}")
            continue
        if len(parts) != 3:
            raise MalformedLine(f"line {lineno}: expected 'u v w', got {line!r}")
        try:
            u, v, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise MalformedLine(f"line {lineno}: cannot parse {line!r}") from None
        n = header[0]
        if not (1 <= u <= n and 1 <= v <= n):
            raise VertexOutOfRange(f"line {lineno}: vertex out of range 1..{n}: {line!r}")
        if u == v:
            raise MalformedLine(f"line {lineno}: self-loop {line!r}")
        edges.append((u - 1, v - 1, w))
    if header is None:
        raise MalformedLine("missing 'n m' header")
    n, m = header
    if len(edges) != m:
        raise MalformedLine(f"header announces {m} edges, found {len(edges)}")
    return Graph.from_edges(n, edges)


def _fmt_number(x: float) -> str:
    x = float(x)
    if x.is_integer() and abs(x) < 2**53:
        return str(int(x))
    return repr(x)


def render_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines += [f"{u + 1} {v + 1} {_fmt_number(w)}" for u, v, w in g.edges]
    return "\n".join(lines) + "\n"


def read_graph(path) -> Graph:
    return parse_edge_list(Path(path).read_text())


def write_graph(g: Graph, path) -> None:
    Path(path).write_text(render_edge_list(g))


def graph_stats(g: Graph) -> tuple[int, int, float]:
    """Return ``(n, m, density)`` with density in percent of C(n, 2)."""
    pairs = g.n * (g.n - 1) // 2
    density = 100.0 * g.m / pairs if pairs else 0.0
    return g.n, g.m, density


def gen_instance(kind: str, params: dict, seed: int = 0) -> Graph:
    """Generate a desk-scale instance.

    kinds:
      random    -- G(n, p); params n, p, and optional integer weight range wmin/wmax
      band      -- i~j iff 0 < |i-j| <= b; params n, b, optional wmin/wmax
      spinglass -- L x L torus with weights uniform on {-1, +1}; param L
    """
    rng = np.random.default_rng(seed)
    params = dict(params)

    def weights(count):
        lo, hi = int(params.get("wmin", 1)), int(params.get("wmax", 1))
        if lo > hi:
            raise BadParams(f"wmin={lo} > wmax={hi}")
        return rng.integers(lo, hi + 1, size=count).astype(float)

    if kind == "random":
        n, p = int(params.get("n", 0)), float(params.get("p", -1))
        if n < 1 or not (0 < p <= 1):
            raise BadParams(f"random needs n >= 1 and p in (0, 1], got n={n}, p={p}")
        iu, iv = np.triu_indices(n, 1)
        keep = rng.random(iu.size) < p
        iu, iv = iu[keep], iv[keep]
        return Graph.from_edges(n, zip(iu.tolist(), iv.tolist(), weights(iu.size)))
    if kind == "band":
        n, b = int(params.get("n", 0)), int(params.get("b", 0))
        if n < 1 or b < 1:
            raise BadParams(f"band needs n >= 1 and b >= 1, got n={n}, b={b}")
        pairs = [(i, j) for i in range(n) for j in range(i + 1, min(n, i + b + 1))]
        ws = weights(len(pairs))
        return Graph.from_edges(n, [(i, j, w) for (i, j), w in zip(pairs, ws)])
    if kind == "spinglass":
        L = int(params.get("L", 0))
        if L < 2:
            raise BadParams(f"spinglass needs L >= 2, got L={L}")
        pairs = {}
        for r in range(L):
            for c in range(L):
                v = r * L + c
                for u in (r * L + (c + 1) % L, ((r + 1) % L) * L + c):
                    # L == 2 wraps onto an existing grid edge; keep one copy
                    pairs.setdefault((min(u, v), max(u, v)), None)
        keys = sorted(pairs)
        spins = rng.choice(np.array([-1.0, 1.0]), size=len(keys))
        return Graph.from_edges(L * L, [(u, v, w) for (u, v), w in zip(keys, spins)])
    raise BadParams(f"unknown instance kind {kind!r}")


def density_bucket(density: float) -> str:
    for hi in (25, 50, 75, 100):
        if density <= hi:
            return f"({hi - 25},{hi}]"
    return "(75,100]"


def n_choose(n, r) -> int:
    return math.comb(n, r) if 0 <= r <= n else 0
