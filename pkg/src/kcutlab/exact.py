"""Exact max k-cut optima at desk scale: enumeration and branch-and-bound."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import BadK, TooLarge
from .formulations import Partitioning
from .graph import Graph

BRUTE_FORCE_LIMIT = 10**8
_CHUNK = 1 << 18


def brute_force_opt(g: Graph, k: int, limit: int = BRUTE_FORCE_LIMIT) -> tuple[float, Partitioning]:
    """Enumerate all assignments with vertex 0 pinned to part 0.

    Ties resolve to the lexicographically smallest assignment.
    """
    if k < 2:
        raise BadK(f"k must be >= 2, got {k}")
    free = g.n - 1
    total = k**free
    if total > limit:
        raise TooLarge(f"{k}^{free} = {total} assignments exceed the limit {limit}")
    if not g.edges:
        return 0.0, Partitioning((0,) * g.n, k)
    eu = np.array([u for u, _, _ in g.edges])
    ev = np.array([v for _, v, _ in g.edges])
    ew = np.array([w for _, _, w in g.edges])
    powers = k ** np.arange(free - 1, -1, -1, dtype=np.int64)
    best_val, best_idx = -np.inf, 0
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        labels = np.zeros((idx.size, g.n), dtype=np.int64)
        if free:
            labels[:, 1:] = (idx[:, None] // powers[None, :]) % k
        vals = ((labels[:, eu] != labels[:, ev]) * ew).sum(axis=1)
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val, best_idx = float(vals[i]), start + i
    digits = [0] + [int(d) for d in (best_idx // powers) % k] if free else [0]
    return best_val, Partitioning(tuple(digits), k)


@dataclass
class BnbResult:
    value: float
    partition: Partitioning
    status: str  # "proved" | "timeout"
    upper: float  # valid upper bound on the optimum
    nodes: int


def branch_and_bound_opt(g: Graph, k: int, time_cap: float = 60.0) -> BnbResult:
    """Depth-first search over vertex labels with partition-symmetry breaking.

    Vertices are assigned in descending weighted degree (sum of |w|). A vertex
    may open a new label only as the next unused one. The bound at a node is
    the current cut plus every positive weight still touching an unassigned
    vertex.
    """
    if k < 2:
        raise BadK(f"k must be >= 2, got {k}")
    n = g.n
    wdeg = np.abs(g.weight_matrix).sum(axis=1)
    order = sorted(range(n), key=lambda v: (-wdeg[v], v))
    depth_of = {v: d for d, v in enumerate(order)}
    back = [[] for _ in range(n)]  # edges to earlier-assigned vertices: (depth, w)
    rest = np.zeros(n + 1)  # rest[d]: positive weight on edges not fully assigned at depth d
    for u, v, w in g.edges:
        du, dv = depth_of[u], depth_of[v]
        lo, hi = min(du, dv), max(du, dv)
        back[hi].append((lo, w))
        if w > 0:
            rest[:hi + 1] += w

    best_val, best_labels = 0.0, (0,) * n  # everything in one part cuts nothing
    start = time.perf_counter()
    nodes = 0
    # stack entries: (bound, depth, labels, value, used)
    stack = [(rest[0], 0, (), 0.0, 0)]
    while stack:
        nodes += 1
        if nodes % 4096 == 0 and time.perf_counter() - start > time_cap:
            upper = max(best_val, max(item[0] for item in stack))
            return BnbResult(best_val, _to_partition(best_labels, order, k), "timeout", upper, nodes)
        bound, d, labels, val, used = stack.pop()
        if bound <= best_val:
            continue
        if d == n:
            best_val, best_labels = val, labels
            continue
        children = []
        for lab in range(min(used + 1, k)):
            gain = sum(w for e, w in back[d] if labels[e] != lab)
            cv = val + gain
            cb = cv + rest[d + 1]
            if cb > best_val:
                children.append((cb, d + 1, labels + (lab,), cv, max(used, lab + 1)))
        stack.extend(reversed(children))
    return BnbResult(best_val, _to_partition(best_labels, order, k), "proved", best_val, nodes)


def _to_partition(labels, order, k) -> Partitioning:
    a = [0] * len(order)
    for d, v in enumerate(order):
        a[v] = labels[d]
    return Partitioning(tuple(a), k)
