"""Builders for the five max k-cut formulations, and cut evaluation.

Variable naming is fixed: ``x_v_j`` (vertex v in part j), ``y_u_v`` (edge
cut indicator), ``z_u_v`` (same-part indicator), ``Z_u_v`` and ``Zbar_u_v``
(matrix entries, ``u <= v``). Indices are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .chordal import ChordalInfo, chordal_extend
from .errors import BadK, LengthMismatch, TooLargeUpfront
from .graph import Graph, n_choose
from .model import Model, ModelBuilder

UPFRONT_CLIQUE_CAP = 2_000_000


@dataclass(frozen=True)
class Partitioning:
    assignment: tuple[int, ...]
    k: int

    def __post_init__(self):
        if self.k < 2:
            raise BadK(f"k must be >= 2, got {self.k}")
        if any(not 0 <= a < self.k for a in self.assignment):
            raise ValueError(f"assignment {self.assignment} has labels outside 0..{self.k - 1}")

    @classmethod
    def of(cls, assignment, k):
        return cls(tuple(int(a) for a in assignment), int(k))


def _check_k(k):
    if k < 2:
        raise BadK(f"k must be >= 2, got {k}")


def cut_value(g: Graph, p: Partitioning) -> float:
    if len(p.assignment) != g.n:
        raise LengthMismatch(f"assignment has length {len(p.assignment)}, graph has n={g.n}")
    a = p.assignment
    return float(sum(w for u, v, w in g.edges if a[u] != a[v]))


def build_bqo(g: Graph, k: int) -> Model:
    """Binary quadratic model: sum_e w_e (1 - sum_j x_uj x_vj), rows sum to 1."""
    _check_k(k)
    mb = ModelBuilder(f"bqo_k{k}")
    x = [[mb.add_var(f"x_{v}_{j}", discrete=True) for j in range(k)] for v in range(g.n)]
    for v in range(g.n):
        mb.add_constraint([(x[v][j], 1.0) for j in range(k)], "=", 1.0, f"assign_{v}")
    for u, v, w in g.edges:
        mb.objective_constant += w
        for j in range(k):
            mb.add_quadratic(x[u][j], x[v][j], -w)
    return mb.build()


def build_vmilo(g: Graph, k: int) -> Model:
    """Vertex-based linearisation with kn + m variables and n + 3km rows."""
    _check_k(k)
    mb = ModelBuilder(f"vmilo_k{k}")
    x = [[mb.add_var(f"x_{v}_{j}", discrete=True) for j in range(k)] for v in range(g.n)]
    y = {}
    for u, v, w in g.edges:
        y[u, v] = mb.add_var(f"y_{u}_{v}", discrete=True)
        mb.add_linear(y[u, v], w)
    for v in range(g.n):
        mb.add_constraint([(x[v][j], 1.0) for j in range(k)], "=", 1.0, f"assign_{v}")
    for u, v, _ in g.edges:
        for j in range(k):
            mb.add_constraint([(x[u][j], 1.0), (x[v][j], -1.0), (y[u, v], -1.0)], "<=", 0.0,
                              f"diffa_{u}_{v}_{j}")
            mb.add_constraint([(x[v][j], 1.0), (x[u][j], -1.0), (y[u, v], -1.0)], "<=", 0.0,
                              f"diffb_{u}_{v}_{j}")
            mb.add_constraint([(x[u][j], 1.0), (x[v][j], 1.0), (y[u, v], 1.0)], "<=", 2.0,
                              f"same_{u}_{v}_{j}")
    return mb.build()


def _add_triangle_rows(mb, z, tri):
    u, v, w = tri
    uv, vw, uw = z[u, v], z[v, w], z[u, w]
    tag = f"{u}_{v}_{w}"
    mb.add_constraint([(uv, 1.0), (vw, 1.0), (uw, -1.0)], "<=", 1.0, f"tri_a_{tag}")
    mb.add_constraint([(uw, 1.0), (uv, 1.0), (vw, -1.0)], "<=", 1.0, f"tri_b_{tag}")
    mb.add_constraint([(vw, 1.0), (uw, 1.0), (uv, -1.0)], "<=", 1.0, f"tri_c_{tag}")


def _add_clique_row(mb, z, Q):
    mb.add_constraint([(z[a, b], 1.0) for a, b in combinations(Q, 2)], ">=", 1.0,
                      "clq_" + "_".join(map(str, Q)))


def _edge_objective(mb, g, z):
    for u, v, w in g.edges:
        mb.objective_constant += w
        mb.add_linear(z[u, v], -w)


def build_emilo(g: Graph, k: int, lazy_cliques: bool = False,
                cap: int = UPFRONT_CLIQUE_CAP) -> Model:
    """Edge-based model over all vertex pairs.

    Triangle rows for every triple; the (k+1)-subset rows are added upfront
    unless ``lazy_cliques`` is set (then the LP layer separates them).
    """
    _check_k(k)
    if g.n < 2:
        raise ValueError("edge-based model needs n >= 2")
    n_cliques = n_choose(g.n, k + 1)
    if not lazy_cliques and n_cliques > cap:
        raise TooLargeUpfront(f"{n_cliques} clique rows exceed the upfront cap {cap}")
    mb = ModelBuilder(f"emilo_k{k}" + ("_lazy" if lazy_cliques else ""))
    z = {}
    for u, v in combinations(range(g.n), 2):
        z[u, v] = mb.add_var(f"z_{u}_{v}", discrete=True)
    _edge_objective(mb, g, z)
    for tri in combinations(range(g.n), 3):
        _add_triangle_rows(mb, z, tri)
    if not lazy_cliques:
        for Q in combinations(range(g.n), k + 1):
            _add_clique_row(mb, z, Q)
    return mb.build()


def build_remilo(g: Graph, k: int, lazy_cliques: bool = False,
                 info: ChordalInfo | None = None) -> tuple[Model, ChordalInfo]:
    """Reduced edge-based model on a chordal extension of ``g``.

    Variables only for extended edges; triangle and (k+1)-subset rows only
    inside maximal cliques, each emitted once even if cliques overlap.
    """
    _check_k(k)
    info = info or chordal_extend(g)
    mb = ModelBuilder(f"remilo_k{k}" + ("_lazy" if lazy_cliques else ""))
    z = {}
    for u, v in info.edge_pairs:
        z[u, v] = mb.add_var(f"z_{u}_{v}", discrete=True)
    _edge_objective(mb, g, z)
    tris = sorted({t for c in info.maximal_cliques for t in combinations(c, 3)})
    for tri in tris:
        _add_triangle_rows(mb, z, tri)
    if not lazy_cliques:
        subsets = sorted({q for c in info.maximal_cliques for q in combinations(c, k + 1)})
        for Q in subsets:
            _add_clique_row(mb, z, Q)
    return mb.build(), info


def build_misdo(g: Graph, k: int, variant: str = "I") -> Model:
    """Semidefinite models over a symmetric matrix variable.

    One variable per unordered pair plus the diagonal, diagonal fixed to 1.
    Variant I: entries binary, block ``kZ - ee^T`` PSD.
    Variant II: entries in {-1/(k-1), 1}, block ``Zbar`` PSD, objective
    scaled by (k-1)/k.
    """
    _check_k(k)
    variant = str(variant).upper()
    if variant not in ("I", "II"):
        raise ValueError(f"variant must be 'I' or 'II', got {variant!r}")
    n = g.n
    mb = ModelBuilder(f"misdo{variant}_k{k}")
    prefix, lo = ("Z", 0.0) if variant == "I" else ("Zbar", -1.0 / (k - 1))
    idx = {}
    for u in range(n):
        for v in range(u, n):
            idx[u, v] = mb.add_var(f"{prefix}_{u}_{v}", lb=lo, ub=1.0, discrete=True)
    for v in range(n):
        mb.add_constraint([(idx[v, v], 1.0)], "=", 1.0, f"diag_{v}")
    scale = 1.0 if variant == "I" else (k - 1) / k
    for u, v, w in g.edges:
        mb.objective_constant += scale * w
        mb.add_linear(idx[u, v], -scale * w)

    mult = float(k) if variant == "I" else 1.0
    coeffs = []
    for (u, v), i in idx.items():
        A = np.zeros((n, n))
        A[u, v] = A[v, u] = mult
        coeffs.append((i, A))
    constant = -np.ones((n, n)) if variant == "I" else np.zeros((n, n))
    mb.add_psd_block(constant, coeffs)
    return mb.build()


def partition_point(m: Model, p: Partitioning) -> np.ndarray:
    """Integral point of model ``m`` induced by a partitioning."""
    a, k = p.assignment, p.k
    vals = np.zeros(m.num_vars)
    for i, var in enumerate(m.variables):
        kind, s, t = var.name.split("_")
        s, t = int(s), int(t)
        if kind == "x":
            vals[i] = float(a[s] == t)
        elif kind == "y":
            vals[i] = float(a[s] != a[t])
        elif kind in ("z", "Z"):
            vals[i] = float(a[s] == a[t])
        elif kind == "Zbar":
            vals[i] = 1.0 if a[s] == a[t] else -1.0 / (k - 1)
        else:
            raise ValueError(f"unknown variable family in {var.name!r}")
    return vals


def emilo_counts(n: int, k: int) -> tuple[int, int]:
    """Closed-form (variables, rows) of the eager edge-based model."""
    return n_choose(n, 2), 3 * n_choose(n, 3) + n_choose(n, k + 1)


def vmilo_counts(n: int, m: int, k: int) -> tuple[int, int]:
    return k * n + m, n + 3 * k * m
