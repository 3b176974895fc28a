"""Continuous-relaxation bounds of each formulation and fractional rounding."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import lp
from .errors import Infeasible, IterationLimit, NotOnSimplex, TooLarge
from .exact import branch_and_bound_opt, brute_force_opt
from .formulations import Partitioning, build_emilo, build_remilo, build_vmilo, cut_value
from .graph import Graph

MULTISTART = 32


def vmilo_relax_bound(g: Graph) -> float:
    """Closed form of the vertex-based LP bound: sum of positive weights."""
    return float(sum(max(w, 0.0) for _, _, w in g.edges))


def _lp_value(sol: lp.LpSolution) -> float:
    if sol.status == "iteration-limit":
        raise IterationLimit("simplex hit its iteration limit")
    if sol.status != "optimal":
        raise Infeasible(f"relaxation not solved: {sol.status}")
    return sol.objective


def vmilo_relax_bound_lp(g: Graph, k: int) -> float:
    return _lp_value(lp.simplex_solve(lp.model_to_lp(build_vmilo(g, k))))


def _pair_columns(model) -> dict:
    cols = {}
    for i, v in enumerate(model.variables):
        _, a, b = v.name.split("_")
        cols[int(a), int(b)] = i
    return cols


def emilo_relax_bound(g: Graph, k: int, lazy: bool = False) -> float:
    if g.n < 2:
        return 0.0
    model = build_emilo(g, k, lazy_cliques=lazy)
    problem = lp.model_to_lp(model)
    if not lazy:
        return _lp_value(lp.simplex_solve(problem))
    res = lp.solve_relaxation_rowgen(problem, k, range(g.n), _pair_columns(model))
    return _lp_value(res.solution)


def remilo_relax_bound(g: Graph, k: int, lazy: bool = False) -> float:
    model, info = build_remilo(g, k, lazy_cliques=lazy)
    if model.num_vars == 0:
        return g.total_weight()
    problem = lp.model_to_lp(model)
    if not lazy:
        return _lp_value(lp.simplex_solve(problem))
    res = lp.solve_relaxation_rowgen(problem, k, info.maximal_cliques, _pair_columns(model))
    return _lp_value(res.solution)


def bqo_objective(g: Graph, x) -> float:
    """Quadratic objective sum_e w_e (1 - <x_u, x_v>) at a fractional point."""
    x = np.asarray(x, dtype=float)
    return float(sum(w * (1.0 - x[u] @ x[v]) for u, v, w in g.edges))


def check_simplex_rows(x, k=None, tol=1e-9) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or (k is not None and x.shape[1] != k):
        raise NotOnSimplex(f"expected an (n, k) array, got shape {x.shape}")
    if np.any(x < -tol) or np.any(np.abs(x.sum(axis=1) - 1.0) > tol):
        raise NotOnSimplex("rows must be non-negative and sum to 1")
    return x


def round_fractional(g: Graph, k: int, x) -> Partitioning:
    """Sweep vertices in id order, moving each row to its best vertex of the simplex.

    With all other rows fixed the objective is affine in row v, so putting all
    of v's mass on a part j minimising sum_u w_uv x_uj never lowers it. Among
    tied parts the one already holding most of v's mass wins, then the
    smallest j, so integral points with no improving move stay put.
    """
    x = check_simplex_rows(x, k).copy()
    W = g.weight_matrix
    labels = []
    for v in range(g.n):
        s = W[v] @ x
        tied = np.flatnonzero(s <= s.min() + 1e-12)
        j = int(tied[np.argmax(x[v, tied])])
        x[v] = 0.0
        x[v, j] = 1.0
        labels.append(j)
    return Partitioning(tuple(labels), k)


def _best_response(g: Graph, k: int, labels: list[int]) -> list[int]:
    """Single-vertex moves until no move improves the cut."""
    W = g.weight_matrix
    X = np.zeros((g.n, k))
    X[np.arange(g.n), labels] = 1.0
    improved = True
    while improved:
        improved = False
        for v in range(g.n):
            s = W[v] @ X
            j = int(np.argmin(s))
            if s[j] < s[labels[v]] - 1e-12:
                X[v] = 0.0
                X[v, j] = 1.0
                labels[v] = j
                improved = True
    return labels


def multistart_ascent(g: Graph, k: int, starts: int = MULTISTART, seed: int = 0):
    """Best cut from Dirichlet(1,...,1) starting rows, rounded then locally improved."""
    rng = np.random.default_rng(seed)
    best_val, best_p = -math.inf, None
    for _ in range(starts):
        x = rng.dirichlet(np.ones(k), size=g.n)
        p = round_fractional(g, k, x)
        p = Partitioning(tuple(_best_response(g, k, list(p.assignment))), k)
        val = cut_value(g, p)
        if val > best_val:
            best_val, best_p = val, p
    return best_val, best_p


@dataclass
class BqoBound:
    """Value of the quadratic relaxation.

    ``status == "exact"`` means lower == upper == the max k-cut optimum, which
    by the rounding argument is also the relaxation optimum. ``"bracket"``
    keeps a rounded lower certificate and a search upper bound apart.
    """

    lower: float
    upper: float
    status: str
    partition: Partitioning | None = None

    @property
    def value(self) -> float:
        return self.upper


def bqo_relax_bound(g: Graph, k: int, budget: int = 10**6, time_cap: float = 30.0,
                    seed: int = 0) -> BqoBound:
    if not g.edges:
        return BqoBound(0.0, 0.0, "exact", Partitioning((0,) * g.n, k))
    try:
        val, p = brute_force_opt(g, k, limit=budget)
        return BqoBound(val, val, "exact", p)
    except TooLarge:
        pass
    res = branch_and_bound_opt(g, k, time_cap=time_cap)
    if res.status == "proved":
        return BqoBound(res.value, res.value, "exact", res.partition)
    lo, p = multistart_ascent(g, k, seed=seed)
    if res.value > lo:
        lo, p = res.value, res.partition
    return BqoBound(lo, res.upper, "bracket", p)


@dataclass
class MethodResult:
    method: str
    bound: float | None
    status: str
    seconds: float
    scaled: float | None = None


@dataclass
class BoundReport:
    instance: str
    n: int
    m: int
    density: float
    k: int
    results: list[MethodResult] = field(default_factory=list)
    exact: float | None = None

    def scale(self):
        """Divide each bound by the best (smallest) bound on this instance."""
        vals = [r.bound for r in self.results if r.bound is not None]
        best = min(vals) if vals else None
        for r in self.results:
            if r.bound is None or best is None or best <= 0:
                r.scaled = None  # scaling undefined without a positive best bound
            else:
                r.scaled = r.bound / best

    def rows(self):
        for r in self.results:
            yield {
                "instance": self.instance, "n": self.n, "m": self.m,
                "density": round(self.density, 4), "k": self.k, "method": r.method,
                "bound": r.bound, "scaled_bound": r.scaled, "status": r.status,
                "seconds": r.seconds,
            }

    def to_dict(self):
        return asdict(self)
