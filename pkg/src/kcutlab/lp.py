"""Dense tableau simplex and clique-row generation for edge-based relaxations."""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import KcutError
from .model import Model

log = logging.getLogger(__name__)

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7
VIOLATION_TOL = 1e-7
DEGENERATE_STALL = 50
REFACTOR_EVERY = 50
HARRIS_TOL = 1e-9
DUAL_FEAS_TOL = 1e-9
EXACT_SEPARATION_LIMIT = 1_000_000
DEFAULT_MAX_CUTS = 200


@dataclass
class LpProblem:
    """maximize ``c @ x + offset`` s.t. ``A x (senses) b``, ``lb <= x <= ub``."""

    c: np.ndarray
    A: np.ndarray
    senses: list
    b: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        n = self.c.size
        self.A = np.asarray(self.A, dtype=float).reshape(-1, n)
        self.b = np.asarray(self.b, dtype=float).reshape(-1)
        self.senses = list(self.senses)
        self.lb = np.asarray(self.lb, dtype=float).reshape(n)
        self.ub = np.asarray(self.ub, dtype=float).reshape(n)
        if n < 1:
            raise ValueError("LP needs at least one variable")
        if len(self.senses) != self.A.shape[0] or self.b.size != self.A.shape[0]:
            raise ValueError("row data have inconsistent lengths")
        if not (np.all(np.isfinite(self.lb)) and np.all(np.isfinite(self.ub))):
            raise ValueError("all variable bounds must be finite")
        if np.any(self.lb > self.ub):
            raise ValueError("lb > ub for some variable")

    @property
    def num_rows(self) -> int:
        return self.A.shape[0]

    @property
    def num_vars(self) -> int:
        return self.c.size

    def residual(self, x) -> float:
        """Largest violation of rows and bounds at ``x``."""
        x = np.asarray(x, dtype=float)
        worst = max(0.0, float(np.max(self.lb - x)), float(np.max(x - self.ub)))
        if self.num_rows:
            lhs = self.A @ x
            s = np.array(self.senses)
            viol = np.where(s == "<=", lhs - self.b,
                            np.where(s == ">=", self.b - lhs, np.abs(lhs - self.b)))
            worst = max(worst, float(viol.max()))
        return worst


@dataclass
class LpSolution:
    status: str  # "optimal" | "infeasible" | "iteration-limit"
    x: np.ndarray | None
    objective: float
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def model_to_lp(m: Model) -> LpProblem:
    """Continuous relaxation of a linear model (integrality dropped)."""
    if m.quadratic or m.psd_blocks:
        raise KcutError(f"model {m.name!r} is not linear")
    n = m.num_vars
    c = np.zeros(n)
    for i, coef in m.linear:
        c[i] = coef
    A = np.zeros((m.num_constraints, n))
    for r, con in enumerate(m.constraints):
        for i, coef in con.coeffs:
            A[r, i] = coef
    return LpProblem(
        c=c, A=A, senses=[con.sense for con in m.constraints],
        b=np.array([con.rhs for con in m.constraints]),
        lb=np.array([v.lb for v in m.variables]), ub=np.array([v.ub for v in m.variables]),
        offset=m.objective_constant,
    )


class TableauSimplex:
    """Dense tableau simplex on bound-complemented variables.

    Every variable is written as ``x = base + sign * t`` with ``t`` in
    ``[0, ub - lb]``; variables whose cost is positive are complemented
    (``base = ub``, ``sign = -1``) so that the all-slack basis is dual
    feasible. Every row, bound rows included, becomes ``a t <= b`` with its own
    slack, and the dual simplex runs from the slack basis without a phase 1.
    Appending rows later and re-running the dual simplex gives warm restarts.

    Tableau row 0 holds reduced costs ``c_B B^-1 A_j - c_j`` (optimal when all
    are >= 0) and the objective in the last column; rows 1.. hold ``B^-1 A``
    and the basic values.
    """

    def __init__(self, problem: LpProblem, max_iter: int | None = None):
        self.problem = problem
        self.n = problem.num_vars
        self.max_iter = max_iter
        self.iterations = 0
        self.status = None
        self.flip = problem.c > 0
        self.sign = np.where(self.flip, -1.0, 1.0)
        self.base = np.where(self.flip, problem.ub, problem.lb)
        self._rows, self._senses, self._rhs = [], [], []
        rows = self._split(problem.A, problem.senses, problem.b)
        width = problem.ub - problem.lb
        rows += [(np.eye(1, self.n, j)[0], width[j], True) for j in range(self.n)]
        m = len(rows)
        T0 = np.zeros((m, self.n + m + 1))
        for r, (a, b, is_bound) in enumerate(rows):
            T0[r, :self.n] = a if is_bound else a * self.sign
            T0[r, -1] = b if is_bound else b - a @ self.base
            T0[r, self.n + r] = 1.0
        self.T0 = T0
        self.T = np.vstack([np.zeros((1, T0.shape[1])), T0])
        self.basis = np.arange(self.n, self.n + m)
        self._cost = np.zeros(T0.shape[1] - 1)
        self._cost[:self.n] = problem.c * self.sign
        self._set_objective(self._cost)

    def _split(self, A, senses, b):
        """Rows as ``(a, rhs, False)`` meaning ``a x <= rhs`` in the original space."""
        out = []
        for a, s, rhs in zip(np.atleast_2d(A), senses, np.atleast_1d(b)):
            a = np.asarray(a, dtype=float)
            self._rows.append(a)
            self._senses.append(s)
            self._rhs.append(float(rhs))
            if s in ("<=", "="):
                out.append((a, float(rhs), False))
            if s in (">=", "="):
                out.append((-a, -float(rhs), False))
        return out

    def _set_objective(self, cost):
        self._cost = cost
        T = self.T
        T[0, :] = 0.0
        T[0, :-1] = -cost
        cb = cost[self.basis]
        nz = np.nonzero(cb)[0]
        if nz.size:
            T[0, :] += cb[nz] @ T[1 + nz, :]

    # -- pivoting -------------------------------------------------------------

    def _pivot(self, r, j):
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        nz = np.nonzero(col)[0]
        T[nz] -= np.outer(col[nz], T[r])
        T[:, j] = 0.0
        T[r, j] = 1.0
        self.basis[r - 1] = j
        self.iterations += 1
        if self.iterations % REFACTOR_EVERY == 0:
            self._refactor()

    def _refactor(self):
        """Recompute ``B^-1 [A | I | b]`` from the original rows to shed rounding drift."""
        try:
            Binv = np.linalg.inv(self.T0[:, self.basis])
        except np.linalg.LinAlgError:
            return
        n = self.n
        rows = np.empty_like(self.T0)
        rows[:, :n] = Binv @ self.T0[:, :n]
        rows[:, n:-1] = Binv  # slack block of the original rows is the identity
        rows[:, -1] = Binv @ self.T0[:, -1]
        rows[np.abs(rows) < 1e-12] = 0.0
        rows[np.arange(len(self.basis)), self.basis] = 1.0
        self.T[1:] = rows
        self._set_objective(self._cost)

    def _limit(self):
        if self.max_iter is not None:
            return self.max_iter
        return 50 * (self.T.shape[0] - 1 + self.T.shape[1] - 1)

    def _primal(self) -> str:
        T = self.T
        bland = False
        stall = 0
        limit = self._limit()
        while True:
            if self.iterations >= limit:
                return "iteration-limit"
            red = T[0, :-1]
            neg = np.nonzero(red < -PIVOT_TOL)[0]
            if neg.size == 0:
                return "optimal"
            j = int(neg[0]) if bland else int(neg[np.argmin(red[neg])])
            col = T[1:, j]
            cand = np.nonzero(col > PIVOT_TOL)[0]
            if cand.size == 0:
                return "unbounded"
            rhs = np.maximum(T[1 + cand, -1], 0.0)
            ratios = rhs / col[cand]
            best = ratios.min()
            if bland:
                ties = cand[ratios <= best + 1e-12]
                r = int(ties[np.argmin(self.basis[ties])])
            else:
                # Harris: among rows within a relaxed ratio pick the largest pivot
                relaxed = ((rhs + HARRIS_TOL) / col[cand]).min()
                ties = cand[ratios <= relaxed]
                r = int(ties[np.argmax(col[ties])])
            if best <= 1e-12:
                stall += 1
                if stall > DEGENERATE_STALL and not bland:
                    log.debug("primal degenerate stall, switching to Bland's rule")
                    bland = True
            else:
                stall = 0
            self._pivot(r + 1, j)

    def _dual(self) -> str:
        T = self.T
        bland = False
        stall = 0
        limit = self._limit()
        while True:
            if self.iterations >= limit:
                return "iteration-limit"
            rhs = T[1:, -1]
            infeasible = np.nonzero(rhs < -DUAL_FEAS_TOL)[0]
            if infeasible.size == 0:
                return "optimal"
            if bland:
                r = int(infeasible[np.argmin(self.basis[infeasible])])
            else:
                r = int(infeasible[np.argmin(rhs[infeasible])])
            row = T[r + 1, :-1]
            cand = np.nonzero(row < -PIVOT_TOL)[0]
            if cand.size == 0:
                return "infeasible"
            red = np.maximum(T[0, cand], 0.0)
            ratios = red / -row[cand]
            best = ratios.min()
            if bland:
                j = int(cand[ratios <= best + 1e-12][0])
            else:
                relaxed = ((red + HARRIS_TOL) / -row[cand]).min()
                ties = cand[ratios <= relaxed]
                j = int(ties[np.argmin(row[ties])])
            if best <= 1e-12:
                stall += 1
                if stall > DEGENERATE_STALL and not bland:
                    log.debug("dual degenerate stall, switching to Bland's rule")
                    bland = True
            else:
                stall = 0
            self._pivot(r + 1, j)

    # -- public ---------------------------------------------------------------

    def solve(self) -> LpSolution:
        return self._run()

    def _run(self) -> LpSolution:
        st = self._dual()
        if st == "optimal":
            st = self._primal()
            if st == "optimal" and np.any(self.T[1:, -1] < -DUAL_FEAS_TOL):
                st = self._dual()
        return self._finish(st)

    def add_rows(self, A_new, senses, b_new):
        """Append rows to a solved tableau; call :meth:`reoptimize` next."""
        if self.status != "optimal":
            raise KcutError("rows can only be appended to an optimal tableau")
        new = self._split(A_new, senses, b_new)
        k = len(new)
        T, T0 = self.T, self.T0
        m, width = T.shape[0], T.shape[1]
        T2 = np.zeros((m + k, width + k))
        T2[:m, :width - 1] = T[:, :-1]
        T2[:m, -1] = T[:, -1]
        T02 = np.zeros((m - 1 + k, width + k))
        T02[:m - 1, :width - 1] = T0[:, :-1]
        T02[:m - 1, -1] = T0[:, -1]
        for t, (a, b, _) in enumerate(new):
            row = np.zeros(width + k)
            row[:self.n] = a * self.sign
            row[width - 1 + t] = 1.0
            row[-1] = b - a @ self.base
            T02[m - 1 + t] = row
            coef = row[self.basis]
            nz = np.nonzero(coef)[0]
            if nz.size:
                row = row - coef[nz] @ T2[1 + nz, :]
            T2[m + t] = row
        self.T, self.T0 = T2, T02
        self.basis = np.concatenate([self.basis, np.arange(width - 1, width - 1 + k)])
        self._cost = np.concatenate([self._cost, np.zeros(k)])

    def reoptimize(self) -> LpSolution:
        return self._run()

    def _finish(self, status) -> LpSolution:
        self.status = status
        if status != "optimal":
            return LpSolution(status, None, math.nan, self.iterations)
        t = np.zeros(self.T.shape[1] - 1)
        t[self.basis] = self.T[1:, -1]
        x = self.base + self.sign * t[:self.n]
        x = np.clip(x, self.problem.lb, self.problem.ub)
        obj = float(self.problem.c @ x + self.problem.offset)
        return LpSolution("optimal", x, obj, self.iterations)

    def residual(self, x) -> float:
        """Largest violation at ``x`` over bounds and every row seen so far."""
        p = self.problem
        worst = max(0.0, float(np.max(p.lb - x)), float(np.max(x - p.ub)))
        for a, s, b in zip(self._rows, self._senses, self._rhs):
            lhs = float(a @ x)
            v = lhs - b if s == "<=" else (b - lhs if s == ">=" else abs(lhs - b))
            worst = max(worst, v)
        return worst


def simplex_solve(p: LpProblem, max_iter: int | None = None) -> LpSolution:
    return TableauSimplex(p, max_iter=max_iter).solve()


# -- clique separation --------------------------------------------------------


def _pair_matrix(z, n):
    """Accept an (n, n) matrix or a {(u, v): value} mapping; missing pairs -> inf."""
    if isinstance(z, dict):
        M = np.full((n, n), np.inf)
        for (u, v), val in z.items():
            M[u, v] = M[v, u] = val
        return M
    return np.asarray(z, dtype=float)


def _exact_subsets(Z, verts, size, max_cuts):
    """Up to ``max_cuts`` smallest-mass ``size``-subsets of ``verts`` with mass < 1."""
    limit = 1.0 - VIOLATION_TOL
    heap = []  # max-heap via negated mass: (-mass, subset)

    def cutoff():
        return -heap[0][0] if len(heap) >= max_cuts else limit

    def grow(start, chosen, mass):
        if len(chosen) == size:
            item = (-mass, tuple(chosen))
            if len(heap) < max_cuts:
                heapq.heappush(heap, item)
            else:
                heapq.heappushpop(heap, item)
            return
        need = size - len(chosen)
        for idx in range(start, len(verts) - need + 1):
            v = verts[idx]
            add = float(sum(Z[u, v] for u in chosen))
            if mass + add >= cutoff():
                continue
            chosen.append(v)
            grow(idx + 1, chosen, mass + add)
            chosen.pop()

    grow(0, [], 0.0)
    return [(q, -neg) for neg, q in heap]


def _greedy_subsets(Z, verts, size):
    found = {}
    for seed in verts:
        Q = [seed]
        mass = 0.0
        while len(Q) < size:
            best, best_add = None, math.inf
            for v in verts:
                if v in Q:
                    continue
                add = float(sum(Z[u, v] for u in Q))
                if add < best_add:
                    best, best_add = v, add
            if best is None:
                break
            Q.append(best)
            mass += best_add
        if len(Q) == size and mass < 1.0 - VIOLATION_TOL:
            found[tuple(sorted(Q))] = mass
    return list(found.items())


def separate_clique_cuts(z, k, universe, n=None, mode="auto",
                         max_cuts=DEFAULT_MAX_CUTS) -> list[tuple[tuple[int, ...], float]]:
    """Find (k+1)-subsets Q with sum of z over pairs of Q below 1.

    ``universe`` is a vertex collection or a list of them (e.g. maximal
    cliques); subsets are drawn inside a single universe set. Returns up to
    ``max_cuts`` ``(Q, mass)`` pairs, most violated first. An empty list
    means no violated subset was found.
    """
    sets = [sorted(universe)] if universe and np.isscalar(next(iter(universe))) else \
        [sorted(s) for s in universe]
    if n is None:
        n = 1 + max((max(s) for s in sets if s), default=0)
    Z = _pair_matrix(z, n)
    size = k + 1
    found = {}
    for verts in sets:
        if len(verts) < size:
            continue
        use_exact = mode == "exact" or (mode == "auto" and math.comb(len(verts), size) <= EXACT_SEPARATION_LIMIT)
        hits = _exact_subsets(Z, verts, size, max_cuts) if use_exact else _greedy_subsets(Z, verts, size)
        for q, mass in hits:
            found[q] = mass
    ranked = sorted(found.items(), key=lambda item: (item[1], item[0]))
    return ranked[:max_cuts]


@dataclass
class RowGenResult:
    solution: LpSolution
    rounds: int
    converged: bool
    cuts: list = field(default_factory=list)
    history: list = field(default_factory=list)  # objective after each solve

    @property
    def objective(self) -> float:
        return self.solution.objective


def solve_relaxation_rowgen(base: LpProblem, k: int, universe, pair_index: dict,
                            cap_rows: int = 100_000, max_cuts: int = DEFAULT_MAX_CUTS,
                            mode: str = "auto") -> RowGenResult:
    """Solve ``base`` then repeatedly add the most violated clique rows.

    ``pair_index`` maps vertex pairs ``(u, v)``, u < v, to LP columns. The
    returned objective is a valid upper bound even when the row cap stops
    the loop early, since clique rows only tighten the relaxation.
    """
    n = 1 + max((max(p) for p in pair_index), default=0)
    solver = TableauSimplex(base)
    sol = solver.solve()
    history = [sol.objective]
    cuts, rounds = [], 0
    if not sol.optimal:
        return RowGenResult(sol, rounds, False, cuts, history)
    while True:
        Z = np.full((n, n), np.inf)
        for (u, v), col in pair_index.items():
            Z[u, v] = Z[v, u] = sol.x[col]
        found = separate_clique_cuts(Z, k, universe, n=n, mode=mode, max_cuts=max_cuts)
        if not found:
            return RowGenResult(sol, rounds, True, cuts, history)
        room = cap_rows - len(cuts)
        if room <= 0:
            log.info("row cap %d reached after %d rounds", cap_rows, rounds)
            return RowGenResult(sol, rounds, False, cuts, history)
        found = found[:room]
        A = np.zeros((len(found), base.num_vars))
        for r, (Q, _) in enumerate(found):
            for u, v in combinations(Q, 2):
                A[r, pair_index[u, v]] += 1.0
        solver.add_rows(A, [">="] * len(found), np.ones(len(found)))
        cuts.extend(Q for Q, _ in found)
        rounds += 1
        sol = solver.reoptimize()
        history.append(sol.objective)
        if not sol.optimal:
            return RowGenResult(sol, rounds, False, cuts, history)
