"""Liftings of fractional assignments and membership tests for the relaxed sets.

A fractional assignment is an ``(n, k)`` array with rows on the unit simplex.
Pair-indexed vectors (``z``) follow ``itertools.combinations(range(n), 2)``
order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import BadDims, GridTooLarge
from .graph import Graph
from .linalg import is_psd
from .lp import separate_clique_cuts

LINEAR_TOL = 1e-9
PSD_TOL = 1e-9
GRID_ROW_CAP = 10**6
SEARCH_BUDGET = 10**8
VARIANTS = ("y", "z", "Z", "Zbar")


@dataclass(frozen=True)
class Membership:
    ok: bool
    violation: float  # largest violation found (<= 0 when ok)
    witness: str = ""

    def __bool__(self):
        return self.ok


@dataclass(frozen=True, eq=False)
class LiftedPoint:
    variant: str
    payload: np.ndarray


def sample_fractional_x(n: int, k: int, seed: int, count: int) -> list[np.ndarray]:
    """Fractional assignments: three corner cases, then uniform simplex rows.

    Corners (in order): an integral assignment, all rows uniform, and vertex 0
    uniform with the rest integral. Random rows are normalised exponentials,
    which is uniform on the simplex.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, k, size=n)
    integral = np.eye(k)[labels]
    uniform = np.full((n, k), 1.0 / k)
    mixed = integral.copy()
    mixed[0] = 1.0 / k
    out = [integral, uniform, mixed][:count]
    while len(out) < count:
        e = rng.exponential(size=(n, k))
        out.append(e / e.sum(axis=1, keepdims=True))
    return out


def lift(x, g: Graph | None, variant: str) -> LiftedPoint:
    """Apply one of the liftings to a fractional assignment.

    y    -- per edge of g: 1 - <x_u, x_v>
    z    -- per vertex pair: <x_u, x_v>
    Z    -- D + X X^T with D_vv = 1 - ||x_v||^2 (unit diagonal)
    Zbar -- (k D - ee^T + k X X^T) / (k - 1)
    """
    x = np.asarray(x, dtype=float)
    n, k = x.shape
    G = x @ x.T
    if variant == "y":
        if g is None:
            raise ValueError("the y lifting needs the graph's edge list")
        payload = np.array([1.0 - G[u, v] for u, v, _ in g.edges])
    elif variant == "z":
        iu, iv = np.triu_indices(n, 1)
        payload = G[iu, iv]
    elif variant in ("Z", "Zbar"):
        D = np.diag(1.0 - np.einsum("ij,ij->i", x, x))
        Z = D + G
        payload = Z if variant == "Z" else (k * Z - np.ones((n, n))) / (k - 1)
    else:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    return LiftedPoint(variant, payload)


def pair_vector_to_matrix(z, n) -> np.ndarray:
    Z = np.zeros((n, n))
    iu, iv = np.triu_indices(n, 1)
    Z[iu, iv] = z
    Z[iv, iu] = z
    return Z


def member_vmilo(g: Graph, k: int, x, y, tol: float = LINEAR_TOL) -> Membership:
    """Check (x, y) against the vertex-based relaxation: assignment rows,
    both difference rows, the sum row, and [0, 1] boxes."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (g.n, k) or y.shape != (g.m,):
        raise ValueError(f"shape mismatch: x {x.shape}, y {y.shape} for n={g.n}, m={g.m}, k={k}")
    checks = []
    checks.append(("assignment", np.abs(x.sum(axis=1) - 1.0), lambda i: f"vertex {i}"))
    checks.append(("x box", np.maximum(-x, x - 1.0).ravel(), lambda i: f"x[{i // k}, {i % k}]"))
    if g.m:
        checks.append(("y box", np.maximum(-y, y - 1.0), lambda i: f"edge {g.edges[i][:2]}"))
        eu = np.array([u for u, _, _ in g.edges])
        ev = np.array([v for _, v, _ in g.edges])
        xu, xv, yy = x[eu], x[ev], y[:, None]
        where = lambda i: f"edge {g.edges[i // k][:2]} part {i % k}"  # noqa: E731
        checks.append(("diff u-v", (xu - xv - yy).ravel(), where))
        checks.append(("diff v-u", (xv - xu - yy).ravel(), where))
        checks.append(("same part", (xu + xv + yy - 2.0).ravel(), where))
    return _summarise(checks, tol)


def _summarise(checks, tol) -> Membership:
    worst, witness = -math.inf, ""
    for label, viol, where in checks:
        if viol.size == 0:
            continue
        i = int(np.argmax(viol))
        if viol[i] > worst:
            worst, witness = float(viol[i]), f"{label} at {where(i)}"
    if worst == -math.inf:
        return Membership(True, 0.0, "")
    ok = worst <= tol
    return Membership(ok, worst, "" if ok else witness)


@lru_cache(maxsize=64)
def _triangle_index(n):
    pos = {p: i for i, p in enumerate(combinations(range(n), 2))}
    tris = list(combinations(range(n), 3))
    if not tris:
        return tris, np.zeros((0, 3), dtype=int)
    idx = np.array([[pos[u, v], pos[v, w], pos[u, w]] for u, v, w in tris])
    return tris, idx


@lru_cache(maxsize=64)
def _clique_index(n, size):
    pos = {p: i for i, p in enumerate(combinations(range(n), 2))}
    subsets = list(combinations(range(n), size))
    if not subsets:
        return subsets, np.zeros((0, 0), dtype=int)
    idx = np.array([[pos[p] for p in combinations(Q, 2)] for Q in subsets])
    return subsets, idx


def member_emilo(z, n: int, k: int, tol: float = LINEAR_TOL, clique_mode: str = "auto") -> Membership:
    """Check z (over all vertex pairs) against the edge-based relaxation:
    three triangle orientations per triple, (k+1)-subset rows, [0, 1] box."""
    z = np.asarray(z, dtype=float)
    if z.shape != (math.comb(n, 2),):
        raise ValueError(f"z must have C({n}, 2) entries, got shape {z.shape}")
    pairs = list(combinations(range(n), 2))
    checks = [("z box", np.maximum(-z, z - 1.0), lambda i: f"pair {pairs[i]}")]
    tris, tidx = _triangle_index(n)
    if tris:
        uv, vw, uw = z[tidx[:, 0]], z[tidx[:, 1]], z[tidx[:, 2]]
        where = lambda i: f"triple {tris[i]}"  # noqa: E731
        checks.append(("triangle uv+vw-uw", uv + vw - uw - 1.0, where))
        checks.append(("triangle uw+uv-vw", uw + uv - vw - 1.0, where))
        checks.append(("triangle vw+uw-uv", vw + uw - uv - 1.0, where))
    n_sub = math.comb(n, k + 1)
    if n_sub and (clique_mode == "exact" or (clique_mode == "auto" and n_sub <= 200_000)):
        subsets, cidx = _clique_index(n, k + 1)
        checks.append(("clique", 1.0 - z[cidx].sum(axis=1), lambda i: f"subset {subsets[i]}"))
    elif n_sub:
        Z = pair_vector_to_matrix(z, n)
        found = separate_clique_cuts(Z, k, range(n), n=n, mode="greedy", max_cuts=1)
        if found:
            Q, mass = found[0]
            checks.append(("clique", np.array([1.0 - mass]), lambda i: f"subset {Q}"))
    return _summarise(checks, tol)


def member_misdo(Z, k: int, variant: str = "I", tol: float = PSD_TOL) -> Membership:
    """Unit diagonal, entry range, and the PSD condition (kZ - ee^T for I, Zbar for II)."""
    Z = np.asarray(Z, dtype=float)
    n = Z.shape[0]
    if Z.shape != (n, n) or not np.allclose(Z, Z.T, atol=1e-12, rtol=0):
        raise ValueError("Z must be a symmetric square matrix")
    variant = str(variant).upper()
    lo = 0.0 if variant == "I" else -1.0 / (k - 1)
    off = ~np.eye(n, dtype=bool)
    checks = [
        ("diagonal", np.abs(np.diag(Z) - 1.0), lambda i: f"({i}, {i})"),
        ("entry range", np.maximum(lo - Z[off], Z[off] - 1.0), lambda i: f"off-diagonal #{i}"),
    ]
    res = _summarise(checks, LINEAR_TOL)
    M = k * Z - np.ones((n, n)) if variant == "I" else Z
    psd = is_psd(M, tol=tol)
    if not psd.ok:
        return Membership(False, max(res.violation, -psd.min_eigenvalue),
                          f"PSD: lambda_min = {psd.min_eigenvalue:.3e}")
    return res


def member_misdo_many(Zs, k: int, variant: str = "I", tol: float = PSD_TOL) -> list[Membership]:
    """Vectorised :func:`member_misdo` over a stack ``(count, n, n)``."""
    Zs = np.asarray(Zs, dtype=float)
    count, n, _ = Zs.shape
    variant = str(variant).upper()
    lo = 0.0 if variant == "I" else -1.0 / (k - 1)
    off = ~np.eye(n, dtype=bool)
    diag = np.abs(np.diagonal(Zs, axis1=1, axis2=2) - 1.0).max(axis=1)
    offv = Zs[:, off]
    rng_v = np.maximum(lo - offv, offv - 1.0).max(axis=1) if n > 1 else np.zeros(count)
    asym = np.abs(Zs - np.swapaxes(Zs, 1, 2)).max(axis=(1, 2))
    M = k * Zs - np.ones((n, n)) if variant == "I" else Zs
    psd = is_psd(M, tol=tol)
    ok_arr = np.atleast_1d(psd.ok)
    lam = np.atleast_1d(psd.min_eigenvalue)
    out = []
    for i in range(count):
        if asym[i] > 1e-12:
            out.append(Membership(False, float(asym[i]), "not symmetric"))
        elif not ok_arr[i]:
            out.append(Membership(False, float(-lam[i]), f"PSD: lambda_min = {lam[i]:.3e}"))
        elif diag[i] > LINEAR_TOL:
            out.append(Membership(False, float(diag[i]), "diagonal"))
        elif rng_v[i] > LINEAR_TOL:
            out.append(Membership(False, float(rng_v[i]), "entry range"))
        else:
            out.append(Membership(True, float(max(diag[i], rng_v[i], -lam[i])), ""))
    return out


def bilinear_inequality_check(a) -> float:
    """1 - sum a_i + sum_{i<j} a_i a_j, which is non-negative on [0, 1]^s."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or a.size < 2:
        raise ValueError("need a vector with at least two entries")
    iu, iv = np.triu_indices(a.size, 1)
    return float(1.0 - a.sum() + (a[iu] * a[iv]).sum())


def bilinear_inequality_batch(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    iu, iv = np.triu_indices(A.shape[1], 1)
    return 1.0 - A.sum(axis=1) + (A[:, iu] * A[:, iv]).sum(axis=1)


def counterexample_vmilo_point(g: Graph, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Every row (0.5, 0.5, 0, ..., 0) and y = 1: inside the vertex-based
    relaxation but half a unit away from the true lift on every edge."""
    if k < 2:
        raise BadDims(f"k must be >= 2, got {k}")
    x = np.zeros((g.n, k))
    x[:, :2] = 0.5
    if g.m == 0:
        warnings.warn("edgeless graph: the counterexample is vacuous", stacklevel=2)
    return x, np.ones(g.m)


def counterexample_emilo_point(n: int, k: int) -> np.ndarray:
    """Constant z = 2 / (k (k + 1)): tight on every (k+1)-subset row."""
    if n <= k:
        raise BadDims(f"need n > k, got n={n}, k={k}")
    return np.full(math.comb(n, 2), 2.0 / (k * (k + 1)))


def simplex_grid(k: int, steps: int) -> np.ndarray:
    """All rows with entries in multiples of 1/steps summing to 1."""
    rows = []

    def rec(prefix, left):
        if len(prefix) == k - 1:
            rows.append(prefix + [left])
            return
        for a in range(left, -1, -1):
            rec(prefix + [a], left - a)

    rec([], steps)
    return np.array(rows, dtype=float) / steps


def preimage_search(z_target, n: int, k: int, grid_step: float, tol: float):
    """Search simplex-grid assignments whose z-lift is within ``tol`` of ``z_target``.

    Vertex 0 is restricted to non-increasing rows (labels can be permuted).
    Vertices are fixed one at a time and only grid rows compatible with every
    vertex fixed so far are tried, so most of the n-fold grid is never
    visited. The 10^8 cap applies to row evaluations performed by the search.
    Returns the found ``(n, k)`` array, or ``None`` once the grid is exhausted.
    """
    if not 0 < grid_step <= 0.5:
        raise ValueError("grid_step must lie in (0, 0.5]")
    steps = round(1.0 / grid_step)
    if abs(steps * grid_step - 1.0) > 1e-9:
        raise ValueError("grid_step must divide 1")
    if math.comb(steps + k - 1, k - 1) > GRID_ROW_CAP:
        raise GridTooLarge(f"row grid C({steps + k - 1}, {k - 1}) exceeds {GRID_ROW_CAP}")
    R = simplex_grid(k, steps)
    Zt = pair_vector_to_matrix(np.asarray(z_target, dtype=float), n)
    chosen = np.zeros((n, k))
    spent = 0

    def candidates(w):
        nonlocal spent
        spent += R.shape[0] * w
        if spent > SEARCH_BUDGET:
            raise GridTooLarge(f"search exceeded {SEARCH_BUDGET} row evaluations")
        dots = R @ chosen[:w].T
        return np.nonzero(np.all(np.abs(dots - Zt[:w, w]) <= tol, axis=1))[0]

    def rec(w):
        if w == n:
            return True
        for idx in candidates(w):
            chosen[w] = R[idx]
            if rec(w + 1):
                return True
        return False

    for row in R[np.all(np.diff(R, axis=1) <= 1e-12, axis=1)]:
        chosen[0] = row
        if rec(1):
            return chosen.copy()
    return None
