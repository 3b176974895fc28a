"""Sampled certification of the relaxation inclusions and the rounding bound.

Each ``certify_*`` function returns a :class:`Report` made of named checks.
A check counts how many sampled cases it examined, how many failed, and the
worst violation seen (positive means violated).
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from itertools import combinations, product

import numpy as np

from .exact import brute_force_opt
from .formulations import cut_value
from .graph import complete_graph, gen_instance
from .linalg import is_psd
from .polytopes import (
    bilinear_inequality_batch,
    counterexample_emilo_point,
    counterexample_vmilo_point,
    lift,
    member_emilo,
    member_misdo_many,
    member_vmilo,
    preimage_search,
    sample_fractional_x,
)
from .relaxations import bqo_objective, multistart_ascent, round_fractional

SAMPLE_GRID = tuple(product(range(3, 9), (2, 3, 4)))
THEOREMS = ("1", "2", "3", "4", "lemma1")


@dataclass
class Check:
    name: str
    count: int = 0
    failures: int = 0
    worst: float = float("-inf")
    witness: str = ""

    def record(self, violation: float, failed: bool, witness: str = ""):
        self.count += 1
        if failed:
            self.failures += 1
            if not self.witness:
                self.witness = witness
        if violation > self.worst:
            self.worst = float(violation)

    @property
    def ok(self) -> bool:
        return self.failures == 0 and self.count > 0


@dataclass
class Report:
    theorem: str
    samples: int
    seed: int
    checks: list[Check] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def check(self, name) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        c = Check(name)
        self.checks.append(c)
        return c

    def to_dict(self):
        d = asdict(self)
        d["passed"] = self.passed
        for c in d["checks"]:
            if c["worst"] == float("-inf"):
                c["worst"] = None
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _split_samples(total):
    """Spread ``total`` samples over the (n, k) grid as evenly as possible."""
    base, extra = divmod(total, len(SAMPLE_GRID))
    for i, (n, k) in enumerate(SAMPLE_GRID):
        cnt = base + (i < extra)
        if cnt:
            yield i, n, k, cnt


def _mixed_graph(n, seed):
    return gen_instance("random", {"n": n, "p": 0.7, "wmin": -3, "wmax": 5}, seed)


def certify_rounding(samples: int = 10_000, seed: int = 0, corpus: int = 50,
                     starts: int = 32, match_rate: float = 0.95) -> Report:
    """Rounded cut value never falls below the quadratic objective at x, and
    the multistart heuristic finds the optimum on most small instances."""
    t0 = time.perf_counter()
    rep = Report("1", samples, seed)
    mono = rep.check("rounding does not decrease the objective")
    for i, n, k, cnt in _split_samples(samples):
        g = _mixed_graph(n, seed * 1000 + i)
        for x in sample_fractional_x(n, k, seed * 1000 + i, cnt):
            before = bqo_objective(g, x)
            after = cut_value(g, round_fractional(g, k, x))
            gap = before - after
            mono.record(gap, gap > 1e-9, f"n={n} k={k}: {after} < {before}")
    hits = 0
    for i in range(corpus):
        n, k = 4 + i % 5, 2 + i % 3
        g = _mixed_graph(n, 10_000 + seed * 1000 + i)
        best, _ = multistart_ascent(g, k, starts=starts, seed=seed + i)
        opt, _ = brute_force_opt(g, k)
        hits += abs(best - opt) <= 1e-9
    ms = rep.check(f"multistart optimum rate >= {match_rate}")
    rate = hits / corpus
    ms.record(match_rate - rate, rate < match_rate, f"rate {rate:.3f}")
    rep.seconds = time.perf_counter() - t0
    return rep


def certify_lemma1(samples: int = 100_000, seed: int = 0) -> Report:
    """1 - sum a + sum_{i<j} a_i a_j >= 0 on the unit cube, tight on unit pairs."""
    t0 = time.perf_counter()
    rep = Report("lemma1", samples, seed)
    rng = np.random.default_rng(seed)
    for s in range(2, 9):
        c = rep.check(f"non-negative, s={s}")
        vals = bilinear_inequality_batch(rng.random((samples, s)))
        i = int(np.argmin(vals))
        c.count = samples
        c.failures = int((vals < -1e-12).sum())
        c.worst = float(-vals[i])
        if c.failures:
            c.witness = f"value {vals[i]:.3e}"
        eq = rep.check(f"zero at unit pairs, s={s}")
        for a, b in combinations(range(s), 2):
            e = np.zeros(s)
            e[[a, b]] = 1.0
            v = float(bilinear_inequality_batch(e[None])[0])
            eq.record(abs(v), v != 0.0, f"pair ({a}, {b}) gives {v}")
    rep.seconds = time.perf_counter() - t0
    return rep


def certify_vmilo(samples: int = 10_000, seed: int = 0) -> Report:
    t0 = time.perf_counter()
    rep = Report("2", samples, seed)
    inc = rep.check("lifted points satisfy the vertex-based relaxation")
    box = rep.check("lifted y lies in [0, 1]")
    for i, n, k, cnt in _split_samples(samples):
        g = complete_graph(n)
        for x in sample_fractional_x(n, k, seed * 1000 + i, cnt):
            y = lift(x, g, "y").payload
            res = member_vmilo(g, k, x, y)
            inc.record(res.violation, not res.ok, f"n={n} k={k}: {res.witness}")
            v = float(max(-y.min(), y.max() - 1.0))
            box.record(v, v > 1e-12, f"n={n} k={k}: y range [{y.min()}, {y.max()}]")
    strict = rep.check("counterexample inside relaxation, off the lift by 0.5")
    for k in (2, 3, 4):
        g = complete_graph(3)
        x, y = counterexample_vmilo_point(g, k)
        res = member_vmilo(g, k, x, y)
        dev = np.abs(y - lift(x, g, "y").payload)
        bad = not res.ok or not np.allclose(dev, 0.5, rtol=0, atol=1e-15)
        strict.record(max(res.violation, float(np.abs(dev - 0.5).max())), bad,
                      f"k={k}: member={res.ok}, deviations {dev.tolist()}")
    rep.seconds = time.perf_counter() - t0
    return rep


PREIMAGE_CASES = ((3, 2), (4, 2), (4, 3))


def certify_emilo(samples: int = 10_000, seed: int = 0, grid_step: float = 0.02,
                  tol: float = 0.01) -> Report:
    t0 = time.perf_counter()
    rep = Report("3", samples, seed)
    inc = rep.check("lifted z satisfies the edge-based relaxation")
    box = rep.check("lifted z lies in [0, 1]")
    for i, n, k, cnt in _split_samples(samples):
        for x in sample_fractional_x(n, k, seed * 1000 + i, cnt):
            z = lift(x, None, "z").payload
            res = member_emilo(z, n, k)
            inc.record(res.violation, not res.ok, f"n={n} k={k}: {res.witness}")
            v = float(max(-z.min(), z.max() - 1.0))
            box.record(v, v > 1e-12, f"n={n} k={k}: z range [{z.min()}, {z.max()}]")
    cx = rep.check("constant counterexample inside relaxation")
    pre = rep.check(f"no grid preimage (step {grid_step}, tol {tol})")
    for n, k in PREIMAGE_CASES:
        z = counterexample_emilo_point(n, k)
        res = member_emilo(z, n, k)
        cx.record(res.violation, not res.ok, f"n={n} k={k}: {res.witness}")
        found = preimage_search(z, n, k, grid_step, tol)
        pre.record(0.0, found is not None, f"n={n} k={k}: preimage {None if found is None else found.tolist()}")
    rep.seconds = time.perf_counter() - t0
    return rep


def certify_misdo(samples: int = 10_000, seed: int = 0, tol: float = 1e-8) -> Report:
    t0 = time.perf_counter()
    rep = Report("4", samples, seed)
    c1 = rep.check("lifted Z satisfies the variant I semidefinite relaxation")
    c2 = rep.check("lifted Zbar satisfies the variant II semidefinite relaxation")
    core = rep.check("k sum x_j x_j^T - ee^T is PSD without the diagonal correction")
    for i, n, k, cnt in _split_samples(samples):
        xs = sample_fractional_x(n, k, seed * 1000 + i, cnt)
        for variant, chk, label in (("Z", c1, "I"), ("Zbar", c2, "II")):
            stack = np.array([lift(x, None, variant).payload for x in xs])
            for res in member_misdo_many(stack, k, label, tol=tol):
                chk.record(res.violation, not res.ok, f"n={n} k={k}: {res.witness}")
        X = np.array(xs)
        M = k * np.einsum("sij,skj->sik", X, X) - 1.0
        psd = is_psd(M, tol=tol)
        for ok, lam in zip(np.atleast_1d(psd.ok), np.atleast_1d(psd.min_eigenvalue)):
            core.record(float(-lam), not ok, f"n={n} k={k}: lambda_min {lam:.3e}")
    rep.seconds = time.perf_counter() - t0
    return rep


def certify(theorem: str, samples: int | None = None, seed: int = 0) -> Report:
    theorem = str(theorem).lower()
    if theorem == "lemma1":
        return certify_lemma1(samples or 100_000, seed)
    funcs = {"1": certify_rounding, "2": certify_vmilo, "3": certify_emilo, "4": certify_misdo}
    if theorem not in funcs:
        raise ValueError(f"theorem must be one of {THEOREMS}, got {theorem!r}")
    return funcs[theorem](samples or 10_000, seed)

