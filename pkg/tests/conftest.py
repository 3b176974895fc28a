from __future__ import annotations

import numpy as np
import pytest

from kcutlab.graph import Graph, gen_instance


def linprog_max(problem):
    """Independent LP oracle (HiGHS through scipy) for an LpProblem."""
    from scipy.optimize import linprog

    A = np.atleast_2d(problem.A)
    ub_rows, ub_rhs, eq_rows, eq_rhs = [], [], [], []
    for a, s, b in zip(A, problem.senses, problem.b):
        if s == "<=":
            ub_rows.append(a), ub_rhs.append(b)
        elif s == ">=":
            ub_rows.append(-a), ub_rhs.append(-b)
        else:
            eq_rows.append(a), eq_rhs.append(b)
    res = linprog(
        -problem.c,
        A_ub=np.array(ub_rows) if ub_rows else None,
        b_ub=np.array(ub_rhs) if ub_rows else None,
        A_eq=np.array(eq_rows) if eq_rows else None,
        b_eq=np.array(eq_rhs) if eq_rows else None,
        bounds=list(zip(problem.lb, problem.ub)),
        method="highs",
    )
    assert res.status == 0, res.message
    return -res.fun + problem.offset


def random_corpus(count, seed, n_range=(3, 9), mixed=True):
    """Seeded random graphs with integer weights (mixed signs by default)."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        p = float(rng.choice([0.3, 0.5, 0.8, 1.0]))
        params = {"n": n, "p": p, "wmin": -3 if mixed else 1, "wmax": 5}
        out.append(gen_instance("random", params, seed * 1000 + i))
    return out


@pytest.fixture
def k3():
    return Graph.from_edges(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)])


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion that ran in this session."""
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for i in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.summary_line(i))
