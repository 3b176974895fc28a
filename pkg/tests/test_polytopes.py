from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kcutlab.errors import BadDims, GridTooLarge
from kcutlab.graph import Graph, complete_graph, cycle_graph
from kcutlab.linalg import jacobi_eigenvalues
from kcutlab.polytopes import (
    bilinear_inequality_batch,
    bilinear_inequality_check,
    counterexample_emilo_point,
    counterexample_vmilo_point,
    lift,
    member_emilo,
    member_misdo,
    member_misdo_many,
    member_vmilo,
    pair_vector_to_matrix,
    preimage_search,
    sample_fractional_x,
    simplex_grid,
)


def test_sampling_examples():
    for x in sample_fractional_x(2, 2, seed=3, count=10):
        assert np.allclose(x.sum(axis=1), 1.0, atol=1e-12)
    integral, uniform, mixed = sample_fractional_x(5, 3, seed=1, count=3)
    assert set(np.unique(integral)) <= {0.0, 1.0}
    assert np.allclose(uniform, 1 / 3)
    assert np.allclose(mixed[0], 1 / 3) and set(np.unique(mixed[1:])) <= {0.0, 1.0}
    a = sample_fractional_x(4, 3, seed=9, count=20)
    b = sample_fractional_x(4, 3, seed=9, count=20)
    assert all(np.array_equal(p, q) for p, q in zip(a, b))
    with pytest.raises(ValueError):
        sample_fractional_x(3, 2, 0, 0)


def test_lift_examples(k3):
    x = np.eye(2)[[0, 0, 1]]
    assert lift(x, k3, "y").payload.tolist() == [0.0, 1.0, 1.0]
    u = np.full((4, 3), 1 / 3)
    assert np.allclose(lift(u, None, "z").payload, 1 / 3)
    half = np.full((3, 2), 0.5)
    Z = lift(half, None, "Z").payload
    assert np.allclose(Z, np.eye(3) + 0.5 * (np.ones((3, 3)) - np.eye(3)))
    # with the diagonal correction 2Z - ee^T is the identity ...
    assert np.allclose(jacobi_eigenvalues(2 * Z - np.ones((3, 3))), [1, 1, 1])
    # ... while the uncorrected k sum x_j x_j^T - ee^T is singular
    assert jacobi_eigenvalues(2 * half @ half.T - np.ones((3, 3)))[0] == pytest.approx(0, abs=1e-9)
    with pytest.raises(ValueError):
        lift(half, None, "y")
    with pytest.raises(ValueError):
        lift(half, None, "w")


def test_lift_consistency_at_integral_points():
    rng = np.random.default_rng(0)
    g = complete_graph(5)
    for k in (2, 3, 4):
        x = np.eye(k)[rng.integers(0, k, 5)]
        y, z = lift(x, g, "y").payload, lift(x, None, "z").payload
        Z, Zb = lift(x, None, "Z").payload, lift(x, None, "Zbar").payload
        assert np.allclose(z, 1 - y)  # complete graph: edge order is pair order
        assert np.allclose(pair_vector_to_matrix(z, 5) + np.eye(5), Z)
        assert np.allclose(Zb, (k * Z - 1) / (k - 1))


def test_vmilo_membership_examples(k3):
    for k in (2, 4):
        x, y = counterexample_vmilo_point(k3, k)
        assert x[0].tolist() == [0.5, 0.5] + [0.0] * (k - 2)
        assert member_vmilo(k3, k, x, y).ok
        assert np.allclose(np.abs(y - lift(x, k3, "y").payload), 0.5)
    split = np.eye(2)[[0, 1, 0]]
    res = member_vmilo(k3, 2, split, np.zeros(3))
    assert not res.ok and res.witness.startswith("diff")
    with pytest.warns(UserWarning):
        x, y = counterexample_vmilo_point(Graph(3, ()), 2)
    assert y.size == 0


def test_emilo_membership_examples():
    z = counterexample_emilo_point(3, 2)
    assert np.allclose(z, 1 / 3) and member_emilo(z, 3, 2).ok
    z = counterexample_emilo_point(4, 3)
    assert np.allclose(z, 1 / 6) and math.comb(4, 2) * z[0] == pytest.approx(1.0)
    assert member_emilo(z, 4, 3).ok
    with pytest.raises(BadDims):
        counterexample_emilo_point(2, 2)
    res = member_emilo(np.array([1.0, 0.0, 1.0]), 3, 2)  # z01 = z12 = 1, z02 = 0
    assert not res.ok and "triangle" in res.witness


def test_emilo_clique_violation_found_by_both_modes():
    z = np.zeros(math.comb(12, 2))
    for mode in ("exact", "greedy"):
        res = member_emilo(z, 12, 2, clique_mode=mode)
        assert not res.ok and "clique" in res.witness


def test_misdo_membership_examples():
    res = member_misdo(np.eye(3), 2, "I")
    assert not res.ok and res.violation == pytest.approx(1.0)
    for x in sample_fractional_x(5, 3, seed=2, count=20):
        assert member_misdo(lift(x, None, "Z").payload, 3, "I").ok
        assert member_misdo(lift(x, None, "Zbar").payload, 3, "II").ok
    with pytest.raises(ValueError):
        member_misdo(np.array([[1.0, 0.2], [0.0, 1.0]]), 2)


def test_misdo_batch_matches_single():
    rng = np.random.default_rng(4)
    stack = []
    for x in sample_fractional_x(4, 3, seed=5, count=15):
        Z = lift(x, None, "Z").payload
        if rng.random() < 0.4:
            Z = Z.copy()
            Z[0, 1] = Z[1, 0] = 0.0
            Z[0, 2] = Z[2, 0] = 0.0
        stack.append(Z)
    batch = member_misdo_many(np.array(stack), 3, "I")
    assert [b.ok for b in batch] == [member_misdo(Z, 3, "I").ok for Z in stack]


def test_bilinear_examples():
    assert bilinear_inequality_check([1, 1]) == 0
    assert bilinear_inequality_check([0.5, 0.5]) == 0.25
    assert bilinear_inequality_check([1, 1, 1]) == 1
    with pytest.raises(ValueError):
        bilinear_inequality_check([0.3])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=2, max_size=8))
def test_bilinear_nonnegative(a):
    assert bilinear_inequality_check(a) >= -1e-12
    assert bilinear_inequality_batch(np.array([a]))[0] == pytest.approx(bilinear_inequality_check(a))


@settings(max_examples=80, deadline=None)
@given(n=st.integers(3, 8), k=st.integers(2, 4), seed=st.integers(0, 10**6))
def test_lifts_land_in_every_relaxation(n, k, seed):
    g = cycle_graph(n)
    for x in sample_fractional_x(n, k, seed, 5):
        y = lift(x, g, "y").payload
        assert np.all(y >= -1e-12) and np.all(y <= 1 + 1e-12)
        assert member_vmilo(g, k, x, y).ok
        assert member_emilo(lift(x, None, "z").payload, n, k).ok
        assert member_misdo(lift(x, None, "Z").payload, k, "I").ok
        assert member_misdo(lift(x, None, "Zbar").payload, k, "II").ok


def test_simplex_grid():
    R = simplex_grid(3, 4)
    assert len(R) == math.comb(6, 2)
    assert np.allclose(R.sum(axis=1), 1.0)


def test_preimage_finds_grid_points():
    rng = np.random.default_rng(7)
    for n, k in [(3, 2), (4, 3), (5, 2)]:
        R = simplex_grid(k, 10)
        x = R[rng.integers(0, len(R), n)]
        z = lift(x, None, "z").payload
        found = preimage_search(z, n, k, 0.1, 1e-9)
        assert found is not None
        assert np.allclose(lift(found, None, "z").payload, z)


@pytest.mark.parametrize("n, k, step", [(3, 2, 0.01), (4, 3, 0.05)])
def test_preimage_exhausts_on_counterexample(n, k, step):
    assert preimage_search(counterexample_emilo_point(n, k), n, k, step, 0.02) is None


def test_preimage_argument_checks():
    z = counterexample_emilo_point(4, 3)
    with pytest.raises(ValueError):
        preimage_search(z, 4, 3, 0.6, 0.01)
    with pytest.raises(ValueError):
        preimage_search(z, 4, 3, 0.03, 0.01)
    with pytest.raises(GridTooLarge):
        preimage_search(np.zeros(math.comb(4, 2)), 4, 6, 0.001, 0.01)


def test_preimage_search_budget(monkeypatch):
    import kcutlab.polytopes as poly

    monkeypatch.setattr(poly, "SEARCH_BUDGET", 1000)
    with pytest.raises(GridTooLarge):
        poly.preimage_search(counterexample_emilo_point(4, 3), 4, 3, 0.02, 0.01)
