from __future__ import annotations

import numpy as np
import pytest

from kcutlab.errors import NoConvergence
from kcutlab.linalg import is_psd, jacobi_eigenvalues, symmetric_from_upper


def test_examples():
    assert np.allclose(jacobi_eigenvalues(np.eye(3)), [1, 1, 1])
    assert np.allclose(jacobi_eigenvalues(np.ones((3, 3))), [0, 0, 3], atol=1e-12)
    assert np.allclose(jacobi_eigenvalues(np.array([[2.0, 1.0], [1.0, 2.0]])), [1, 3])


def _z(t):
    return np.eye(3) + t * (np.ones((3, 3)) - np.eye(3))


def test_psd_examples():
    res = is_psd(2 * _z(0.25) - np.ones((3, 3)))
    assert res.ok and abs(res.min_eigenvalue) <= 1e-9
    res = is_psd(2 * _z(0.2) - np.ones((3, 3)))
    assert not res.ok and res.min_eigenvalue == pytest.approx(-0.2, abs=1e-12)
    assert is_psd(np.zeros((3, 3))).ok


def test_matches_eigvalsh_and_trace():
    rng = np.random.default_rng(0)
    for n in (1, 2, 5, 9, 20):
        a = rng.normal(size=(n, n))
        a = a + a.T
        lam = jacobi_eigenvalues(a, tol=1e-12)
        assert np.allclose(lam, np.linalg.eigvalsh(a), atol=1e-10)
        assert abs(lam.sum() - np.trace(a)) <= 1e-10 * max(1, abs(np.trace(a)))


def test_batched_matches_single():
    rng = np.random.default_rng(1)
    a = rng.normal(size=(50, 6, 6))
    a = a + np.swapaxes(a, 1, 2)
    batch = jacobi_eigenvalues(a)
    single = np.array([jacobi_eigenvalues(m) for m in a])
    assert np.allclose(batch, single, atol=1e-10)
    assert np.allclose(batch, np.linalg.eigvalsh(a), atol=1e-9)
    checks = is_psd(a)
    assert checks.ok.shape == (50,)


def test_permutation_invariance():
    rng = np.random.default_rng(2)
    a = rng.normal(size=(6, 6))
    a = a + a.T
    P = np.eye(6)[rng.permutation(6)]
    assert np.allclose(jacobi_eigenvalues(a), jacobi_eigenvalues(P @ a @ P.T), atol=1e-10)


def test_reads_upper_triangle_only():
    a = np.array([[1.0, 2.0], [99.0, 1.0]])
    assert np.allclose(symmetric_from_upper(a), [[1, 2], [2, 1]])
    assert np.allclose(jacobi_eigenvalues(a), [-1, 3])


def test_tiny_off_diagonal_no_overflow():
    a = np.array([[1.0, 1e-200], [1e-200, 2.0]])
    with np.errstate(over="raise", invalid="raise"):
        assert np.allclose(jacobi_eigenvalues(a), [1, 2])
        assert np.allclose(jacobi_eigenvalues(np.array([a, a])), [[1, 2], [1, 2]])


def test_bad_args():
    with pytest.raises(ValueError):
        jacobi_eigenvalues(np.eye(2), tol=0)
    with pytest.raises(ValueError):
        is_psd(np.eye(2), tol=-1)


def test_no_convergence_is_reported(monkeypatch):
    import kcutlab.linalg as la

    monkeypatch.setattr(la, "MAX_SWEEPS", 0)
    with pytest.raises(NoConvergence):
        la.jacobi_eigenvalues(np.array([[1.0, 1.0], [1.0, 3.0]]))
