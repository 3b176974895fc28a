"""Symmetric eigenvalues by cyclic Jacobi rotations, and PSD certification.

All routines accept a single ``(n, n)`` matrix or a stack ``(..., n, n)``;
stacks are rotated in lock-step, which keeps the per-matrix cost low when
certifying thousands of small lifted matrices.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import NoConvergence

DEFAULT_TOL = 1e-9
MAX_SWEEPS = 100


def symmetric_from_upper(a) -> np.ndarray:
    """Mirror the upper triangle (diagonal included) onto the lower one."""
    a = np.asarray(a, dtype=float)
    upper = np.triu(a)
    return upper + np.swapaxes(np.triu(a, 1), -1, -2)


def _offdiag_max(a):
    n = a.shape[-1]
    mask = ~np.eye(n, dtype=bool)
    return np.abs(a[..., mask]).max(axis=-1) if n > 1 else np.zeros(a.shape[:-2])


def jacobi_eigenvalues(a, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Eigenvalues of symmetric ``a`` in ascending order.

    Only the upper triangle of ``a`` is read. Sweeps run row-cyclically over
    (p, q) until the largest off-diagonal magnitude drops below
    ``tol * max(1, ||a||_F)``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    A = symmetric_from_upper(a)
    if A.ndim == 2:
        return _jacobi_single(A, tol)
    batch_shape = A.shape[:-2]
    n = A.shape[-1]
    A = A.reshape(-1, n, n).copy()
    trace = np.trace(A, axis1=1, axis2=2)

    thresh = tol * np.maximum(1.0, np.linalg.norm(A, axis=(1, 2)))
    for _ in range(MAX_SWEEPS):
        if np.all(_offdiag_max(A) <= thresh):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[:, p, q]
                active = np.abs(apq) > 1e-300
                if not active.any():
                    continue
                safe = np.where(active, apq, 1.0)
                theta = (A[:, q, q] - A[:, p, p]) / (2.0 * safe)
                big = np.abs(theta) > 1e150
                th = np.where(big, 1.0, theta)
                t = np.sign(th) / (np.abs(th) + np.sqrt(th * th + 1.0))
                # for huge theta, t -> 1 / (2 theta); avoids squaring overflow
                t = np.where(big, 0.5 / np.where(big, theta, 1.0), t)
                t = np.where(theta == 0.0, 1.0, t)
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # A <- P^T A P with P = [[c, s], [-s, c]] on coordinates (p, q)
                colp = A[:, :, p].copy()
                colq = A[:, :, q]
                A[:, :, p] = c[:, None] * colp - s[:, None] * colq
                A[:, :, q] = s[:, None] * colp + c[:, None] * colq
                rowp = A[:, p, :].copy()
                rowq = A[:, q, :]
                A[:, p, :] = c[:, None] * rowp - s[:, None] * rowq
                A[:, q, :] = s[:, None] * rowp + c[:, None] * rowq
                A[active, p, q] = 0.0
                A[active, q, p] = 0.0
    else:
        if not np.all(_offdiag_max(A) <= thresh):
            raise NoConvergence(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")

    eig = np.sort(np.diagonal(A, axis1=1, axis2=2), axis=-1)
    drift = np.abs(eig.sum(axis=-1) - trace)
    if np.any(drift > 1e-10 * np.maximum(1.0, np.abs(trace))):
        raise NoConvergence("eigenvalue sum drifted from the trace")
    return eig.reshape(*batch_shape, n)


def _jacobi_single(A, tol):
    A = A.copy()
    n = A.shape[0]
    trace = float(np.trace(A))
    thresh = tol * max(1.0, float(np.linalg.norm(A)))
    off = ~np.eye(n, dtype=bool)
    for _ in range(MAX_SWEEPS):
        if n == 1 or np.abs(A[off]).max() <= thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if theta == 0.0:
                    t = 1.0
                elif abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = (1.0 if theta > 0 else -1.0) / (abs(theta) + (theta * theta + 1.0) ** 0.5)
                c = 1.0 / (t * t + 1.0) ** 0.5
                s = t * c
                colp = A[:, p].copy()
                A[:, p] = c * colp - s * A[:, q]
                A[:, q] = s * colp + c * A[:, q]
                rowp = A[p, :].copy()
                A[p, :] = c * rowp - s * A[q, :]
                A[q, :] = s * rowp + c * A[q, :]
                A[p, q] = A[q, p] = 0.0
    else:
        if np.abs(A[off]).max() > thresh:
            raise NoConvergence(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")
    eig = np.sort(np.diag(A))
    if abs(eig.sum() - trace) > 1e-10 * max(1.0, abs(trace)):
        raise NoConvergence("eigenvalue sum drifted from the trace")
    return eig


class PsdCheck(NamedTuple):
    ok: bool | np.ndarray
    min_eigenvalue: float | np.ndarray

    def __bool__(self):
        return bool(np.all(self.ok))


def is_psd(a, tol: float = DEFAULT_TOL) -> PsdCheck:
    """PSD test: ``lambda_min >= -tol * max(1, ||a||_F)``.

    For a stack, ``ok`` and ``min_eigenvalue`` are arrays over the stack.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    A = symmetric_from_upper(a)
    # rotate well past the decision threshold so the eigenvalue error is negligible
    jac_tol = max(1e-3 * min(tol, DEFAULT_TOL), 1e-14)
    lam = jacobi_eigenvalues(A, tol=jac_tol)[..., 0]
    scale = np.maximum(1.0, np.linalg.norm(A, axis=(-2, -1)))
    ok = lam >= -tol * scale
    if np.ndim(ok) == 0:
        return PsdCheck(bool(ok), float(lam))
    return PsdCheck(ok, lam)
