"""Cyclic Jacobi eigensolver for small dense symmetric matrices."""

from __future__ import annotations

import numpy as np

from .errors import ConvergenceFailure


def off_diagonal_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off * off)))


def jacobi_eigh(a, tol: float = 1e-12, max_sweeps: int = 100):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps over all ``(p, q)`` pairs until the Frobenius norm of the
    off-diagonal part drops below ``tol``.

    Returns
    -------
    eigenvalues : ndarray, shape (n,)
        Unsorted, in the order of the diagonal after convergence.
    eigenvectors : ndarray, shape (n, n)
        Orthonormal columns; ``a @ v[:, k] == eigenvalues[k] * v[:, k]``.
    """
    a = np.array(a, dtype=np.float64, copy=True)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    a = 0.5 * (a + a.T)
    v = np.eye(n)
    for _ in range(max_sweeps):
        if off_diagonal_norm(a) < tol:
            return np.diag(a).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    if off_diagonal_norm(a) < tol:
        return np.diag(a).copy(), v
    raise ConvergenceFailure(
        f"Jacobi did not converge in {max_sweeps} sweeps "
        f"(off-diagonal norm {off_diagonal_norm(a):.3e})"
    )
