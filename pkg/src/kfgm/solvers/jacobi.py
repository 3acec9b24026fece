"""Parallel-ordered cyclic Jacobi diagonalization of dense symmetric matrices.

Two variants share the round-robin schedule: the classical scalar method
(2x2 rotations) and a block method whose pair subproblems are solved
directly. The block method is the default for desk-scale stencil matrices.
"""
from __future__ import annotations

import numpy as np

from ..errors import ConvergenceError, InvalidParameterError


def round_robin_pairs(m: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Disjoint index pairs covering every (p, q) once per sweep.

    Each round is a perfect matching, so its rotations commute and are
    applied together.
    """
    size = m + (m % 2)
    players = list(range(size))
    rounds = []
    for _ in range(size - 1):
        p, q = [], []
        for i in range(size // 2):
            a, b = players[i], players[size - 1 - i]
            if a < m and b < m:
                p.append(min(a, b))
                q.append(max(a, b))
        rounds.append((np.array(p, dtype=int), np.array(q, dtype=int)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def off_norm(a: np.ndarray) -> float:
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def jacobi_eigenvalues(a, tol: float = 1e-12, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues (ascending) of a real symmetric matrix.

    Stops when the off-diagonal Frobenius mass drops below ``tol`` times the
    full Frobenius norm.
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidParameterError("matrix must be square")
    if not np.allclose(a, a.T, rtol=0, atol=1e-14 * max(1.0, np.abs(a).max())):
        raise InvalidParameterError("matrix must be symmetric")
    m = a.shape[0]
    if m == 1:
        return a.diagonal().copy()
    scale = float(np.linalg.norm(a))
    if scale == 0.0:
        return np.zeros(m)
    rounds = round_robin_pairs(m)
    for _ in range(max_sweeps):
        if off_norm(a) <= tol * scale:
            return np.sort(a.diagonal().copy())
        for p, q in rounds:
            apq = a[p, q]
            keep = np.abs(apq) > 1e-300
            if not keep.any():
                continue
            p, q, apq = p[keep], q[keep], apq[keep]
            theta = (a[q, q] - a[p, p]) / (2.0 * apq)
            t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
            t[theta == 0] = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            rp, rq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * rp - s[:, None] * rq
            a[q, :] = s[:, None] * rp + c[:, None] * rq
            cp, cq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = cp * c - cq * s
            a[:, q] = cp * s + cq * c
    if off_norm(a) <= tol * scale:
        return np.sort(a.diagonal().copy())
    raise ConvergenceError(f"Jacobi sweeps did not converge in {max_sweeps} sweeps")


def block_jacobi_eigenvalues(a, block: int = 40, tol: float = 1e-12, max_sweeps: int = 40) -> np.ndarray:
    """Two-sided block Jacobi: each round annihilates disjoint block pairs.

    Pair subproblems of size ``2 * block`` are diagonalized exactly and the
    orthogonal factor is applied to the full rows and columns.
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidParameterError("matrix must be square")
    if not np.allclose(a, a.T, rtol=0, atol=1e-14 * max(1.0, np.abs(a).max())):
        raise InvalidParameterError("matrix must be symmetric")
    m = a.shape[0]
    n_blocks = -(-m // block)
    if n_blocks < 3:
        return jacobi_eigenvalues(a, tol=tol, max_sweeps=max_sweeps)
    scale = float(np.linalg.norm(a))
    if scale == 0.0:
        return np.zeros(m)
    blocks = np.array_split(np.arange(m), n_blocks)
    rounds = round_robin_pairs(n_blocks)
    for _ in range(max_sweeps):
        if off_norm(a) <= tol * scale:
            return np.sort(a.diagonal().copy())
        for p, q in rounds:
            for i, j in zip(p, q):
                idx = np.concatenate([blocks[i], blocks[j]])
                sub = a[np.ix_(idx, idx)]
                _, rot = np.linalg.eigh(0.5 * (sub + sub.T))
                a[idx, :] = rot.T @ a[idx, :]
                a[:, idx] = a[:, idx] @ rot
    if off_norm(a) <= tol * scale:
        return np.sort(a.diagonal().copy())
    raise ConvergenceError(f"block Jacobi did not converge in {max_sweeps} sweeps")
