"""Small complex 2x2 helpers and the Pauli constants.

Matrices are plain ``numpy`` arrays of shape ``(2, 2)`` and dtype
``complex128``; vectors have shape ``(2,)``.
"""
from __future__ import annotations

import numpy as np

I2 = np.eye(2, dtype=complex)
TAU1 = np.array([[0, 1], [1, 0]], dtype=complex)
TAU2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
TAU3 = np.array([[1, 0], [0, -1]], dtype=complex)

# tau3 + i tau2 = [[1, 1], [-1, -1]]; maps an FV spinor to [phi, -phi].
W = TAU3 + 1j * TAU2
WDW = W.conj().T @ W

for _m in (I2, TAU1, TAU2, TAU3, W, WDW):
    _m.setflags(write=False)
del _m


def as_matrix(m) -> np.ndarray:
    out = np.asarray(m, dtype=complex)
    if out.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {out.shape}")
    return out


def mat_mul(a, b) -> np.ndarray:
    return as_matrix(a) @ as_matrix(b)


def adjoint(m) -> np.ndarray:
    return as_matrix(m).conj().T


def transpose(m) -> np.ndarray:
    return as_matrix(m).T.copy()


def det(m) -> complex:
    m = as_matrix(m)
    return complex(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def max_abs(m) -> float:
    """Max-absolute-entry norm used by every predicate here."""
    return float(np.max(np.abs(m)))


def is_unitary(m, tol: float = 1e-12) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = as_matrix(m)
    return max_abs(m.conj().T @ m - I2) <= tol


def is_symmetric(m, tol: float = 1e-12) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = as_matrix(m)
    return max_abs(m - m.T) <= tol


def tau3_pairing(u, v) -> complex:
    """Pointwise indefinite pairing u^dagger tau3 v."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    return complex(np.conj(u[0]) * v[0] - np.conj(u[1]) * v[1])
