"""Standard gate matrices and GateOp constructors."""

from __future__ import annotations

import numpy as np

from .statevector import GateOp

H_MAT = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
X_MAT = np.array([[0, 1], [1, 0]], dtype=complex)
Z_MAT = np.array([[1, 0], [0, -1]], dtype=complex)
SWAP_MAT = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def phase_mat(angle: float) -> np.ndarray:
    return np.array([[1, 0], [0, np.exp(1j * angle)]], dtype=complex)


def r_mat(ell: int, sign: int = 1) -> np.ndarray:
    """``R_ell = |0><0| + exp(sign * 2 pi i / 2**ell) |1><1|``."""
    return phase_mat(sign * 2 * np.pi / 2.0**ell)


def ry_mat(angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def h(q, controls=()):
    return GateOp(H_MAT, (q,), tuple(controls), "H")


def x(q, controls=()):
    return GateOp(X_MAT, (q,), tuple(controls), "X")


def z(q, controls=()):
    return GateOp(Z_MAT, (q,), tuple(controls), "Z")


def r(ell, q, controls=(), sign=1):
    return GateOp(r_mat(ell, sign), (q,), tuple(controls), f"R{ell}" + ("" if sign > 0 else "†"))


def phase(angle, q, controls=()):
    return GateOp(phase_mat(angle), (q,), tuple(controls), "P")


def ry(angle, q, controls=()):
    return GateOp(ry_mat(angle), (q,), tuple(controls), "Ry")


def swap(q1, q2, controls=()):
    # a bare swap is three CNOTs
    return GateOp(SWAP_MAT, (q1, q2), tuple(controls), "SWAP", cost=3 if not controls else None)


def cnot(c, t):
    return x(t, ((c, 1),))
