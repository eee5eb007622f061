"""Numpy implementations of the gate kernels.

Used when the compiled extension is unavailable, and for batched states
(trailing axes beyond the qubit axes) which the compiled path never sees.
"""

import numpy as np


def _control_index(n, controls):
    idx = [slice(None)] * n
    for q, pol in controls:
        idx[q] = int(pol)
    return tuple(idx)


def apply_matrix(psi, n, matrix, targets, controls=()):
    """Apply ``matrix`` to ``targets`` of ``psi`` in place.

    ``psi`` has shape ``(2**n,)`` or ``(2**n, batch)``.  ``controls`` is a
    sequence of ``(qubit, polarity)`` pairs.
    """
    batch = psi.shape[1:]
    tensor = psi.reshape((2,) * n + batch)
    idx = _control_index(n, controls)
    sub = tensor[idx]
    # axis positions of the targets inside the control-sliced view
    ctrl = {q for q, _ in controls}
    remaining = [q for q in range(n) if q not in ctrl]
    axes = [remaining.index(q) for q in targets]
    t = len(targets)
    moved = np.moveaxis(sub, axes, range(t))
    shape = moved.shape
    flat = moved.reshape(2**t, -1)
    out = (matrix @ flat).reshape(shape)
    tensor[idx] = np.moveaxis(out, range(t), axes)


def apply_1q(psi, n, target, u00, u01, u10, u11, ctrl_mask, ctrl_val):
    controls = []
    for q in range(n):
        bit = 1 << (n - 1 - q)
        if ctrl_mask & bit:
            controls.append((q, 1 if ctrl_val & bit else 0))
    m = np.array([[u00, u01], [u10, u11]], dtype=complex)
    apply_matrix(psi, n, m, [target], controls)


_SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def apply_swap(psi, n, q1, q2, ctrl_mask, ctrl_val):
    controls = []
    for q in range(n):
        bit = 1 << (n - 1 - q)
        if ctrl_mask & bit:
            controls.append((q, 1 if ctrl_val & bit else 0))
    apply_matrix(psi, n, _SWAP, [q1, q2], controls)
