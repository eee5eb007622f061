"""Backend selection for the dense gate kernels.

The compiled ``_kernels`` extension is used when it imports and the
environment variable ``QFTC_PURE_PYTHON`` is unset; otherwise the numpy
fallback runs.  Both expose the same in-place functions.
"""

import os

import numpy as np

from . import _fallback

try:
    if os.environ.get("QFTC_PURE_PYTHON"):
        raise ImportError("pure-python backend requested")
    from . import _kernels as _compiled
except ImportError:  # pragma: no cover - depends on build
    _compiled = None

BACKEND = "compiled" if _compiled is not None else "numpy"

_SWAP = _fallback._SWAP


def _masks(n, controls):
    mask = val = 0
    for q, pol in controls:
        bit = 1 << (n - 1 - q)
        mask |= bit
        if pol:
            val |= bit
    return mask, val


def apply_matrix(psi, n, matrix, targets, controls=(), backend=None):
    """Apply a (controlled) unitary to ``psi`` in place.

    Single-target gates and swaps on 1-D contiguous vectors go through the
    compiled kernel when available; everything else uses numpy.
    """
    use_compiled = _compiled is not None and backend != "numpy"
    if use_compiled and psi.ndim == 1 and psi.flags.c_contiguous and n > 1:
        if len(targets) == 1:
            mask, val = _masks(n, controls)
            m = matrix
            _compiled.apply_1q(psi, n, targets[0], complex(m[0, 0]), complex(m[0, 1]),
                               complex(m[1, 0]), complex(m[1, 1]), mask, val)
            return
        if len(targets) == 2 and matrix.shape == (4, 4) and np.array_equal(matrix, _SWAP):
            mask, val = _masks(n, controls)
            _compiled.apply_swap(psi, n, targets[0], targets[1], mask, val)
            return
    _fallback.apply_matrix(psi, n, matrix, targets, controls)
