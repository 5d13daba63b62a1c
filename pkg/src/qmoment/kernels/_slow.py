"""Numpy fallback kernels: local gate application by tensor reshaping.

State layout is a flat complex128 array of length ``2**nq`` where tensor axis
``q`` is qubit ``q`` (axis 0 varies slowest).  All functions mutate nothing;
they return a new flat array.
"""

from __future__ import annotations

import numpy as np


def apply_gate(state: np.ndarray, gate: np.ndarray, axes: tuple[int, ...], nq: int) -> np.ndarray:
    """Apply a ``2^k x 2^k`` gate to the given tensor axes of a flat state."""
    k = len(axes)
    if gate.shape != (2 ** k, 2 ** k):
        raise ValueError("gate shape does not match axis count")
    t = state.reshape([2] * nq)
    g = gate.reshape([2] * (2 * k))
    t = np.tensordot(g, t, axes=(list(range(k, 2 * k)), list(axes)))
    t = np.moveaxis(t, list(range(k)), list(axes))
    return np.ascontiguousarray(t).reshape(-1)
