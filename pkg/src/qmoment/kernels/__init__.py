"""Gate-application kernels with compiled/numpy backend selection.

The compiled Cython extension is preferred when importable; the numpy
fallback is always available.  Set ``QMOMENT_KERNELS=numpy`` or
``QMOMENT_KERNELS=compiled`` to force a backend (the latter raises if the
extension is missing).  ``benchmarks/bench_kernels.py`` compares the two.
"""

from __future__ import annotations

import os

import numpy as np

from . import _slow

try:
    from . import _fast
except ImportError:  # pragma: no cover - build-env dependent
    _fast = None

_choice = os.environ.get("QMOMENT_KERNELS", "").strip().lower()
if _choice == "numpy":
    _fast = None
elif _choice == "compiled" and _fast is None:
    raise ImportError("QMOMENT_KERNELS=compiled but the extension is not built")

BACKEND = "compiled" if _fast is not None else "numpy"


def apply_gate(state: np.ndarray, gate: np.ndarray, axes: tuple[int, ...], nq: int) -> np.ndarray:
    """Apply a ``2^k x 2^k`` gate at the given qubit axes of a flat state.

    Returns a new array; the input is never mutated.  Axes follow the package
    convention (axis 0 = qubit 0 = slowest index bit).
    """
    k = len(axes)
    if _fast is not None and k <= 2:
        out = np.array(state, dtype=np.complex128, copy=True)
        g = np.ascontiguousarray(gate, dtype=np.complex128)
        if k == 1:
            _fast.apply_1q_inplace(out, g, axes[0], nq)
        else:
            _fast.apply_2q_inplace(out, g, axes[0], axes[1], nq)
        return out
    return _slow.apply_gate(np.asarray(state, dtype=np.complex128), gate, tuple(axes), nq)


def apply_gate_density(rho_flat: np.ndarray, gate: np.ndarray, axes: tuple[int, ...],
                       nq: int) -> np.ndarray:
    """Conjugate a density matrix (flattened to length ``4**nq``) by a gate.

    The flattened density matrix is treated as a ``2*nq``-qubit state: ket
    bits are axes ``0..nq-1``, bra bits are axes ``nq..2*nq-1``, so
    ``U rho U^dag`` is ``U`` on the ket axes and ``conj(U)`` on the bra axes.
    """
    out = apply_gate(rho_flat, gate, axes, 2 * nq)
    bra_axes = tuple(a + nq for a in axes)
    return apply_gate(out, np.conj(gate), bra_axes, 2 * nq)


def apply_gate_unitary_left(u_flat: np.ndarray, gate: np.ndarray, axes: tuple[int, ...],
                            nq: int) -> np.ndarray:
    """Left-multiply a flattened ``2^nq x 2^nq`` matrix by a local gate."""
    return apply_gate(u_flat, gate, axes, 2 * nq)
