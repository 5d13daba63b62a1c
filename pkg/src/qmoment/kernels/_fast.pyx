# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for 1- and 2-qubit gate application on flat states.

Same layout contract as the numpy fallback: flat complex128 array of length
2**nq, tensor axis q = qubit q, axis 0 slowest.  Gates are applied in place.
"""

import numpy as np
cimport numpy as cnp


def apply_1q_inplace(cnp.complex128_t[::1] state, cnp.complex128_t[:, ::1] u,
                     int axis, int nq):
    cdef Py_ssize_t half = 1 << (nq - 1)
    cdef Py_ssize_t stride = 1 << (nq - 1 - axis)
    cdef Py_ssize_t mask = stride - 1
    cdef Py_ssize_t i, i0, i1
    cdef double complex a, b
    cdef double complex u00 = u[0, 0], u01 = u[0, 1], u10 = u[1, 0], u11 = u[1, 1]
    for i in range(half):
        i0 = ((i & ~mask) << 1) | (i & mask)
        i1 = i0 | stride
        a = state[i0]
        b = state[i1]
        state[i0] = u00 * a + u01 * b
        state[i1] = u10 * a + u11 * b


def apply_2q_inplace(cnp.complex128_t[::1] state, cnp.complex128_t[:, ::1] u,
                     int axis0, int axis1, int nq):
    # axis0 is the slower axis of the gate's 4x4 basis (gate bit order: axis0, axis1)
    cdef Py_ssize_t quarter = 1 << (nq - 2)
    cdef Py_ssize_t s0 = 1 << (nq - 1 - axis0)
    cdef Py_ssize_t s1 = 1 << (nq - 1 - axis1)
    cdef Py_ssize_t hi = s0 if s0 > s1 else s1
    cdef Py_ssize_t lo = s1 if s0 > s1 else s0
    cdef Py_ssize_t mlo = lo - 1
    cdef Py_ssize_t mhi = hi - 1
    cdef Py_ssize_t i, base, i00, i01, i10, i11
    cdef double complex a0, a1, a2, a3
    cdef double complex u00, u01, u02, u03, u10, u11, u12, u13
    cdef double complex u20, u21, u22, u23, u30, u31, u32, u33
    u00 = u[0, 0]; u01 = u[0, 1]; u02 = u[0, 2]; u03 = u[0, 3]
    u10 = u[1, 0]; u11 = u[1, 1]; u12 = u[1, 2]; u13 = u[1, 3]
    u20 = u[2, 0]; u21 = u[2, 1]; u22 = u[2, 2]; u23 = u[2, 3]
    u30 = u[3, 0]; u31 = u[3, 1]; u32 = u[3, 2]; u33 = u[3, 3]
    for i in range(quarter):
        base = i & mlo
        base |= (i & (mhi >> 1) & ~mlo) << 1
        base |= (i & ~(mhi >> 1)) << 2
        i00 = base
        i01 = base | s1
        i10 = base | s0
        i11 = base | s0 | s1
        a0 = state[i00]; a1 = state[i01]; a2 = state[i10]; a3 = state[i11]
        state[i00] = u00 * a0 + u01 * a1 + u02 * a2 + u03 * a3
        state[i01] = u10 * a0 + u11 * a1 + u12 * a2 + u13 * a3
        state[i10] = u20 * a0 + u21 * a1 + u22 * a2 + u23 * a3
        state[i11] = u30 * a0 + u31 * a1 + u32 * a2 + u33 * a3
