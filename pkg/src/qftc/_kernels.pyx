# cython: boundscheck=False, wraparound=False, cdivision=True
"""In-place gate kernels for dense state vectors.

Qubit ``q`` of an ``n``-qubit register lives at bit ``n - 1 - q`` of the
basis index (qubit 0 is the most significant digit).
"""

cimport cython
from libc.stdint cimport int64_t


def apply_1q(double complex[::1] psi, int n, int target,
             double complex u00, double complex u01,
             double complex u10, double complex u11,
             int64_t ctrl_mask, int64_t ctrl_val):
    cdef int64_t dim = (<int64_t>1) << n
    cdef int64_t bit = (<int64_t>1) << (n - 1 - target)
    cdef int64_t lo_mask = bit - 1
    cdef int64_t half = dim >> 1
    cdef int64_t k, i0, i1
    cdef double complex a, b
    cdef bint diagonal = (u01 == 0 and u10 == 0)
    for k in range(half):
        i0 = ((k & ~lo_mask) << 1) | (k & lo_mask)
        if (i0 & ctrl_mask) != ctrl_val:
            continue
        i1 = i0 | bit
        if diagonal:
            psi[i0] = u00 * psi[i0]
            psi[i1] = u11 * psi[i1]
        else:
            a = psi[i0]
            b = psi[i1]
            psi[i0] = u00 * a + u01 * b
            psi[i1] = u10 * a + u11 * b


def apply_swap(double complex[::1] psi, int n, int q1, int q2,
               int64_t ctrl_mask, int64_t ctrl_val):
    cdef int64_t dim = (<int64_t>1) << n
    cdef int64_t b1 = (<int64_t>1) << (n - 1 - q1)
    cdef int64_t b2 = (<int64_t>1) << (n - 1 - q2)
    cdef int64_t i, j
    cdef double complex tmp
    for i in range(dim):
        # visit each (q1=1, q2=0) index once and swap with its partner
        if (i & b1) and not (i & b2):
            if (i & ctrl_mask) != ctrl_val:
                continue
            j = (i ^ b1) | b2
            tmp = psi[i]
            psi[i] = psi[j]
            psi[j] = tmp
