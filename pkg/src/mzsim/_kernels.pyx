# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Fourier sums over arbitrary nodes onto a uniform wave-number grid."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()

# Phase recurrence drifts by ~count*eps; reseed from libm this often.
DEF RESEED = 256


def fourier_sum(double[::1] nodes, double complex[::1] weights,
                double k0, double dk, Py_ssize_t count, int sign=-1):
    """out[m] = sum_j weights[j] * exp(sign * 1j * (k0 + m*dk) * nodes[j])."""
    if nodes.shape[0] != weights.shape[0]:
        raise ValueError("nodes and weights differ in length")
    if sign != 1 and sign != -1:
        raise ValueError("sign must be +1 or -1")
    out_arr = np.zeros(count, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef Py_ssize_t j, m, block_end
    cdef double xj, ph
    cdef double complex z, step, w
    with nogil:
        for j in range(nodes.shape[0]):
            w = weights[j]
            if w == 0:
                continue
            xj = nodes[j]
            ph = sign * dk * xj
            step = cos(ph) + 1j * sin(ph)
            m = 0
            while m < count:
                ph = sign * (k0 + m * dk) * xj
                z = w * (cos(ph) + 1j * sin(ph))
                block_end = m + RESEED
                if block_end > count:
                    block_end = count
                while m < block_end:
                    out[m] = out[m] + z
                    z = z * step
                    m += 1
    return out_arr
