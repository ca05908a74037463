# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Hot kernel: sums of weighted complex exponentials over sphere directions.

For points p_i on the curve, real coefficients c_i (quadrature weight times
cutoff), directions w_j and a frequency scale R this computes

    out[j] = sum_i c_i * exp(1j * R * <p_i, w_j>).

The pure-Python fallback in kernels.py implements the same contract.
"""

from libc.math cimport cos, sin

import numpy as np


def phase_sum(double[:, ::1] pts, double[::1] coef, double[:, ::1] omegas,
              double scale):
    cdef Py_ssize_t npts = pts.shape[0]
    cdef Py_ssize_t d = pts.shape[1]
    cdef Py_ssize_t nw = omegas.shape[0]
    if coef.shape[0] != npts:
        raise ValueError("coef length must match pts")
    if omegas.shape[1] != d:
        raise ValueError("omegas dimension mismatch")

    out = np.empty(nw, dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef Py_ssize_t i, j, a
    cdef double ph, c, acc_re, acc_im

    with nogil:
        for j in range(nw):
            acc_re = 0.0
            acc_im = 0.0
            for i in range(npts):
                ph = 0.0
                for a in range(d):
                    ph += pts[i, a] * omegas[j, a]
                ph *= scale
                c = coef[i]
                acc_re += c * cos(ph)
                acc_im += c * sin(ph)
            ov[j].real = acc_re
            ov[j].imag = acc_im
    return out
