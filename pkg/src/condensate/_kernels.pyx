# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-node kernels for the exponential stepper.

Single-pass fused loops; semantics match ``_kernels_py`` (the NumPy
fallback) to within floating-point library differences.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, expm1, fabs

cnp.import_array()

BACKEND_NAME = "cython"

PHI1_SERIES_CUTOFF = 1e-4

cdef double _CUT = 1e-4


cdef inline double _phi1(double z) nogil:
    if fabs(z) < _CUT:
        return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0)))
    return expm1(z) / z


def phi1(cnp.ndarray z_in):
    """First exponential-integrator kernel (e^z - 1)/z, elementwise."""
    cdef cnp.ndarray zc = np.ascontiguousarray(z_in, dtype=np.float64)
    cdef double[::1] z = zc
    cdef cnp.ndarray out_arr = np.empty(zc.shape[0], dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, n = z.shape[0]
    with nogil:
        for i in range(n):
            out[i] = _phi1(z[i])
    return out_arr


def exp_affine_step(cnp.ndarray p_in, cnp.ndarray b_in, cnp.ndarray src_in, double dt):
    """One frozen-coefficient update e^(b dt) p + dt phi1(b dt) src."""
    cdef cnp.ndarray pc = np.ascontiguousarray(p_in, dtype=np.float64)
    cdef cnp.ndarray bc = np.ascontiguousarray(b_in, dtype=np.float64)
    cdef cnp.ndarray sc = np.ascontiguousarray(src_in, dtype=np.float64)
    cdef double[::1] p = pc
    cdef double[::1] b = bc
    cdef double[::1] src = sc
    cdef cnp.ndarray out_arr = np.empty(pc.shape[0], dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, n = p.shape[0]
    cdef double z
    with nogil:
        for i in range(n):
            z = b[i] * dt
            out[i] = exp(z) * p[i] + dt * _phi1(z) * src[i]
    return out_arr


def scaled_max_diff(cnp.ndarray a_in, cnp.ndarray b_in, double atol, double rtol):
    """max_i |a_i - b_i| / (atol + rtol max(|a_i|, |b_i|))."""
    cdef cnp.ndarray ac = np.ascontiguousarray(a_in, dtype=np.float64)
    cdef cnp.ndarray bc = np.ascontiguousarray(b_in, dtype=np.float64)
    cdef double[::1] a = ac
    cdef double[::1] b = bc
    cdef Py_ssize_t i, n = a.shape[0]
    cdef double m = 0.0, s, d
    with nogil:
        for i in range(n):
            s = fabs(a[i])
            if fabs(b[i]) > s:
                s = fabs(b[i])
            d = fabs(a[i] - b[i]) / (atol + rtol * s)
            if d > m or d != d:
                m = d
    return m
