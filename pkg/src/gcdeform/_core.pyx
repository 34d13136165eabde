# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled pointwise kernels.  Same contract as _kernels_py."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

ctypedef double complex cplx

cdef enum:
    NMAX = 2


cdef inline double _abs2(cplx z) nogil:
    return z.real * z.real + z.imag * z.imag


def bfield_apply(S, E1, E2, E3, B20, B11, B11p, B02):
    """Closed two-form action on (E1, E2, E3), pointwise over the leading axis."""
    cdef cplx[:, ::1] Sv = np.ascontiguousarray(S, dtype=complex)
    cdef cplx[:, :, ::1] e1 = np.ascontiguousarray(E1, dtype=complex)
    cdef cplx[:, :, ::1] e2 = np.ascontiguousarray(E2, dtype=complex)
    cdef cplx[:, :, ::1] e3 = np.ascontiguousarray(E3, dtype=complex)
    cdef cplx[:, :, ::1] b20 = np.ascontiguousarray(B20, dtype=complex)
    cdef cplx[:, :, ::1] b11 = np.ascontiguousarray(B11, dtype=complex)
    cdef cplx[:, :, ::1] b11p = np.ascontiguousarray(B11p, dtype=complex)
    cdef cplx[:, :, ::1] b02 = np.ascontiguousarray(B02, dtype=complex)
    cdef Py_ssize_t P = e1.shape[0]
    cdef int n = e1.shape[1]
    if n > NMAX:
        raise ValueError("compiled kernel supports n <= 2")
    o1 = np.empty((P, n, n), complex)
    o2 = np.empty((P, n, n), complex)
    o3 = np.empty((P, n, n), complex)
    cdef cplx[:, :, ::1] r1 = o1
    cdef cplx[:, :, ::1] r2 = o2
    cdef cplx[:, :, ::1] r3 = o3
    cdef cplx sig[NMAX][NMAX]
    cdef cplx q[NMAX][NMAX]
    cdef cplx qi[NMAX][NMAX]
    cdef cplx t1[NMAX][NMAX]
    cdef cplx t2[NMAX][NMAX]
    cdef cplx e2t[NMAX][NMAX]
    cdef cplx det, s
    cdef double nq, rc, rcond = 1.0
    cdef Py_ssize_t p
    cdef int i, j, k
    with nogil:
        for p in range(P):
            for i in range(n):
                for j in range(n):
                    sig[i][j] = Sv[i, j] + e1[p, i, j]
                    e2t[i][j] = -e2[p, j, i]
            # Q = 1 + B20 Sigma
            for i in range(n):
                for j in range(n):
                    s = 1.0 if i == j else 0.0
                    for k in range(n):
                        s = s + b20[p, i, k] * sig[k][j]
                    q[i][j] = s
            if n == 1:
                qi[0][0] = 1.0 / q[0][0]
            else:
                det = q[0][0] * q[1][1] - q[0][1] * q[1][0]
                qi[0][0] = q[1][1] / det
                qi[1][1] = q[0][0] / det
                qi[0][1] = -q[0][1] / det
                qi[1][0] = -q[1][0] / det
            if n == 2:
                # 1 / (|Q|_F |Q^-1|_F) = |det Q| / |Q|_F^2, finite even when det = 0
                nq = 0.0
                for i in range(n):
                    for j in range(n):
                        nq += _abs2(q[i][j])
                rc = sqrt(_abs2(det)) / nq if nq > 0 else 0.0
                if rc < rcond:
                    rcond = rc
            # E1' = (E1 - S B20 Sigma) Q^-1
            for i in range(n):
                for j in range(n):
                    s = 0
                    for k in range(n):
                        s = s + b20[p, i, k] * sig[k][j]
                    t1[i][j] = s
            for i in range(n):
                for j in range(n):
                    s = e1[p, i, j]
                    for k in range(n):
                        s = s - Sv[i, k] * t1[k][j]
                    t2[i][j] = s
            for i in range(n):
                for j in range(n):
                    s = 0
                    for k in range(n):
                        s = s + t2[i][k] * qi[k][j]
                    r1[p, i, j] = s
            # E2' = (E2 + B11 Sigma) Q^-1
            for i in range(n):
                for j in range(n):
                    s = e2[p, i, j]
                    for k in range(n):
                        s = s + b11[p, i, k] * sig[k][j]
                    t2[i][j] = s
            for i in range(n):
                for j in range(n):
                    s = 0
                    for k in range(n):
                        s = s + t2[i][k] * qi[k][j]
                    r2[p, i, j] = s
            # E3' = E3 + B02 + B11 E2t - E2' (B11p + B20 E2t)
            for i in range(n):
                for j in range(n):
                    s = b11p[p, i, j]
                    for k in range(n):
                        s = s + b20[p, i, k] * e2t[k][j]
                    t1[i][j] = s
            for i in range(n):
                for j in range(n):
                    s = e3[p, i, j] + b02[p, i, j]
                    for k in range(n):
                        s = s + b11[p, i, k] * e2t[k][j] - r2[p, i, k] * t1[k][j]
                    r3[p, i, j] = s
    return o1, o2, o3, float(rcond)
