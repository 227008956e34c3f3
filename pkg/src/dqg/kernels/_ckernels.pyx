# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled grid kernels; see ``_fallback.py`` for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


def shell_energies(const double[:, ::1] power, const long[:, ::1] shell_lo,
                   const double[:, ::1] weight_lo, const double[:, ::1] weight_hi,
                   Py_ssize_t nshells):
    cdef Py_ssize_t i, j, k
    cdef Py_ssize_t n0 = power.shape[0], n1 = power.shape[1]
    cdef double p, w
    out = np.zeros(nshells)
    cdef double[::1] acc = out
    for i in range(n0):
        for j in range(n1):
            k = shell_lo[i, j]
            if k < 0:
                continue
            p = power[i, j]
            w = weight_lo[i, j]
            acc[k] += w * w * p
            if k + 1 < nshells:
                w = weight_hi[i, j]
                acc[k + 1] += w * w * p
    return out


def lp_power_sum(const double[:, ::1] values, double p):
    # integer powers by repeated products; numpy's vectorised pow beats libm
    # pow for the rest
    cdef Py_ssize_t i, j
    cdef int m, e
    cdef double s = 0.0, a, r
    if p != <double><int>p or p < 1 or p > 64:
        return float(np.sum(np.abs(np.asarray(values)) ** p))
    m = <int>p
    for i in range(values.shape[0]):
        for j in range(values.shape[1]):
            a = fabs(values[i, j])
            r = a
            for e in range(1, m):
                r *= a
            s += r
    return s


def advect_product(const double[:, ::1] u1, const double[:, ::1] u2,
                   const double[:, ::1] g1, const double[:, ::1] g2):
    cdef Py_ssize_t i, j
    out = np.empty((u1.shape[0], u1.shape[1]))
    cdef double[:, ::1] o = out
    for i in range(u1.shape[0]):
        for j in range(u1.shape[1]):
            o[i, j] = u1[i, j] * g1[i, j] + u2[i, j] * g2[i, j]
    return out


def ifrk4_combine(v, k1, k2, k3, k4, const double[:, ::1] e_full,
                  const double[:, ::1] e_half, double dt):
    # complex arrays are walked as interleaved (re, im) doubles so that the
    # real factors scale both parts without complex multiplies
    cdef Py_ssize_t n0 = e_full.shape[0], n1 = e_full.shape[1]
    cdef const double[:, ::1] rv = np.ascontiguousarray(v).view(np.float64)
    cdef const double[:, ::1] r1 = np.ascontiguousarray(k1).view(np.float64)
    cdef const double[:, ::1] r2 = np.ascontiguousarray(k2).view(np.float64)
    cdef const double[:, ::1] r3 = np.ascontiguousarray(k3).view(np.float64)
    cdef const double[:, ::1] r4 = np.ascontiguousarray(k4).view(np.float64)
    cdef Py_ssize_t i, j, jj
    cdef double c6 = dt / 6.0, c3 = dt / 3.0, ef, eh
    out = np.empty((n0, n1), dtype=np.complex128)
    cdef double[:, ::1] o = out.view(np.float64)
    for i in range(n0):
        for j in range(n1):
            ef = e_full[i, j]
            eh = c3 * e_half[i, j]
            jj = 2 * j
            o[i, jj] = ef * (rv[i, jj] + c6 * r1[i, jj]) + eh * (r2[i, jj] + r3[i, jj]) + c6 * r4[i, jj]
            jj += 1
            o[i, jj] = ef * (rv[i, jj] + c6 * r1[i, jj]) + eh * (r2[i, jj] + r3[i, jj]) + c6 * r4[i, jj]
    return out
