# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cython fast path for the quadrature contraction kernels.

Mirrors _kernels_py exactly; selected automatically at import when built.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport expm1, log1p

cnp.import_array()

BACKEND = "cython"

RHO_SWITCH = 1e-3


def contract_full(
    double[::1] h,
    double[::1] hx,
    double[:, ::1] h_minus,
    double[:, ::1] h_plus,
    double[:, ::1] hx_minus,
    double[:, ::1] hx_plus,
    double[::1] inv_y,
    double[::1] wy,
    double alpha,
    double[::1] d,
):
    cdef Py_ssize_t nq = wy.shape[0]
    cdef Py_ssize_t n = h.shape[0]
    cdef cnp.ndarray[double, ndim=1] out_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t q, j, k
    cdef double nha = -alpha / 2.0
    cdef double iv, wq, dm, dp, rm, rp, gm, gp, acc
    cdef double d0 = d[0], d1 = d[1], d2 = d[2], d3 = d[3]
    cdef double d4 = d[4], d5 = d[5], d6 = d[6], d7 = d[7]
    for q in range(nq):
        iv = inv_y[q]
        wq = wy[q]
        for j in range(n):
            dm = (h[j] - h_minus[q, j]) * iv
            rm = dm * dm
            dp = (h[j] - h_plus[q, j]) * iv
            rp = dp * dp
            if rm <= 1e-3:
                acc = d7
                acc = acc * rm + d6
                acc = acc * rm + d5
                acc = acc * rm + d4
                acc = acc * rm + d3
                acc = acc * rm + d2
                acc = acc * rm + d1
                acc = acc * rm + d0
                gm = acc * rm
            else:
                gm = expm1(nha * log1p(rm))
            if rp <= 1e-3:
                acc = d7
                acc = acc * rp + d6
                acc = acc * rp + d5
                acc = acc * rp + d4
                acc = acc * rp + d3
                acc = acc * rp + d2
                acc = acc * rp + d1
                acc = acc * rp + d0
                gp = acc * rp
            else:
                gp = expm1(nha * log1p(rp))
            out[j] += wq * (
                (hx[j] - hx_minus[q, j]) * gm + (hx[j] - hx_plus[q, j]) * gp
            )
    return out_arr


def contract_order_n(
    double[::1] h,
    double[::1] hx,
    double[:, ::1] h_minus,
    double[:, ::1] h_plus,
    double[:, ::1] hx_minus,
    double[:, ::1] hx_plus,
    double[::1] inv_y,
    double[::1] wy,
    int order,
):
    cdef Py_ssize_t nq = wy.shape[0]
    cdef Py_ssize_t n = h.shape[0]
    cdef cnp.ndarray[double, ndim=1] out_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t q, j, k
    cdef double iv, wq, dm, dp, rm, rp, pm, pp
    for q in range(nq):
        iv = inv_y[q]
        wq = wy[q]
        for j in range(n):
            dm = (h[j] - h_minus[q, j]) * iv
            rm = dm * dm
            dp = (h[j] - h_plus[q, j]) * iv
            rp = dp * dp
            pm = rm
            pp = rp
            for k in range(order - 1):
                pm *= rm
                pp *= rp
            out[j] += wq * (
                (hx[j] - hx_minus[q, j]) * pm + (hx[j] - hx_plus[q, j]) * pp
            )
    return out_arr
