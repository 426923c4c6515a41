# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan kernels over the (symbol, root, frequency-shift) grid.

Same contracts as the numpy fallback in ``_scan_np``.  Complex products
are accumulated through explicit real/imaginary arithmetic: the despread
buffer is split into two real arrays so the inner loops reduce to plain
multiply-adds the compiler can vectorize.
"""

import numpy as np

cimport cython
cimport numpy as cnp

cnp.import_array()

ctypedef double complex zdouble

DEF NBINS = 63


cdef inline double _row_power(const zdouble[:, ::1] window, Py_ssize_t k) noexcept nogil:
    cdef Py_ssize_t i
    cdef double acc = 0.0
    for i in range(window.shape[1]):
        acc += window[k, i].real * window[k, i].real + window[k, i].imag * window[k, i].imag
    return acc


cdef inline void _despread(const zdouble[:, ::1] x, const zdouble[:, ::1] a,
                           Py_ssize_t k, Py_ssize_t r, Py_ssize_t off,
                           double* zre, double* zim) noexcept nogil:
    cdef Py_ssize_t m
    cdef double xr, xi, ar, ai
    for m in range(NBINS):
        xr = x[k, m + off].real
        xi = x[k, m + off].imag
        ar = a[r, m].real
        ai = a[r, m].imag
        zre[m] = xr * ar - xi * ai
        zim[m] = xr * ai + xi * ar


def scan_projected(window, pss_conj, shifts, combiner):
    """Metric ||W z||^2 / ||x||^2 for every hypothesis."""
    cdef const zdouble[:, ::1] x = np.ascontiguousarray(window, dtype=complex)
    cdef const zdouble[:, ::1] a = np.ascontiguousarray(pss_conj, dtype=complex)
    cdef const long long[::1] nus = np.ascontiguousarray(shifts, dtype=np.int64)
    w_arr = np.ascontiguousarray(combiner, dtype=complex)
    cdef const double[:, ::1] wre = np.ascontiguousarray(w_arr.real)
    cdef const double[:, ::1] wim = np.ascontiguousarray(w_arr.imag)
    cdef Py_ssize_t nq = x.shape[0], nr = a.shape[0], nn = nus.shape[0], np_ = wre.shape[0]
    out_arr = np.empty((nq, nr, nn), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef double zre[NBINS]
    cdef double zim[NBINS]
    cdef double power, val, accr, acci, pr, pi
    cdef Py_ssize_t k, r, j, m, p, off
    with nogil:
        for k in range(nq):
            power = _row_power(x, k)
            for j in range(nn):
                off = nus[j] + 5
                for r in range(nr):
                    _despread(x, a, k, r, off, zre, zim)
                    val = 0.0
                    for p in range(np_):
                        accr = 0.0
                        acci = 0.0
                        for m in range(NBINS):
                            pr = wre[p, m]
                            pi = wim[p, m]
                            accr += pr * zre[m] - pi * zim[m]
                            acci += pr * zim[m] + pi * zre[m]
                        val += accr * accr + acci * acci
                    out[k, r, j] = val / power
    return out_arr


def scan_pcrr(window, pss_conj, shifts, bounds):
    """Piecewise-correlation metric with subband edges ``bounds``."""
    cdef const zdouble[:, ::1] x = np.ascontiguousarray(window, dtype=complex)
    cdef const zdouble[:, ::1] a = np.ascontiguousarray(pss_conj, dtype=complex)
    cdef const long long[::1] nus = np.ascontiguousarray(shifts, dtype=np.int64)
    cdef const long long[::1] edges = np.ascontiguousarray(bounds, dtype=np.int64)
    cdef Py_ssize_t nq = x.shape[0], nr = a.shape[0], nn = nus.shape[0]
    cdef Py_ssize_t nblk = edges.shape[0] - 1
    out_arr = np.empty((nq, nr, nn), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef double zre[NBINS]
    cdef double zim[NBINS]
    cdef double power, val, accr, acci
    cdef Py_ssize_t k, r, j, m, b, off
    with nogil:
        for k in range(nq):
            power = _row_power(x, k)
            for j in range(nn):
                off = nus[j] + 5
                for r in range(nr):
                    _despread(x, a, k, r, off, zre, zim)
                    val = 0.0
                    for b in range(nblk):
                        accr = 0.0
                        acci = 0.0
                        for m in range(edges[b], edges[b + 1]):
                            accr += zre[m]
                            acci += zim[m]
                        val += (accr * accr + acci * acci) / (edges[b + 1] - edges[b])
                    out[k, r, j] = val / power
    return out_arr


def scan_dd(window, pss_conj, shifts):
    """Differential metric Re{sum_n z(n) conj(z(n-1))} / ||x||^2."""
    cdef const zdouble[:, ::1] x = np.ascontiguousarray(window, dtype=complex)
    cdef const zdouble[:, ::1] a = np.ascontiguousarray(pss_conj, dtype=complex)
    cdef const long long[::1] nus = np.ascontiguousarray(shifts, dtype=np.int64)
    cdef Py_ssize_t nq = x.shape[0], nr = a.shape[0], nn = nus.shape[0]
    out_arr = np.empty((nq, nr, nn), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef double zre[NBINS]
    cdef double zim[NBINS]
    cdef double power, val
    cdef Py_ssize_t k, r, j, m, off
    with nogil:
        for k in range(nq):
            power = _row_power(x, k)
            for j in range(nn):
                off = nus[j] + 5
                for r in range(nr):
                    _despread(x, a, k, r, off, zre, zim)
                    val = 0.0
                    for m in range(1, NBINS):
                        val += zre[m] * zre[m - 1] + zim[m] * zim[m - 1]
                    out[k, r, j] = val / power
    return out_arr
