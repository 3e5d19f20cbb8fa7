# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: batched Riemann-Siegel Z(t), the Fejer pair sum and
the sorted two-pointer pair count.

Signatures and results match ``_pykernels`` exactly; see that module for the
formulas.
"""
import math

import numpy as np

cimport cython
from cython.parallel cimport prange
from libc.math cimport cos, fabs, floor, log, pow, sin, sqrt

cdef double PI = 3.14159265358979323846
cdef double TWO_PI = 6.28318530717958647692
cdef double EPS = 2.220446049250313e-16
cdef double RS_ENVELOPE = 0.031


cdef inline double _horner(const double[:, ::1] tab, int k, double x) noexcept nogil:
    cdef int j = tab.shape[1] - 1
    cdef double s = 0.0
    while j >= 0:
        s = s * x + tab[k, j]
        j -= 1
    return s


cdef void _rs_one(double t, const double[:, ::1] psi, const double[::1] tc,
                  const double[::1] logn, const double[::1] rsqrt,
                  double* zout, double* eout) noexcept nogil:
    cdef int K = tc.shape[0] - 1
    cdef double inv = 1.0 / t
    cdef double inv2 = inv * inv
    cdef double tp = inv
    cdef double th = 0.5 * t * log(t / TWO_PI) - 0.5 * t - PI / 8.0
    cdef int k
    for k in range(K):
        th += tc[k] * tp
        tp *= inv2
    cdef double th_err = tc[K] * tp * pow(2.0, K + 1)

    cdef double r = sqrt(t / TWO_PI)
    cdef int N = <int>floor(r)
    cdef double x = (r - N) - 0.5
    cdef double a = 1.0 / r
    cdef double main = 0.0
    cdef double ssum = 0.0
    cdef int n
    for n in range(1, N + 1):
        main += cos(th - t * logn[n]) * rsqrt[n]
        ssum += rsqrt[n]
    main *= 2.0
    ssum *= 2.0

    cdef double pi2 = PI * PI
    cdef double pi4 = pi2 * pi2
    cdef double pi6 = pi4 * pi2
    cdef double pi8 = pi4 * pi4
    cdef double d0 = _horner(psi, 0, x)
    cdef double c1 = -_horner(psi, 3, x) / (96.0 * pi2)
    cdef double c2 = _horner(psi, 2, x) / (64.0 * pi2) + _horner(psi, 6, x) / (18432.0 * pi4)
    cdef double c3 = (-_horner(psi, 1, x) / (64.0 * pi2) - _horner(psi, 5, x) / (3840.0 * pi4)
                      - _horner(psi, 9, x) / (5308416.0 * pi6))
    cdef double c4 = (d0 / (128.0 * pi2) + 19.0 * _horner(psi, 4, x) / (24576.0 * pi4)
                      + 11.0 * _horner(psi, 8, x) / (5898240.0 * pi6)
                      + _horner(psi, 12, x) / (2038431744.0 * pi8))
    cdef double scale = 1.0 / sqrt(r)
    if (N - 1) % 2 == 1:
        scale = -scale
    cdef double corr = scale * (d0 + a * (c1 + a * (c2 + a * c3)))

    cdef double trunc = 3.0 * fabs(scale * c4) * a * a * a * a
    cdef double env = RS_ENVELOPE * pow(t, -2.25)
    if env > trunc:
        trunc = env
    cdef double phase = fabs(th) + t * logn[N] + 1.0
    zout[0] = main + corr
    eout[0] = trunc + (8.0 * EPS * phase + th_err) * ssum + 16.0 * EPS * fabs(corr)


def rs_z_batch(double[::1] t, double[:, ::1] psi, double[::1] theta_coef, int nthreads=1):
    cdef Py_ssize_t m = t.shape[0]
    z = np.empty(m)
    e = np.empty(m)
    if m == 0:
        return z, e
    cdef double tmax = 0.0
    cdef Py_ssize_t i
    for i in range(m):
        if t[i] > tmax:
            tmax = t[i]
    cdef int nmax = <int>floor(sqrt(tmax / TWO_PI)) + 2
    ns = np.arange(nmax + 1, dtype=np.float64)
    ns[0] = 1.0
    cdef double[::1] logn = np.log(ns)
    cdef double[::1] rsqrt = 1.0 / np.sqrt(ns)
    cdef double[::1] zv = z
    cdef double[::1] ev = e
    for i in prange(m, nogil=True, num_threads=max(nthreads, 1), schedule="static"):
        _rs_one(t[i], psi, theta_coef, logn, rsqrt, &zv[i], &ev[i])
    return z, e


cdef double _fejer_block(const double[::1] g, const double[::1] m, double half_l,
                         Py_ssize_t i0, Py_ssize_t i1) noexcept nogil:
    cdef Py_ssize_t n = g.shape[0]
    cdef Py_ssize_t i, j
    cdef double s = 0.0
    cdef double row, w, k
    for i in range(i0, i1):
        row = 0.0
        for j in range(i + 1, n):
            w = (g[i] - g[j]) * half_l
            if fabs(w) < 1e-8:
                k = 1.0
            else:
                k = sin(w) / w
                k = k * k
            row += m[j] * k
        s += m[i] * row
    return s


def fejer_offdiag(double[::1] g, double[::1] m, double log_t, int nthreads=1, int block=256):
    """Sum over ordered pairs i != j of m_i m_j K((g_i - g_j) log_t)."""
    cdef Py_ssize_t n = g.shape[0]
    cdef Py_ssize_t nb = (n + block - 1) // block
    partial = np.zeros(max(nb, 1))
    cdef double[::1] pv = partial
    cdef double half_l = 0.5 * log_t
    cdef Py_ssize_t b, i1
    for b in prange(nb, nogil=True, num_threads=max(nthreads, 1), schedule="dynamic"):
        i1 = (b + 1) * block
        if i1 > n:
            i1 = n
        pv[b] = _fejer_block(g, m, half_l, b * block, i1)
    return 2.0 * math.fsum(partial)


def window_pair_count(double[::1] g, long[::1] m, double delta):
    """Ordered pairs (with multiplicity, diagonal included) with |g_i - g_j| <= delta."""
    cdef Py_ssize_t n = g.shape[0]
    cdef Py_ssize_t i, j = 0
    cdef long long diag = 0
    cdef long long cross = 0
    cdef long long run = 0
    # run = sum of m over indices (i, j] in the sliding window
    j = 0
    for i in range(n):
        diag += m[i] * m[i]
        if j < i:
            j = i
            run = 0
        while j + 1 < n and g[j + 1] - g[i] <= delta:
            j += 1
            run += m[j]
        cross += m[i] * run
        if j > i:
            run -= m[i + 1]
    return int(diag + 2 * cross)
