# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Same arithmetic, same order as ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt
from libc.stdint cimport int64_t, uint8_t

cnp.import_array()

cdef double NEG_INF = -1e300

cdef int _parity(int x):
    cdef int p = 0
    while x:
        p ^= x & 1
        x >>= 1
    return p


cdef double _SA[2][64]
cdef double _SB[2][64]


cdef void _init_tables():
    cdef int ns, x, b, prev, w
    for ns in range(64):
        b = ns >> 5
        for x in range(2):
            prev = ((ns & 31) << 1) | x
            w = (b << 6) | prev
            _SA[x][ns] = 1.0 - 2.0 * _parity(w & 0o133)
            _SB[x][ns] = 1.0 - 2.0 * _parity(w & 0o171)


_init_tables()


def viterbi_soft(soft, Py_ssize_t n_bits, bint terminated=True):
    cdef const double[::1] s = np.ascontiguousarray(soft, dtype=np.float64)
    if s.shape[0] < 2 * n_bits:
        raise ValueError("soft input shorter than 2 * n_bits")
    decisions = np.empty((n_bits, 64), dtype=np.uint8)
    cdef uint8_t[:, ::1] dec = decisions
    cdef double pm[64]
    cdef double npm[64]
    cdef double la, lb, m0, m1, mx
    cdef Py_ssize_t i
    cdef int ns, p0, state
    for ns in range(64):
        pm[ns] = NEG_INF
    pm[0] = 0.0
    for i in range(n_bits):
        la = s[2 * i]
        lb = s[2 * i + 1]
        mx = NEG_INF
        for ns in range(64):
            p0 = (ns & 31) << 1
            m0 = pm[p0] + (_SA[0][ns] * la + _SB[0][ns] * lb)
            m1 = pm[p0 | 1] + (_SA[1][ns] * la + _SB[1][ns] * lb)
            if m1 > m0:
                npm[ns] = m1
                dec[i, ns] = 1
            else:
                npm[ns] = m0
                dec[i, ns] = 0
            if npm[ns] > mx:
                mx = npm[ns]
        for ns in range(64):
            pm[ns] = npm[ns] - mx
    if terminated:
        state = 0
    else:
        state = 0
        for ns in range(1, 64):
            if pm[ns] > pm[state]:
                state = ns
    out = np.empty(n_bits, dtype=np.uint8)
    cdef uint8_t[::1] o = out
    for i in range(n_bits - 1, -1, -1):
        o[i] = state >> 5
        state = ((state & 31) << 1) | dec[i, state]
    return out


def fir_complex(taps, xh):
    cdef const double[::1] t = np.ascontiguousarray(taps, dtype=np.float64)
    cdef cnp.ndarray xa = np.ascontiguousarray(xh, dtype=np.complex128)
    cdef const double[::1] xr = np.ascontiguousarray(xa.real)
    cdef const double[::1] xi = np.ascontiguousarray(xa.imag)
    cdef Py_ssize_t k_len = t.shape[0]
    cdef Py_ssize_t n = xr.shape[0] - (k_len - 1)
    if n <= 0:
        return np.zeros(0, dtype=np.complex128)
    out = np.empty(n, dtype=np.complex128)
    cdef double[:, ::1] o = out.view(np.float64).reshape(n, 2)
    cdef Py_ssize_t i, k, lo
    cdef double re, im
    for i in range(n):
        re = 0.0
        im = 0.0
        for k in range(k_len):
            lo = k_len - 1 - k
            re = re + t[k] * xr[lo + i]
            im = im + t[k] * xi[lo + i]
        o[i, 0] = re
        o[i, 1] = im
    return out


def fir_real(taps, xh):
    cdef const double[::1] t = np.ascontiguousarray(taps, dtype=np.float64)
    cdef const double[::1] x = np.ascontiguousarray(xh, dtype=np.float64)
    cdef Py_ssize_t k_len = t.shape[0]
    cdef Py_ssize_t n = x.shape[0] - (k_len - 1)
    if n <= 0:
        return np.zeros(0)
    out = np.empty(n)
    cdef double[::1] o = out
    cdef Py_ssize_t i, k
    cdef double acc
    for i in range(n):
        acc = 0.0
        for k in range(k_len):
            acc = acc + t[k] * x[k_len - 1 - k + i]
        o[i] = acc
    return out


cdef inline int64_t _round_shift(int64_t v, int k):
    cdef int64_t half
    if k == 0:
        return v
    half = (<int64_t>1) << (k - 1)
    if v < 0:
        return -((-v + half) >> k)
    return (v + half) >> k


def fir_int(taps, xh, int frac_bits):
    cdef const int64_t[::1] t = np.ascontiguousarray(taps, dtype=np.int64)
    cdef const int64_t[::1] x = np.ascontiguousarray(xh, dtype=np.int64)
    cdef Py_ssize_t k_len = t.shape[0]
    cdef Py_ssize_t n = x.shape[0] - (k_len - 1)
    if n <= 0:
        return np.zeros(0, dtype=np.int32)
    out = np.empty(n, dtype=np.int32)
    cdef int[::1] o = out
    cdef Py_ssize_t i, k
    cdef int64_t acc, r
    for i in range(n):
        acc = 0
        for k in range(k_len):
            acc += t[k] * x[k_len - 1 - k + i]
        r = _round_shift(acc, frac_bits)
        if r > 2147483647:
            r = 2147483647
        elif r < -2147483648:
            r = -2147483648
        o[i] = <int>r
    return out


def autocorr(xh, int lag, int window):
    cdef cnp.ndarray xa = np.ascontiguousarray(xh, dtype=np.complex128)
    cdef const double[::1] xr = np.ascontiguousarray(xa.real)
    cdef const double[::1] xi = np.ascontiguousarray(xa.imag)
    cdef Py_ssize_t hist = lag + window - 1
    cdef Py_ssize_t n = xr.shape[0] - hist
    if n <= 0:
        return np.zeros(0, np.complex128), np.zeros(0)
    corr = np.empty(n, dtype=np.complex128)
    ratio = np.empty(n)
    cdef double[:, ::1] c = corr.view(np.float64).reshape(n, 2)
    cdef double[::1] r = ratio
    cdef Py_ssize_t i, k, m
    cdef double cre, cim, p, pl, orr, oi, cr, ci, den
    for i in range(n):
        cre = 0.0
        cim = 0.0
        p = 0.0
        pl = 0.0
        for k in range(window):
            m = window - 1 - k + i
            orr = xr[m]
            oi = xi[m]
            cr = xr[m + lag]
            ci = xi[m + lag]
            cre = cre + (orr * cr + oi * ci)
            cim = cim + (oi * cr - orr * ci)
            p = p + (cr * cr + ci * ci)
            pl = pl + (orr * orr + oi * oi)
        c[i, 0] = cre
        c[i, 1] = cim
        den = sqrt(p * pl)
        if den > 0.0:
            r[i] = sqrt(cre * cre + cim * cim) / den
        else:
            r[i] = 0.0
    return corr, ratio


def fixed_fft(re, im, tw_re, tw_im, shifts):
    cdef int64_t[:, ::1] xr = re
    cdef int64_t[:, ::1] xi = im
    cdef const int64_t[::1] wr = np.ascontiguousarray(tw_re, dtype=np.int64)
    cdef const int64_t[::1] wi = np.ascontiguousarray(tw_im, dtype=np.int64)
    cdef const int64_t[::1] sh = np.ascontiguousarray(shifts, dtype=np.int64)
    cdef Py_ssize_t rows = xr.shape[0]
    cdef Py_ssize_t n = xr.shape[1]
    cdef Py_ssize_t row, half, span, step, g, j, a, b, stage
    cdef int64_t ar, ai, br, bi, tr, ti, w_r, w_i, v
    cdef int64_t outs[4]
    cdef int s, q
    cdef bint overflow = False
    for row in range(rows):
        half = 1
        stage = 0
        while half < n:
            span = 2 * half
            step = n // span
            s = 15 + <int>sh[stage]
            for g in range(0, n, span):
                for j in range(half):
                    a = g + j
                    b = a + half
                    w_r = wr[j * step]
                    w_i = wi[j * step]
                    ar = xr[row, a] << 15
                    ai = xi[row, a] << 15
                    br = xr[row, b]
                    bi = xi[row, b]
                    tr = br * w_r - bi * w_i
                    ti = br * w_i + bi * w_r
                    outs[0] = ar + tr
                    outs[1] = ai + ti
                    outs[2] = ar - tr
                    outs[3] = ai - ti
                    for q in range(4):
                        v = _round_shift(outs[q], s)
                        if v > 32767:
                            v = 32767
                            overflow = True
                        elif v < -32768:
                            v = -32768
                            overflow = True
                        outs[q] = v
                    xr[row, a] = outs[0]
                    xi[row, a] = outs[1]
                    xr[row, b] = outs[2]
                    xi[row, b] = outs[3]
            half = span
            stage += 1
    return bool(overflow)
