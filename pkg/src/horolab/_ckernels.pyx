# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels. API mirrors horolab._pykernels exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor, ceil, sqrt, exp, log, INFINITY
from libc.stdint cimport int64_t, uint8_t

cnp.import_array()

BACKEND = "cython"

CASE_I, CASE_II, CASE_III, CASE_IV = 1, 2, 4, 8


cdef inline void _neumaier(double *s, double *c, double v) noexcept nogil:
    cdef double t = s[0] + v
    if abs(s[0]) >= abs(v):
        c[0] += (s[0] - t) + v
    else:
        c[0] += (v - t) + s[0]
    s[0] = t


def fd_reduce_batch(x, y):
    cdef double[::1] xs = np.array(x, dtype=np.float64).ravel()
    cdef double[::1] ys = np.array(y, dtype=np.float64).ravel()
    cdef Py_ssize_t n = xs.shape[0], k
    cdef cnp.ndarray[double, ndim=1] A = np.empty(n)
    cdef cnp.ndarray[double, ndim=1] B = np.empty(n)
    cdef cnp.ndarray[double, ndim=1] C = np.empty(n)
    cdef cnp.ndarray[double, ndim=1] D = np.empty(n)
    cdef double[::1] Av = A, Bv = B, Cv = C, Dv = D
    cdef double xx, yy, a, b, c, d, m, r, t0, t1
    cdef int it
    with nogil:
        for k in range(n):
            xx = xs[k]
            yy = ys[k]
            a = 1.0; b = 0.0; c = 0.0; d = 1.0
            for it in range(100000):
                m = floor(xx + 0.5)
                xx = xx - m
                a = a - m * c
                b = b - m * d
                r = xx * xx + yy * yy
                if r >= 1.0 - 1e-14:
                    break
                xx = -xx / r
                yy = yy / r
                t0 = a; t1 = b
                a = -c; b = -d
                c = t0; d = t1
            xs[k] = xx
            ys[k] = yy
            Av[k] = a; Bv[k] = b; Cv[k] = c; Dv[k] = d
    return np.asarray(xs), np.asarray(ys), A, B, C, D


cdef inline double _bump(double t, double y0, double y1) noexcept nogil:
    cdef double u = (2.0 * t - y0 - y1) / (y1 - y0)
    if u >= 1.0 or u <= -1.0:
        return 0.0
    return exp(1.0 - 1.0 / (1.0 - u * u))


cdef inline int64_t _gcd(int64_t a, int64_t b) noexcept nogil:
    cdef int64_t t
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        t = a % b
        a = b
        b = t
    return a


def incomplete_eisenstein_reduced(xr, yr, double y0, double y1):
    cdef double[::1] xs = np.ascontiguousarray(xr, dtype=np.float64)
    cdef double[::1] ys = np.ascontiguousarray(yr, dtype=np.float64)
    cdef Py_ssize_t n = xs.shape[0], k
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n)
    cdef double[::1] ov = out
    cdef double x, y, total, lim, rem, w, t, cx
    cdef int64_t c, d, dlo, dhi
    with nogil:
        for k in range(n):
            x = xs[k]
            y = ys[k]
            total = _bump(y, y0, y1)
            lim = y / y0
            c = 1
            while c * c * y * y <= lim:
                rem = lim - c * c * y * y
                w = sqrt(rem)
                cx = c * x
                dlo = <int64_t>ceil(-cx - w)
                dhi = <int64_t>floor(-cx + w)
                d = dlo
                while d <= dhi:
                    if _gcd(c, d) == 1:
                        t = y / ((cx + d) * (cx + d) + c * c * y * y)
                        total += _bump(t, y0, y1)
                    d += 1
                c += 1
            ov[k] = total
    return out


def pair_gather_sum(v1, v2, int64_t b, int64_t q, int64_t lo, int64_t hi):
    cdef double complex[::1] a1 = np.ascontiguousarray(v1, dtype=np.complex128)
    cdef double complex[::1] a2 = np.ascontiguousarray(v2, dtype=np.complex128)
    cdef double sr = 0.0, cr = 0.0, si = 0.0, ci = 0.0
    cdef double complex p
    cdef int64_t a, idx
    with nogil:
        idx = (lo * b) % q
        for a in range(lo, hi):
            p = a1[a] * a2[idx]
            _neumaier(&sr, &cr, p.real)
            _neumaier(&si, &ci, p.imag)
            idx += b
            if idx >= q:
                idx -= q
    return complex(sr + cr, si + ci)


cdef inline int64_t _fdiv(int64_t a, int64_t b) noexcept nogil:
    cdef int64_t qq = a / b
    if (a % b != 0) and ((a < 0) != (b < 0)):
        qq -= 1
    return qq


cdef inline int64_t _cdiv(int64_t a, int64_t b) noexcept nogil:
    return -_fdiv(-a, b)


cdef inline void _v_range(int64_t u, int64_t xk, int64_t yk, int64_t nmax,
                          int64_t *lo, int64_t *hi) noexcept nogil:
    cdef int64_t base = u * xk
    if yk > 0:
        lo[0] = _cdiv(1 - base, yk)
        hi[0] = _fdiv(nmax - base, yk)
    elif yk < 0:
        lo[0] = _cdiv(nmax - base, yk)
        hi[0] = _fdiv(1 - base, yk)
    elif 1 <= base <= nmax:
        lo[0] = -(<int64_t>1 << 62)
        hi[0] = <int64_t>1 << 62
    else:
        lo[0] = 1
        hi[0] = 0


def lattice_model_sum(int64_t x1, int64_t x2, int64_t y1, int64_t y2, w1, w2,
                      int64_t nmax, int64_t u_lo, int64_t u_hi):
    cdef double complex[::1] a1 = np.ascontiguousarray(w1, dtype=np.complex128)
    cdef double complex[::1] a2 = np.ascontiguousarray(w2, dtype=np.complex128)
    cdef double sr = 0.0, cr = 0.0, si = 0.0, ci = 0.0
    cdef double complex p
    cdef int64_t u, v, lo1, hi1, lo2, hi2, lo, hi, n1, n2
    with nogil:
        for u in range(u_lo, u_hi):
            _v_range(u, x1, y1, nmax, &lo1, &hi1)
            _v_range(u, x2, y2, nmax, &lo2, &hi2)
            lo = lo1 if lo1 > lo2 else lo2
            hi = hi1 if hi1 < hi2 else hi2
            if lo > hi:
                continue
            n1 = u * x1 + lo * y1
            n2 = u * x2 + lo * y2
            for v in range(lo, hi + 1):
                p = a1[n1] * a2[n2]
                _neumaier(&sr, &cr, p.real)
                _neumaier(&si, &ci, p.imag)
                n1 += y1
                n2 += y2
    return complex(sr + cr, si + ci)


def kloosterman_batch(a_arr, b_arr, int64_t q, inv_table, cos_table, sin_table):
    cdef int64_t[::1] av = np.ascontiguousarray(a_arr, dtype=np.int64)
    cdef int64_t[::1] bv = np.ascontiguousarray(b_arr, dtype=np.int64)
    cdef int64_t[::1] iv = np.ascontiguousarray(inv_table, dtype=np.int64)
    cdef double[::1] ct = np.ascontiguousarray(cos_table, dtype=np.float64)
    cdef double[::1] st = np.ascontiguousarray(sin_table, dtype=np.float64)
    cdef Py_ssize_t m = av.shape[0], k
    cdef cnp.ndarray[double, ndim=1] re = np.empty(m)
    cdef cnp.ndarray[double, ndim=1] im = np.empty(m)
    cdef double[::1] rv = re, imv = im
    cdef double sr, cr, si, ci
    cdef int64_t x, a, b, idx
    with nogil:
        for k in range(m):
            a = ((av[k] % q) + q) % q
            b = ((bv[k] % q) + q) % q
            sr = 0.0; cr = 0.0; si = 0.0; ci = 0.0
            for x in range(q):
                if iv[x] < 0:
                    continue
                idx = (a * x + b * iv[x]) % q
                _neumaier(&sr, &cr, ct[idx])
                _neumaier(&si, &ci, st[idx])
            rv[k] = sr + cr
            imv[k] = si + ci
    return re, im


def classify_range(int64_t lo, int64_t hi, double z, int64_t q, spf):
    cdef int64_t[::1] sp = np.ascontiguousarray(spf, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] out = np.zeros(hi - lo, dtype=np.uint8)
    cdef uint8_t[::1] ov = out
    cdef double sqz = sqrt(z)
    cdef double xi = log(z) * log(log(z))
    cdef int64_t n, m, p, pe, a
    cdef double nxt
    cdef uint8_t mask
    cdef bint big_a
    with nogil:
        for n in range(lo, hi):
            m = n
            a = 1
            nxt = INFINITY
            while m > 1:
                p = sp[m]
                pe = 1
                while m % p == 0:
                    m = m / p
                    pe *= p
                if q % p == 0:
                    continue
                if a * pe <= z:
                    a *= pe
                else:
                    nxt = <double>p
                    break
            mask = 0
            big_a = a > sqz
            if nxt >= sqz:
                mask |= 1
            if nxt < sqz and not big_a:
                mask |= 2
            if nxt < xi and big_a:
                mask |= 4
            if xi <= nxt <= sqz and big_a:
                mask |= 8
            ov[n - lo] = mask
    return out
