"""Pure-Python/numpy implementations of the hot kernels.

Same signatures and semantics as the compiled ``_ckernels`` module; used when
the extension is not built or when ``HOROLAB_PURE_PYTHON=1``.
"""

import math

import numpy as np

BACKEND = "python"


def fd_reduce_batch(x, y):
    """Reduce points into the standard fundamental domain.

    Returns (xr, yr, A, B, C, D) with [[A, B], [C, D]] in SL2(Z) mapping
    z = x + iy to xr + i yr. Matrix entries are returned as floats.
    """
    x = np.array(x, dtype=np.float64)
    y = np.array(y, dtype=np.float64)
    A = np.ones_like(x)
    B = np.zeros_like(x)
    C = np.zeros_like(x)
    D = np.ones_like(x)
    active = np.arange(x.size)
    for _ in range(100000):
        if active.size == 0:
            break
        xa, ya = x[active], y[active]
        n = np.floor(xa + 0.5)
        xa = xa - n
        A[active] -= n * C[active]
        B[active] -= n * D[active]
        r = xa * xa + ya * ya
        done = r >= 1.0 - 1e-14
        x[active] = xa
        flip = active[~done]
        rf = r[~done]
        x[flip] = -xa[~done] / rf
        y[flip] = ya[~done] / rf
        A[flip], B[flip], C[flip], D[flip] = -C[flip], -D[flip], A[flip], B[flip]
        active = flip
    return x, y, A, B, C, D


def _bump(t, y0, y1):
    u = (2.0 * t - y0 - y1) / (y1 - y0)
    if abs(u) >= 1.0:
        return 0.0
    return math.exp(1.0 - 1.0 / (1.0 - u * u))


def incomplete_eisenstein_reduced(xr, yr, y0, y1):
    """Sum of the standard bump psi over Gamma_inf cosets, at reduced points."""
    out = np.empty(len(xr))
    for k in range(len(xr)):
        x, y = float(xr[k]), float(yr[k])
        total = _bump(y, y0, y1)
        lim = y / y0
        c = 1
        while c * c * y * y <= lim:
            rem = lim - c * c * y * y
            w = math.sqrt(rem)
            dlo = math.ceil(-c * x - w)
            dhi = math.floor(-c * x + w)
            for d in range(dlo, dhi + 1):
                if math.gcd(c, d) != 1:
                    continue
                t = y / ((c * x + d) ** 2 + c * c * y * y)
                total += _bump(t, y0, y1)
            c += 1
        out[k] = total
    return out


def pair_gather_sum(v1, v2, b, q, lo, hi):
    """Compensated sum of v1[a] * v2[a*b mod q] over lo <= a < hi."""
    a = np.arange(lo, hi, dtype=np.int64)
    prod = v1[a] * v2[(a * b) % q]
    return complex(math.fsum(prod.real), math.fsum(prod.imag))


def _floordiv(a, b):
    return a // b


def _ceildiv(a, b):
    return -((-a) // b)


def _v_range(u, xk, yk, nmax):
    # v with 1 <= u*xk + v*yk <= nmax
    base = u * xk
    if yk > 0:
        return _ceildiv(1 - base, yk), _floordiv(nmax - base, yk)
    if yk < 0:
        return _ceildiv(nmax - base, yk), _floordiv(1 - base, yk)
    if 1 <= base <= nmax:
        return -(1 << 62), 1 << 62
    return 1, 0


def lattice_model_sum(x1, x2, y1, y2, w1, w2, nmax, u_lo, u_hi):
    """Sum of w1[n1] * w2[n2] over lattice points n = u*x + v*y in [1, nmax]^2.

    Only u in [u_lo, u_hi) is visited; for each u the admissible v form an
    interval computed directly, so only lattice points are touched.
    """
    re_parts = []
    im_parts = []
    for u in range(u_lo, u_hi):
        lo1, hi1 = _v_range(u, x1, y1, nmax)
        lo2, hi2 = _v_range(u, x2, y2, nmax)
        lo, hi = max(lo1, lo2), min(hi1, hi2)
        if lo > hi:
            continue
        v = np.arange(lo, hi + 1, dtype=np.int64)
        n1 = u * x1 + v * y1
        n2 = u * x2 + v * y2
        prod = w1[n1] * w2[n2]
        re_parts.append(prod.real)
        im_parts.append(prod.imag)
    if not re_parts:
        return 0j
    return complex(math.fsum(np.concatenate(re_parts)), math.fsum(np.concatenate(im_parts)))


def kloosterman_batch(a_arr, b_arr, q, inv_table, cos_table, sin_table):
    """Kloosterman sums S(a, b; q) for paired arrays of a and b.

    ``inv_table[x]`` is the inverse of x mod q, or -1 when x is not a unit.
    """
    xs = np.flatnonzero(inv_table >= 0)
    xinv = inv_table[xs]
    re = np.empty(len(a_arr))
    im = np.empty(len(a_arr))
    for k in range(len(a_arr)):
        idx = (a_arr[k] * xs + b_arr[k] * xinv) % q
        re[k] = math.fsum(cos_table[idx])
        im[k] = math.fsum(sin_table[idx])
    return re, im


CASE_I, CASE_II, CASE_III, CASE_IV = 1, 2, 4, 8


def classify_range(lo, hi, z, q, spf):
    """Bitmask of the four case conditions satisfied by each n in [lo, hi).

    Bits 1, 2, 4, 8 stand for cases I..IV. A correct decomposition sets
    exactly one bit for every n.
    """
    sqz = math.sqrt(z)
    xi = math.log(z) * math.log(math.log(z))
    out = np.zeros(hi - lo, dtype=np.uint8)
    for n in range(lo, hi):
        m = n
        a = 1
        nxt = math.inf
        while m > 1:
            p = int(spf[m])
            pe = 1
            while m % p == 0:
                m //= p
                pe *= p
            if q % p == 0:
                continue
            if a * pe <= z:
                a *= pe
            else:
                nxt = p
                break
        mask = 0
        big_a = a > sqz
        if nxt >= sqz:
            mask |= CASE_I
        if nxt < sqz and not big_a:
            mask |= CASE_II
        if nxt < xi and big_a:
            mask |= CASE_III
        if xi <= nxt <= sqz and big_a:
            mask |= CASE_IV
        out[n - lo] = mask
    return out
