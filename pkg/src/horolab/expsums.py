"""Kloosterman sums, shifted convolution sums and the lattice form of the Weyl sum."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from . import kernels
from .arith import DomainError, divisors, mobius
from .heckeforms import CoeffTable, TruncationError, k_bessel_star_array
from .lattice import lambda_lattice, gauss_reduce
from .parallel import SERIAL, ParallelMap, chunk_ranges, ordered_sum

THETA = 7.0 / 64.0


# ------------------------------------------------------------- Kloosterman


@lru_cache(maxsize=64)
def _tables(q: int):
    x = np.arange(q, dtype=np.int64)
    inv = np.full(q, -1, dtype=np.int64)
    for v in range(q):
        if math.gcd(v, q) == 1:
            inv[v] = pow(v, -1, q) if q > 1 else 0
    ang = 2 * np.pi * x / q
    return inv, np.cos(ang), np.sin(ang)


def kloosterman_many(a, b, q: int) -> np.ndarray:
    """S(a_k, b_k; q) for paired integer arrays; real by symmetry x -> -x."""
    if q < 1:
        raise DomainError("q must be positive")
    inv, ct, st = _tables(q)
    a = np.atleast_1d(np.asarray(a, dtype=np.int64))
    b = np.atleast_1d(np.asarray(b, dtype=np.int64))
    re, im = kernels.kloosterman_batch(a, b, q, inv, ct, st)
    if np.max(np.abs(im), initial=0.0) > 1e-9 * max(1.0, math.sqrt(q)):
        raise ArithmeticError("Kloosterman sum has a non-negligible imaginary part")
    return re


def kloosterman(a: int, b: int, q: int) -> float:
    """S(a, b; q) = sum over units x mod q of e((a x + b x^-1)/q)."""
    return float(kloosterman_many([a], [b], q)[0])


@dataclass
class KloostermanAverage:
    value: complex
    envelope: float
    ratio: float
    terms: int


def kloosterman_average(H: int, S: int, Q: int, d: int = 1, N: int = 1,
                        a: Callable[[int], complex] = lambda h: 1.0,
                        b: Callable[[int], complex] = lambda s: 1.0,
                        u: Callable[[int, int, int], float] = lambda h, s, q: 1.0,
                        sign: int = 1, theta: float = THETA) -> KloostermanAverage:
    """sum over N | q, d | h with (d, h/d) = 1 of a(h) b(s) S(sign h, s, q) u(h, s, q).

    h, s, q range over [H, 2H], [S, 2S], [Q, 2Q]. The envelope is the
    right-hand side of the averaged bound with all implied constants set to 1
    and epsilon = 0.
    """
    if min(H, S, Q, d, N) < 1:
        raise DomainError("ranges must be nonempty")
    hs = [h for h in range(H, 2 * H + 1) if h % d == 0 and math.gcd(d, h // d) == 1]
    ss = list(range(S, 2 * S + 1))
    qs = [q for q in range(Q, 2 * Q + 1) if q % N == 0]
    if not hs or not qs:
        raise DomainError("empty summation range")
    av = np.array([a(h) for h in hs], dtype=np.complex128)
    bv = np.array([b(s) for s in ss], dtype=np.complex128)
    parts = []
    terms = 0
    hh, sss = np.meshgrid(np.array(hs), np.array(ss), indexing="ij")
    for q in qs:
        kl = kloosterman_many(sign * hh.ravel(), sss.ravel(), q).reshape(hh.shape)
        uu = np.array([[u(h, s, q) for s in ss] for h in hs])
        prod = av[:, None] * bv[None, :] * kl * uu
        parts.append(complex(math.fsum(prod.real.ravel()), math.fsum(prod.imag.ravel())))
        terms += prod.size
    value = ordered_sum(parts)
    l2a = math.sqrt(float(np.sum(np.abs(av) ** 2)))
    l2b = math.sqrt(float(np.sum(np.abs(bv) ** 2)))
    X = H * S / Q**2
    env = (Q * l2b * math.sqrt(1 + X + S / N) * d**theta * l2a
           * math.sqrt(1 + (H / d) / (N * (1 + X))) * (1 + (H * S / Q) ** (-theta)))
    return KloostermanAverage(value, env, abs(value) / env if env else math.inf, terms)


# ----------------------------------------------------- shifted convolutions


def shifted_convolution(lam1, lam2, l1: int, l2: int, sign: int, h: int,
                        G: Callable, M1: int, M2: int) -> float:
    """sum over l1 m1 + sign l2 m2 = h of lam1(m1) lam2(m2) G(m1, m2).

    m_i is restricted to the support [M_i, 2 M_i] of G; each m1 determines m2.
    """
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    m1 = np.arange(M1, 2 * M1 + 1, dtype=np.int64)
    num = h - l1 * m1
    den = sign * l2
    ok = num % den == 0
    m1 = m1[ok]
    m2 = num[ok] // den
    keep = (m2 >= M2) & (m2 <= 2 * M2)
    m1, m2 = m1[keep], m2[keep]
    if m1.size == 0:
        return 0.0
    l1v, l2v = np.asarray(lam1), np.asarray(lam2)
    if m1.max() >= len(l1v) or m2.max() >= len(l2v):
        raise TruncationError("coefficient table too short")
    vals = l1v[m1] * l2v[m2] * np.array([G(int(x), int(y)) for x, y in zip(m1, m2)])
    return math.fsum(vals)


# -------------------------------------------------------------- kernel G


@dataclass(frozen=True)
class KernelG:
    """Separable weight G(x1, x2) = g1(x1) g2(x2) of the lattice sum.

    kind "bessel": 4 e(x0 x2) K*_{t1}(x1) K*_{t2}(|y0| x2) / |x1 x2|^(1/2)
    with the L-values set to 1. kind "holomorphic": the weight for a pair
    (F1, conj F2) of weight k1, k2 forms, g(x) = x^((k-1)/2) exp(-2 pi x)
    with the shift (x0, y0) folded into g2. kind "gaussian": exp(-pi(x1^2 + x2^2)).
    """

    kind: str = "holomorphic"
    p1: float = 12.0
    p2: float = 12.0
    x0: float = 0.0
    y0: float = 1.0

    def __post_init__(self):
        if self.kind not in ("bessel", "holomorphic", "gaussian"):
            raise DomainError(f"unknown kernel kind {self.kind!r}")
        if self.y0 == 0:
            raise DomainError("y0 must be nonzero")

    def g1(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.kind == "bessel":
            return 2 * k_bessel_star_array(self.p1, x) / np.sqrt(x)
        if self.kind == "holomorphic":
            return x ** ((self.p1 - 1) / 2) * np.exp(-2 * np.pi * x)
        return np.exp(-np.pi * x * x)

    def g2(self, x):
        x = np.asarray(x, dtype=np.float64)
        y0 = abs(self.y0)
        if self.kind == "bessel":
            return (2 * np.exp(2j * np.pi * self.x0 * x)
                    * k_bessel_star_array(self.p2, y0 * x) / np.sqrt(x))
        if self.kind == "holomorphic":
            yx = y0 * x
            return (math.sqrt(y0) * yx ** ((self.p2 - 1) / 2) * np.exp(-2 * np.pi * yx)
                    * np.exp(-2j * np.pi * self.x0 * x))
        return np.exp(-np.pi * x * x).astype(np.complex128)

    def __call__(self, x1, x2):
        return self.g1(x1) * self.g2(x2)


def _weights(lam, g, q: int, n_max: int, C: float, chi=None):
    lam = lam.lam if isinstance(lam, CoeffTable) else np.asarray(lam)
    if len(lam) <= n_max:
        raise TruncationError(f"need coefficients up to {n_max}, have {len(lam) - 1}")
    n = np.arange(n_max + 1, dtype=np.float64)
    x = np.maximum(n / q, 1.0 / (C * q))
    w = lam[: n_max + 1] * g(x)
    if chi is not None:
        w = w * chi(np.arange(n_max + 1))
    w = np.asarray(w, dtype=np.complex128)
    w[0] = 0.0
    return w


def weyl_lattice_model(q: int, b: int, lam1, lam2, G: KernelG, C: float = 10.0,
                       sign: int = -1, chi=None, pool: ParallelMap = SERIAL,
                       chunk: int = 256) -> complex:
    """(1/q) sum over (n1, n2) in the lattice n1 + sign b n2 = 0 (mod q), 0 < n_i <= Cq,
    of lam1(n1) lam2(n2) chi(n2) G(n1/q, n2/q).

    Points are enumerated as n = u x + v y over a reduced basis (x, y); for
    each u the admissible v form an interval, so only lattice points are
    visited. ``chi`` is a vectorized function on integers.
    """
    nmax = int(math.floor(C * q))
    w1 = _weights(lam1, G.g1, q, nmax, C)
    w2 = _weights(lam2, G.g2, q, nmax, C, chi)
    rb = gauss_reduce(lambda_lattice(q, b, sign))
    (x1, x2), (y1, y2) = rb.x, rb.y
    # u = det(n, y)/det(x, y), with |det| = q
    ubound = int(math.ceil(nmax * (abs(y1) + abs(y2)) / q)) + 1
    parts = pool.map(
        lambda r: kernels.lattice_model_sum(x1, x2, y1, y2, w1, w2, nmax, r[0], r[1]),
        chunk_ranges(-ubound, ubound + 1, chunk))
    return ordered_sum(parts) / q


def weyl_lattice_bruteforce(q: int, b: int, lam1, lam2, G: KernelG, C: float = 10.0,
                            sign: int = -1, chi=None) -> complex:
    """The same sum by scanning the whole box [1, Cq]^2 (O(q^2))."""
    nmax = int(math.floor(C * q))
    w1 = _weights(lam1, G.g1, q, nmax, C)
    w2 = _weights(lam2, G.g2, q, nmax, C, chi)
    n1 = np.arange(1, nmax + 1, dtype=np.int64)
    re, im = [], []
    step = max(1, 2_000_000 // nmax)
    for lo in range(1, nmax + 1, step):
        n2 = np.arange(lo, min(lo + step, nmax + 1), dtype=np.int64)
        i2, i1 = np.nonzero((n1[None, :] + sign * b * n2[:, None]) % q == 0)
        p = w1[n1[i1]] * w2[n2[i2]]
        re.append(math.fsum(p.real))
        im.append(math.fsum(p.imag))
    return complex(math.fsum(re), math.fsum(im)) / q


def diagonal_term(q: int, b: int, lam1, lam2, G: KernelG, C: float = 10.0,
                  sign: int = -1) -> complex:
    """The h = 0 part: (1/q) sum_m lam1(|x1| m) lam2(|x2| m) G(|x1| m/q, |x2| m/q).

    (x1, x2) is the shortest vector of the lattice.
    """
    rb = gauss_reduce(lambda_lattice(q, b, sign))
    x1, x2 = abs(rb.x[0]), abs(rb.x[1])
    if x1 * x2 == 0:
        raise DomainError("shortest vector has a zero coordinate")
    nmax = int(math.floor(C * q))
    mmax = nmax // max(x1, x2)
    m = np.arange(1, mmax + 1)
    l1 = lam1.lam if isinstance(lam1, CoeffTable) else np.asarray(lam1)
    l2 = lam2.lam if isinstance(lam2, CoeffTable) else np.asarray(lam2)
    if len(l1) <= x1 * mmax or len(l2) <= x2 * mmax:
        raise TruncationError("coefficient table too short")
    v = l1[x1 * m] * l2[x2 * m] * G(x1 * m / q, x2 * m / q)
    v = np.asarray(v, dtype=np.complex128)
    return complex(math.fsum(v.real), math.fsum(v.imag)) / q


def tail_estimate(G: KernelG, C: float, q: int) -> float:
    """Size of the kernel at the cutoff, max over the two edges n_i = Cq."""
    x = np.array([C])
    edge = max(float(np.max(np.abs(G.g1(x)))), float(np.max(np.abs(G.g2(x)))))
    return edge * C * q


# ------------------------------------------------------ character reduction


def character_table(d0: int, fn: Callable[[int], complex]) -> np.ndarray:
    return np.array([fn(n) for n in range(d0)], dtype=np.complex128)


def conductor(chi: np.ndarray) -> int:
    """Smallest f | d0 such that chi(n) depends only on n mod f on units."""
    d0 = len(chi)
    units = [n for n in range(d0) if math.gcd(n, d0) == 1]
    for f in divisors(d0):
        ok = True
        for n in units:
            for m in units:
                if (n - m) % f == 0 and abs(chi[n] - chi[m]) > 1e-12:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return f
    return d0


def coprime_expansion(d0: int, q: int, b: int) -> list[tuple[int, int, int]]:
    """Triples (mu(g), g, g b mod q) for g | rad(d0).

    sum over n2 coprime to d0 of F(n2) = sum_g mu(g) sum_m F(g m), and the
    lattice condition n1 = b n2 (mod q) becomes n1 = (g b) m for n2 = g m.
    """
    out = []
    for g in divisors(d0):
        mu = mobius(g)
        if mu != 0:
            if math.gcd(g, q) != 1:
                raise DomainError("modulus of the character must be coprime to q")
            out.append((mu, g, g * b % q))
    return out


def additive_to_multiplicative(c0: int, d0: int) -> tuple[list[complex], list[np.ndarray]]:
    """Coefficients expressing n -> e(n c0/d0) on units mod d0 through Dirichlet characters.

    Returns (weights, character tables) with e(n c0/d0) = sum_k w_k chi_k(n)
    for gcd(n, d0) = 1. Characters are built from discrete logarithms, so d0
    must be 1, 2, 4, p^k or 2p^k (cyclic unit group).
    """
    units = [n for n in range(d0) if math.gcd(n, d0) == 1]
    phi = len(units)
    g = next((x for x in units if _order(x, d0) == phi), None)
    if g is None:
        raise DomainError(f"unit group mod {d0} is not cyclic")
    log = {}
    x = 1 % d0
    for k in range(phi):
        log[x] = k
        x = x * g % d0
    weights, tables = [], []
    for j in range(phi):
        tab = np.zeros(d0, dtype=np.complex128)
        for n in units:
            tab[n] = cmath.exp(2j * math.pi * j * log[n] / phi)
        # Fourier coefficient <e(. c0/d0), chi_j> on the unit group
        w = sum(cmath.exp(2j * math.pi * n * c0 / d0) * tab[n].conjugate() for n in units) / phi
        weights.append(w)
        tables.append(tab)
    return weights, tables


def _order(x, m):
    if m == 1:
        return 1
    k, y = 1, x % m
    while y != 1:
        y = y * x % m
        k += 1
    return k
