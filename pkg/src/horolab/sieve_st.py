"""Rough-number counting on lattice point sets, the four-case split, and Sato-Tate sums."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .arith import DomainError, prime_sieve, spf_table
from .heckeforms import CoeffTable, TruncationError
from .lattice import s_min

SPF_LIMIT = 10**7

# Frozen from calibrate_selberg_constant(): the largest full-box ratio is 0.4766
# (at y1 = y2 = 1), doubled and rounded up. Not tuned on lattice instances.
SELBERG_C = 1.0


@dataclass
class SieveSet:
    """Integer points with density X and boundary error Y; primes dividing q are not sifted."""

    points: np.ndarray
    X: float
    Y: float
    q: int = 1

    def __len__(self):
        return len(self.points)

    @property
    def n1(self):
        return self.points[:, 0]

    @property
    def n2(self):
        return self.points[:, 1]


def lattice_sieve_set(q: int, b: int, R1: float, R2: float) -> SieveSet:
    """Lattice points n1 + b n2 = 0 (mod q) with n_i > 0 and R1 <= |n| <= R2.

    X is the area of the quarter annulus over q; Y its perimeter over s(q; b).
    """
    if math.gcd(b, q) != 1:
        raise DomainError(f"gcd({b}, {q}) != 1")
    if not 0 < R1 < R2:
        raise DomainError("need 0 < R1 < R2")
    rows = []
    for n2 in range(1, int(R2) + 1):
        r = (-b * n2) % q
        start = r if r > 0 else q
        n1 = np.arange(start, int(R2) + 1, q, dtype=np.int64)
        rr = n1 * n1 + n2 * n2
        n1 = n1[(rr >= R1 * R1) & (rr <= R2 * R2)]
        if n1.size:
            rows.append(np.stack([n1, np.full_like(n1, n2)], axis=1))
    if not rows:
        raise DomainError("region contains no lattice points")
    pts = np.concatenate(rows)
    area = math.pi * (R2 * R2 - R1 * R1) / 4
    perimeter = math.pi * (R1 + R2) / 2 + 2 * (R2 - R1)
    return SieveSet(pts, area / q, perimeter / s_min(q, b), q)


def box_sieve_set(M: int) -> SieveSet:
    """All of [1, M]^2 with q = 1; the lattice is Z^2 and s = 1."""
    g = np.arange(1, M + 1, dtype=np.int64)
    pts = np.stack(np.meshgrid(g, g, indexing="ij"), axis=-1).reshape(-1, 2)
    return SieveSet(pts, float(M * M), 4.0 * M, 1)


def _rough_mask(n: np.ndarray, a: int, y: float, q: int) -> np.ndarray:
    ok = n % a == 0
    m = n // a
    for p in prime_sieve(int(y)) if y >= 2 else []:
        p = int(p)
        if q % p:
            ok &= m % p != 0
    return ok


def rough_count(S: SieveSet, a1: int, a2: int, y1: float, y2: float) -> int:
    """#{n in S : a_i | n_i, n_i/a_i has no prime factor p <= y_i with p not dividing q}."""
    if math.gcd(a1 * a2, S.q) != 1:
        raise DomainError("a1 a2 must be coprime to q")
    return int(np.count_nonzero(_rough_mask(S.n1, a1, y1, S.q) & _rough_mask(S.n2, a2, y2, S.q)))


def selberg_rhs(S: SieveSet, a1, a2, y1, y2, C: float = SELBERG_C) -> float:
    return C * (S.X / (a1 * a2 * math.log1p(y1) * math.log1p(y2)) + S.Y * y1 * y1 * y2 * y2)


def selberg_bound_check(S: SieveSet, a1: int, a2: int, y1: float, y2: float,
                        C: float = SELBERG_C) -> tuple[int, float, bool]:
    lhs = rough_count(S, a1, a2, y1, y2)
    rhs = selberg_rhs(S, a1, a2, y1, y2, C)
    return lhs, rhs, lhs <= rhs


def calibrate_selberg_constant(sizes=(60, 120, 240), a_values=(1, 2, 3, 5, 6),
                               y_values=(1, 2, 3, 5, 8, 13)) -> tuple[float, tuple]:
    """Largest lhs/rhs(C = 1) ratio over full-box instances, with its witness."""
    worst, witness = 0.0, None
    for M in sizes:
        S = box_sieve_set(M)
        for a1 in a_values:
            for a2 in a_values:
                for y1 in y_values:
                    for y2 in y_values:
                        lhs = rough_count(S, a1, a2, y1, y2)
                        r = lhs / selberg_rhs(S, a1, a2, y1, y2, 1.0)
                        if r > worst:
                            worst, witness = r, (M, a1, a2, y1, y2)
    return worst, witness


# ------------------------------------------------------------ case split


@dataclass(frozen=True)
class CaseLabel:
    """Case of n = a b where a = p_1^e_1 ... p_k^e_k is the longest prefix <= z.

    Primes dividing q are skipped. ``p_next`` is p_{k+1}, infinite when the
    whole coprime part fits into a (this includes n = 1, which is case I).
    """

    label: str
    k: int
    a: int
    b: int
    p_next: float


def xi(z: float) -> float:
    return math.log(z) * math.log(math.log(z))


def classify_case(n: int, z: float, q: int = 1, spf: np.ndarray | None = None) -> CaseLabel:
    if n < 1 or z < 16:
        raise DomainError("need n >= 1 and z >= 16")
    if spf is None or len(spf) <= n:
        spf = spf_table(max(n, 2))
    m, a, k = n, 1, 0
    p_next = math.inf
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
            k += 1
        else:
            p_next = p
            break
    sqz = math.sqrt(z)
    big = a > sqz
    if p_next >= sqz:
        label = "I"
    elif not big:
        label = "II"
    elif p_next < xi(z):
        label = "III"
    else:
        label = "IV"
    return CaseLabel(label, k, a, n // a, p_next)


@lru_cache(maxsize=2)
def _spf_cached(N: int) -> np.ndarray:
    if N > SPF_LIMIT:
        raise DomainError(f"factorization tables stop at {SPF_LIMIT}")
    return spf_table(N)


def case_masks(N: int, z: float, q: int = 1) -> np.ndarray:
    """Bitmask (I, II, III, IV -> 1, 2, 4, 8) of every case condition met by n = 1..N."""
    spf = _spf_cached(N)
    return kernels.classify_range(1, N + 1, float(z), q, spf)


def check_case_partition(N: int, z: float, q: int = 1) -> tuple[bool, dict[str, int], int | None]:
    """Exactly one case for each n <= N; returns (ok, counts per case, first bad n)."""
    masks = case_masks(N, z, q)
    single = (masks != 0) & ((masks & (masks - 1)) == 0)
    bad = np.flatnonzero(~single)
    counts = {lab: int(np.count_nonzero(masks == bit))
              for lab, bit in zip(("I", "II", "III", "IV"), (1, 2, 4, 8))}
    return bad.size == 0, counts, (int(bad[0]) + 1 if bad.size else None)


# ----------------------------------------------------- main sum and Sato-Tate


@dataclass
class SieveMainReport:
    lhs: float
    X: float
    z: float
    mertens_factor: float
    rhs_shape: float


def sieve_main_lhs(S: SieveSet, lam1, lam2, q: int | None = None, gamma: float = 0.1) -> SieveMainReport:
    """sum over S with gcd(n1 n2, q) = 1 of lam1(n1) lam2(n2), with the bound shape.

    rhs_shape = X / (log z)^2 * exp(sum_{p <= z} (|lam1(p)| + |lam2(p)|)/p), z = X^gamma.
    """
    q = S.q if q is None else q
    l1 = lam1.lam if isinstance(lam1, CoeffTable) else np.asarray(lam1)
    l2 = lam2.lam if isinstance(lam2, CoeffTable) else np.asarray(lam2)
    if len(S) == 0:
        return SieveMainReport(0.0, S.X, 0.0, 1.0, 0.0)
    n1, n2 = S.n1, S.n2
    if n1.max() >= len(l1) or n2.max() >= len(l2):
        raise TruncationError("coefficient table shorter than the largest coordinate")
    keep = (np.gcd(n1, q) == 1) & (np.gcd(n2, q) == 1)
    lhs = math.fsum(l1[n1[keep]] * l2[n2[keep]])
    z = max(S.X**gamma, 3.0)
    zi = int(z)
    p = prime_sieve(zi) if zi >= 2 else np.array([], dtype=np.int64)
    p = p[(p < len(l1)) & (p < len(l2))]
    mert = math.exp(math.fsum((np.abs(l1[p]) + np.abs(l2[p])) / p))
    return SieveMainReport(lhs, S.X, z, mert, S.X / math.log(z) ** 2 * mert)


def st_partial_sum(table, z: float) -> float:
    """sum over primes p <= z of |lam(p)|/p."""
    lam = table.lam if isinstance(table, CoeffTable) else np.asarray(table)
    zi = int(math.floor(z))
    if zi >= len(lam):
        raise TruncationError(f"table covers n <= {len(lam) - 1}, need primes up to {zi}")
    if zi < 2:
        return 0.0
    p = prime_sieve(zi)
    return math.fsum(np.abs(lam[p]) / p)


def loglog(z: float) -> float:
    return math.log(math.log(z))


def chebyshev_identity_check(n_grid: int = 100_001) -> tuple[bool, float, float]:
    """Check the polynomial majorant of |x| on [-2, 2] and its symmetric-power form.

    Returns (pass, min margin of bound - |x|, max discrepancy between the two forms).
    """
    x = np.linspace(-2.0, 2.0, n_grid)
    u = x * x - 1  # lam(p^2) when lam(p) = x
    bound = 1 + u / 2 - u * u / 18
    sym = 17 / 18 + 4 / 9 * u - (x**4 - 3 * x * x + 1) / 18
    margin = float(np.min(bound - np.abs(x)))
    gap = float(np.max(np.abs(bound - sym)))
    return margin >= -1e-12 and gap <= 1e-12, margin, gap
