"""Integer and modular arithmetic shared by the rest of the package.

Everything here works on Python integers, so intermediate products never
overflow regardless of the modulus size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


class DomainError(ValueError):
    """An input lies outside the mathematical domain of an operation."""


@dataclass(frozen=True)
class Residue:
    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise DomainError(f"modulus must be positive, got {self.modulus}")
        object.__setattr__(self, "value", self.value % self.modulus)

    def __int__(self):
        return self.value

    def __mul__(self, other):
        if isinstance(other, Residue):
            self._check(other)
            other = other.value
        return Residue(self.value * other, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return Residue(-self.value, self.modulus)

    def _check(self, other):
        if other.modulus != self.modulus:
            raise DomainError("residues have different moduli")


@dataclass(frozen=True)
class RationalApprox:
    """A reduced fraction a/q together with a bound on |y - a/q|."""

    a: int
    q: int
    error_bound: float

    @property
    def value(self):
        return self.a / self.q


def mod_inv(a: Residue) -> Residue:
    if math.gcd(a.value, a.modulus) != 1:
        raise DomainError(f"{a.value} is not invertible modulo {a.modulus}")
    return Residue(pow(a.value, -1, a.modulus), a.modulus)


def inv(a: int, q: int) -> int:
    """Inverse of ``a`` modulo ``q`` as a plain integer in [0, q)."""
    return mod_inv(Residue(a, q)).value


# Deterministic Miller-Rabin witnesses, valid for all n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def power_residue(a: Residue, k: int) -> bool:
    """True iff ``a`` is a k-th power residue modulo the prime ``a.modulus``."""
    p = a.modulus
    if not is_prime(p):
        raise DomainError(f"modulus {p} is not prime")
    if a.value == 0:
        raise DomainError("zero is not a unit")
    if k < 1 or (p - 1) % k:
        raise DomainError(f"{k} does not divide p - 1 = {p - 1}")
    return pow(a.value, (p - 1) // k, p) == 1


def continued_fraction(y) -> list[int]:
    """Partial quotients of the exact rational value of ``y``."""
    x = Fraction(y)
    out = []
    while True:
        a = math.floor(x)
        out.append(a)
        x -= a
        if x == 0:
            return out
        x = 1 / x


def convergents(y) -> list[tuple[int, int]]:
    p0, q0, p1, q1 = 1, 0, 0, 1
    out = []
    for a in continued_fraction(y):
        p0, p1 = a * p0 + p1, p0
        q0, q1 = a * q0 + q1, q0
        out.append((p0, q0))
    return out


def best_rational(y, Q: int) -> RationalApprox:
    """Convergent a/q of ``y`` with the largest denominator q <= Q.

    The error bound is 1/(q * q_next) when a further convergent exists and 0
    when a/q equals ``y`` exactly. Floats are expanded exactly, so pass a
    ``Fraction`` when the intended value is a rational that floats cannot
    represent.
    """
    if Q < 1:
        raise DomainError("Q must be at least 1")
    conv = convergents(y)
    idx = max(i for i, (_, q) in enumerate(conv) if q <= Q)
    a, q = conv[idx]
    if idx + 1 < len(conv):
        bound = 1.0 / (q * conv[idx + 1][1])
    else:
        bound = 0.0
    return RationalApprox(a, q, bound)


def prime_sieve(N: int) -> np.ndarray:
    """All primes <= N in increasing order."""
    if N < 2:
        return np.zeros(0, dtype=np.int64)
    mark = np.ones(N + 1, dtype=bool)
    mark[:2] = False
    mark[4::2] = False
    for p in range(3, math.isqrt(N) + 1, 2):
        if mark[p]:
            mark[p * p :: 2 * p] = False
    return np.flatnonzero(mark).astype(np.int64)


def spf_table(N: int) -> np.ndarray:
    """Smallest prime factor of every n <= N (spf[0] = 0, spf[1] = 1)."""
    spf = np.zeros(N + 1, dtype=np.int64)
    if N >= 1:
        spf[1] = 1
    for p in prime_sieve(math.isqrt(N)):
        block = spf[p * p :: p]
        block[block == 0] = p
    rest = spf == 0
    rest[0] = False
    spf[rest] = np.flatnonzero(rest)
    return spf


def factorize(n: int, spf: np.ndarray | None = None) -> list[tuple[int, int]]:
    """Prime factorization as (p, e) pairs with p increasing."""
    if n < 1:
        raise DomainError("factorize needs n >= 1")
    out = []
    if spf is not None and n < len(spf):
        while n > 1:
            p = int(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def divisor_count_table(N: int) -> np.ndarray:
    d = np.zeros(N + 1, dtype=np.int64)
    for k in range(1, N + 1):
        d[k::k] += 1
    return d


def mobius(n: int) -> int:
    mu = 1
    for _, e in factorize(n):
        if e > 1:
            return 0
        mu = -mu
    return mu


def divisors(n: int) -> list[int]:
    ds = [1]
    for p, e in factorize(n):
        ds = [d * p**k for d in ds for k in range(e + 1)]
    return sorted(ds)


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a | n)."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    # Jacobi symbol for odd n.
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def primitive_root(p: int) -> int:
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if p == 2:
        return 1
    fs = [f for f, _ in factorize(p - 1)]
    for g in range(2, p):
        if all(pow(g, (p - 1) // f, p) != 1 for f in fs):
            return g
    raise AssertionError("unreachable")


def is_fundamental_discriminant(D: int) -> bool:
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return _squarefree(abs(D))
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and _squarefree(abs(m))
    return False


def _squarefree(n: int) -> bool:
    return all(e == 1 for _, e in factorize(n)) if n > 1 else True
