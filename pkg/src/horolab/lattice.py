"""The congruence lattice {(n1, n2) : n1 + b n2 = 0 mod q} and its minimum.

All reductions run on exact integers; norms are compared as squared
integers and converted to floats only when reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .arith import DomainError, Residue


def _as_int(b):
    return b.value if isinstance(b, Residue) else int(b)


@dataclass(frozen=True)
class Lattice2D:
    v1: tuple[int, int]
    v2: tuple[int, int]

    def __post_init__(self):
        if self.det == 0:
            raise DomainError("degenerate basis")

    @property
    def det(self) -> int:
        return self.v1[0] * self.v2[1] - self.v1[1] * self.v2[0]

    @property
    def covolume(self) -> int:
        return abs(self.det)

    def contains(self, n) -> bool:
        # Cramer's rule; n is in the lattice iff both coordinates are integral.
        d = self.det
        u = n[0] * self.v2[1] - n[1] * self.v2[0]
        v = self.v1[0] * n[1] - self.v1[1] * n[0]
        return u % d == 0 and v % d == 0


@dataclass(frozen=True)
class ReducedBasis:
    """Lagrange-Gauss reduced basis; ``x`` is a shortest nonzero vector.

    ``transform`` is the integer matrix taking the input basis (as rows) to
    (x, y); it is unimodular.
    """

    x: tuple[int, int]
    y: tuple[int, int]
    transform: tuple[tuple[int, int], tuple[int, int]]

    @property
    def s_sq(self) -> int:
        return _dot(self.x, self.x)

    @property
    def s(self) -> float:
        return math.sqrt(self.s_sq)


def _dot(u, v):
    return u[0] * v[0] + u[1] * v[1]


def lambda_lattice(q: int, b, sign: int = 1) -> Lattice2D:
    """Basis {(-sign*b, 1), (q, 0)} of the lattice n1 + sign*b*n2 = 0 (mod q)."""
    b = _as_int(b)
    if q < 1:
        raise DomainError("q must be positive")
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    if math.gcd(b, q) != 1:
        raise DomainError(f"gcd({b}, {q}) != 1")
    return Lattice2D((-sign * (b % q), 1), (q, 0))


def gauss_reduce(L: Lattice2D) -> ReducedBasis:
    u, v = L.v1, L.v2
    # rows of M express u, v in terms of the input basis
    mu, mv = (1, 0), (0, 1)
    nu, nv = _dot(u, u), _dot(v, v)
    if nu > nv:
        u, v, nu, nv, mu, mv = v, u, nv, nu, mv, mu
    while True:
        # nearest integer to <u,v>/<u,u>, exact
        m = (2 * _dot(u, v) + nu) // (2 * nu)
        if m:
            v = (v[0] - m * u[0], v[1] - m * u[1])
            mv = (mv[0] - m * mu[0], mv[1] - m * mu[1])
            nv = _dot(v, v)
        if nv >= nu:
            break
        u, v, nu, nv, mu, mv = v, u, nv, nu, mv, mu
    return ReducedBasis(u, v, (mu, mv))


def reduced_basis(q: int, b, sign: int = 1) -> ReducedBasis:
    return gauss_reduce(lambda_lattice(q, b, sign))


def s_min_sq(q: int, b) -> int:
    return reduced_basis(q, b).s_sq


def s_min(q: int, b) -> float:
    """Euclidean length of a shortest nonzero vector of the lattice."""
    return math.sqrt(s_min_sq(q, b))


def minkowski_ok(q: int, s_sq: int) -> bool:
    """Exact test of s^2 <= (2/sqrt 3) q, i.e. 3 s^4 <= 4 q^2."""
    return 3 * s_sq * s_sq <= 4 * q * q


@dataclass
class MinLemmaReport:
    q: int
    b: int
    d: int
    checks: dict[str, bool]
    skipped: bool = False

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def check_min_lemma(q: int, b, d: int) -> MinLemmaReport:
    """Check how the minimum moves when b is multiplied by d or its inverse.

    Verifies s(b)/d <= s(bd) <= d s(b), the same bounds for b * d^-1, and
    s(b) = s(b^-1), all through exact squared norms.
    """
    b = _as_int(b)
    if math.gcd(b * d, q) != 1:
        raise DomainError(f"gcd({b}*{d}, {q}) != 1")
    if q <= 3:
        return MinLemmaReport(q, b, d, {}, skipped=True)
    d2 = d * d
    s_b = s_min_sq(q, b)
    s_bd = s_min_sq(q, b * d % q)
    s_bdbar = s_min_sq(q, b * pow(d, -1, q) % q)
    s_bbar = s_min_sq(q, pow(b, -1, q))
    checks = {
        "lower_bd": s_b <= d2 * s_bd,
        "upper_bd": s_bd <= d2 * s_b,
        "lower_bdbar": s_b <= d2 * s_bdbar,
        "upper_bdbar": s_bdbar <= d2 * s_b,
        "inverse": s_b == s_bbar,
    }
    return MinLemmaReport(q, b, d, checks)


def b_for_vector(q: int, x1: int, x2: int) -> int:
    """A residue b with (x1, x2) in the lattice, i.e. x1 + b x2 = 0 (mod q)."""
    return (-x1 * pow(x2, -1, q)) % q
