"""Hecke eigenvalue tables and automorphic test functions on the upper half plane.

Eigenvalues are Deligne-normalized throughout: lam(n) = a(n) / n^((k-1)/2).
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import count
from typing import Callable

import numpy as np
from scipy import integrate

from . import kernels
from .arith import DomainError, is_fundamental_discriminant, kronecker, prime_sieve
from .quadforms_cm import automorph_count, cyclic_class_exponents

KINDS = ("holomorphic-level-1", "CM-theta", "loaded-maass", "eisenstein-divisor", "synthetic")


class TruncationError(RuntimeError):
    """A coefficient table is too short for the requested evaluation."""


@dataclass
class CoeffTable:
    """Normalized eigenvalues lam[1..N]; ``lam[0]`` is unused and zero."""

    lam: np.ndarray
    kind: str
    weight: float = 0.0
    conductor: int = 1
    nebentypus: Callable[[int], int] | None = None
    exact: list[int] | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown coefficient kind {self.kind!r}")

    @property
    def N(self) -> int:
        return len(self.lam) - 1

    def __getitem__(self, n):
        return self.lam[n]

    def require(self, n: int):
        if n > self.N:
            raise TruncationError(f"table holds {self.N} coefficients, need {n}")

    def abs(self) -> "CoeffTable":
        return CoeffTable(np.abs(self.lam), self.kind, self.weight, self.conductor)


# ------------------------------------------------------------------ tables


def _eta_series(N: int) -> list[int]:
    """prod (1 - q^n) to order q^(N-1), by Euler's pentagonal number theorem."""
    c = [0] * N
    c[0] = 1
    for k in count(1):
        e1 = k * (3 * k - 1) // 2
        if e1 >= N:
            break
        sgn = -1 if k % 2 else 1
        c[e1] += sgn
        e2 = k * (3 * k + 1) // 2
        if e2 < N:
            c[e2] += sgn
    return c


@lru_cache(maxsize=4)
def tau_exact(N: int) -> tuple[int, ...]:
    """Ramanujan tau(0..N) as exact integers (tau(0) = 0)."""
    import flint

    eta = flint.fmpz_poly(_eta_series(N))
    e2 = eta.mul_low(eta, N)
    e4 = e2.mul_low(e2, N)
    e8 = e4.mul_low(e4, N)
    e16 = e8.mul_low(e8, N)
    e24 = e16.mul_low(e8, N)
    co = [int(x) for x in e24.coeffs()]
    co += [0] * (N - len(co))
    return (0, *co)


def tau_table(N: int) -> CoeffTable:
    if N < 1:
        raise DomainError("N must be positive")
    tau = tau_exact(N)
    n = np.arange(1, N + 1, dtype=np.float64)
    lam = np.zeros(N + 1)
    lam[1:] = np.array([float(t) for t in tau[1:]]) / n**5.5
    return CoeffTable(lam, "holomorphic-level-1", weight=12, conductor=1, exact=list(tau))


def hecke_extend(prime_values, N: int, chi=None, kind="synthetic", weight=0.0, conductor=1):
    """Full table from lam(p) via the Hecke recursion and multiplicativity.

    lam(p^(k+1)) = lam(p) lam(p^k) - chi(p) lam(p^(k-1)); chi defaults to the
    trivial character. ``prime_values`` maps each prime p <= N to lam(p).
    """
    lam = np.ones(N + 1)
    lam[0] = 0.0
    for p in prime_sieve(N):
        p = int(p)
        if p not in prime_values:
            raise DomainError(f"missing prime value lambda({p})")
        lp = float(prime_values[p])
        cp = 1 if chi is None else chi(p)
        prev, cur = 1.0, lp
        pk = p
        while pk <= N:
            idx = np.arange(pk, N + 1, pk)
            if pk * p <= N:
                idx = idx[idx % (pk * p) != 0]
            lam[idx] *= cur
            prev, cur = cur, lp * cur - cp * prev
            pk *= p
    return CoeffTable(lam, kind, weight, conductor, nebentypus=chi)


def divisor_table(N: int) -> CoeffTable:
    """Eisenstein-type coefficients lam(n) = d(n) (not Ramanujan-bounded by design)."""
    d = np.zeros(N + 1)
    for k in range(1, N + 1):
        d[k::k] += 1
    return CoeffTable(d, "eisenstein-divisor", conductor=1)


def cm_theta_table(D: int, char_index: int, N: int) -> CoeffTable:
    """Theta series attached to a class group character of Q(sqrt D), D < 0.

    a(n) = sum over classes C of chi(C) * r_C(n) / w, where r_C counts
    representations by the reduced form of C and w is the number of
    automorphs. The result is a weight-1 eigenform with nebentypus (D|.).
    """
    if D >= 0 or not is_fundamental_discriminant(D):
        raise DomainError(f"{D} is not a negative fundamental discriminant")
    _, logs = cyclic_class_exponents(D)
    h = len(logs)
    w = automorph_count(D)
    acc = np.zeros(N + 1, dtype=np.complex128)
    for form, e in logs.items():
        chi = cmath.exp(2j * math.pi * char_index * e / h)
        acc += chi * _representation_counts(form.a, form.b, form.c, N)
    if np.max(np.abs(acc.imag)) > 1e-6:
        raise AssertionError("theta coefficients are not real")
    lam = acc.real / w
    lam[0] = 0.0
    return CoeffTable(np.round(lam, 9), "CM-theta", weight=1, conductor=-D,
                      nebentypus=lambda n: kronecker(D, n))


def _representation_counts(a, b, c, N):
    """r(n) = #{(x, y) : a x^2 + b x y + c y^2 = n} for 0 <= n <= N."""
    D = b * b - 4 * a * c
    counts = np.zeros(N + 1, dtype=np.int64)
    # a f(x, y) = (a x + b y / 2)^2 + |D| y^2 / 4, so |y| <= sqrt(4 a N / |D|)
    ymax = math.isqrt(4 * a * N // -D) + 1
    for y in range(-ymax, ymax + 1):
        rest = 4 * a * N + D * y * y
        if rest < 0:
            continue
        half = math.isqrt(rest)
        xlo = -(half + b * y) // (2 * a) - 1
        xhi = (half - b * y) // (2 * a) + 1
        x = np.arange(xlo, xhi + 1, dtype=np.int64)
        vals = a * x * x + b * x * y + c * y * y
        vals = vals[(vals >= 0) & (vals <= N)]
        counts += np.bincount(vals, minlength=N + 1)
    return counts


def load_maass(path) -> tuple[CoeffTable, float, int]:
    """Read a Maass coefficient file.

    Line 1: ``t <spectral parameter> eps <+1|-1>``; then ``n lambda(n)`` lines
    with n = 1, 2, 3, ... Lines starting with ``#`` are comments.
    """
    with open(path) as fh:
        lines = [ln.split() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    head = lines[0]
    if len(head) != 4 or head[0] != "t" or head[2] != "eps":
        raise ValueError(f"bad header line: {' '.join(head)}")
    t = float(head[1])
    eps = int(head[3])
    if eps not in (1, -1):
        raise ValueError("eps must be +1 or -1")
    lam = [0.0]
    for expected, row in enumerate(lines[1:], start=1):
        n = int(row[0])
        if n != expected:
            raise ValueError(f"missing coefficient: expected n={expected}, found n={n}")
        lam.append(float(row[1]))
    return CoeffTable(np.array(lam), "loaded-maass", weight=t), t, eps


# --------------------------------------------------------- half plane points


@dataclass(frozen=True)
class HalfPlanePoint:
    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise DomainError("point must lie in the upper half plane")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @classmethod
    def from_complex(cls, z: complex) -> "HalfPlanePoint":
        return cls(z.real, z.imag)


def fd_reduce(z) -> tuple[HalfPlanePoint, tuple[tuple[int, int], tuple[int, int]]]:
    """Move z into the standard fundamental domain.

    Returns the reduced point and an integer matrix gamma in SL2(Z) with
    gamma z equal to it. The domain is taken half open, x in [-1/2, 1/2),
    so boundary points land on x = -1/2.
    """
    if not isinstance(z, HalfPlanePoint):
        z = HalfPlanePoint.from_complex(complex(z))
    x, y = z.x, z.y
    a, b, c, d = 1, 0, 0, 1
    for _ in range(100000):
        n = math.floor(x + 0.5)
        x -= n
        a, b = a - n * c, b - n * d
        r = x * x + y * y
        if r >= 1.0 - 1e-14:
            break
        x, y = -x / r, y / r
        a, b, c, d = -c, -d, a, b
    return HalfPlanePoint(x, y), ((a, b), (c, d))


def mobius_apply(g, z: complex) -> complex:
    (a, b), (c, d) = g
    return (a * z + b) / (c * z + d)


def _split(z):
    z = np.asarray(z, dtype=np.complex128)
    if np.any(z.imag <= 0):
        raise DomainError("points must lie in the upper half plane")
    return z


def fd_reduce_array(z):
    """Vectorized reduction; returns (reduced points, c, d) with c z + d the cocycle."""
    z = _split(z)
    xr, yr, _, _, C, D = kernels.fd_reduce_batch(z.real.ravel(), z.imag.ravel())
    shape = z.shape
    return (xr + 1j * yr).reshape(shape), C.reshape(shape), D.reshape(shape)


# ---------------------------------------------------------- Delta functions

_DELTA_TERMS = 40


def _delta_coeffs():
    return np.array([float(t) for t in tau_exact(_DELTA_TERMS + 1)[1:]])


def _delta_tail_bound(y, M):
    # y^6 * sum_{n > M} d(n) n^5.5 e^{-2 pi n y}, with d(n) <= 2 sqrt(n)
    n = np.arange(M + 1, M + 200, dtype=np.float64)
    return float(y**6 * np.sum(2 * n**6 * np.exp(-2 * np.pi * n * y)))


def delta_normalized(z):
    """F(z) = y^6 Delta(z), evaluated after reduction with the weight-12 phase.

    |F| is SL2(Z)-invariant and F(gamma z) = F(z) ((cz + d)/|cz + d|)^12.
    """
    z = _split(z)
    zr, C, D = fd_reduce_array(z)
    tau = _delta_coeffs()
    n = np.arange(1, len(tau) + 1)
    qz = np.exp(2j * np.pi * np.multiply.outer(zr, n))
    delta = qz @ tau
    j = C * z + D
    phase = (np.conj(j) / np.abs(j)) ** 12
    return zr.imag**6 * delta * phase


def eval_delta_density(z, tol: float = 1e-12):
    """phi(z) = y^12 |Delta(z)|^2, absolute error at most ``tol``."""
    z = _split(z)
    zr, _, _ = fd_reduce_array(z)
    ymin = float(np.min(zr.imag)) if zr.size else 1.0
    tau = _delta_coeffs()
    M = 1
    while M < len(tau) and _delta_tail_bound(ymin, M) * 3.0 > tol:
        M += 1
    if _delta_tail_bound(ymin, M) * 3.0 > tol and M == len(tau):
        raise TruncationError("tolerance not reachable with cached tau values")
    n = np.arange(1, M + 1)
    qz = np.exp(2j * np.pi * np.multiply.outer(zr, n))
    F = zr.imag**6 * (qz @ tau[:M])
    out = np.abs(F) ** 2
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=1)
def delta_density_mean() -> float:
    """Integral of y^12 |Delta|^2 against (3/pi) dx dy / y^2 over X."""
    xs, xw = np.polynomial.legendre.leggauss(64)
    xs = 0.25 * (xs + 1)  # [0, 1/2]; integrand is even in x
    xw = 0.25 * xw
    total = 0.0
    us, uw = np.polynomial.legendre.leggauss(160)
    for x, wx in zip(xs, xw):
        y0 = math.sqrt(1 - x * x)
        y1 = 8.0
        ys = y0 + (us + 1) * (y1 - y0) / 2
        wy = uw * (y1 - y0) / 2
        vals = eval_delta_density(x + 1j * ys, tol=1e-30) / ys**2
        total += wx * np.dot(wy, vals)
    return 2 * total * 3 / math.pi


# ------------------------------------------------------- incomplete Eisenstein


@dataclass(frozen=True)
class Bump:
    """psi(y) = exp(1 - 1/(1 - u^2)) with u mapping [y0, y1] onto [-1, 1]."""

    y0: float
    y1: float

    def __post_init__(self):
        if not 0 < self.y0 < self.y1:
            raise DomainError("need 0 < y0 < y1")

    def __call__(self, y):
        y = np.asarray(y, dtype=np.float64)
        u = (2 * y - self.y0 - self.y1) / (self.y1 - self.y0)
        inside = np.abs(u) < 1
        out = np.zeros_like(y)
        out[inside] = np.exp(1 - 1 / (1 - u[inside] ** 2))
        return out if out.ndim else float(out)

    def mean(self) -> float:
        """(3/pi) * integral of psi(y) y^-2 dy: the mu_X-mean of E(.|psi)."""
        val, _ = integrate.quad(lambda t: self(t) / t**2, self.y0, self.y1,
                                epsabs=1e-14, epsrel=1e-13, limit=200)
        return 3 / math.pi * val


def incomplete_eisenstein(z, psi: Bump):
    """E(z|psi) = sum over Gamma_inf \\ Gamma of psi(Im gamma z).

    Evaluated at the reduced point, where only finitely many cosets reach
    the support of psi.
    """
    z = _split(z)
    zr, _, _ = fd_reduce_array(z)
    out = kernels.incomplete_eisenstein_reduced(
        np.ascontiguousarray(zr.real.ravel()), np.ascontiguousarray(zr.imag.ravel()),
        psi.y0, psi.y1).reshape(z.shape)
    return float(out) if out.ndim == 0 else out


def incomplete_eisenstein_generic(z: complex, psi: Callable[[float], float], y0: float) -> float:
    """Same sum for an arbitrary psi supported in [y0, inf); slow, scalar."""
    zr, _ = fd_reduce(z)
    x, y = zr.x, zr.y
    total = psi(y)
    lim = y / y0
    c = 1
    while c * c * y * y <= lim:
        w = math.sqrt(lim - c * c * y * y)
        for d in range(math.ceil(-c * x - w), math.floor(-c * x + w) + 1):
            if math.gcd(c, d) == 1:
                total += psi(y / ((c * x + d) ** 2 + (c * y) ** 2))
        c += 1
    return total


# ------------------------------------------------------------ Bessel kernels


def k_bessel_star(t: float, x: float) -> float:
    """cosh(pi t)^(1/2) K_{it}(2 pi x) via adaptive quadrature.

    For t > 0 the integral cancels down from O(1) to O(cosh(pi t)^(-1/2)),
    so the absolute error is about 1e-16 cosh(pi t)^(1/2), not relative.
    """
    if x <= 0:
        raise DomainError("x must be positive")
    X = 2 * math.pi * x
    umax = math.acosh(max(1.0, 745.0 / X))
    f = lambda u: math.exp(-X * math.cosh(u))
    scale = math.sqrt(math.cosh(math.pi * t))
    if t == 0:
        val, _ = integrate.quad(f, 0, umax, epsabs=0, epsrel=1e-13, limit=400)
    else:
        # quadpack flags the cancellation as roundoff; the bound is in the docstring
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, _ = integrate.quad(f, 0, umax, weight="cos", wvar=t,
                                    epsabs=1e-15 / scale, epsrel=1e-13, limit=400)
    return scale * val


def k_bessel_star_array(t: float, x, h: float | None = None):
    """Vectorized K* by the trapezoid rule in u (spectrally accurate here)."""
    x = np.asarray(x, dtype=np.float64)
    if np.any(x <= 0):
        raise DomainError("x must be positive")
    if h is None:
        h = min(0.02, 0.25 / max(t, 1.0))
    X = 2 * np.pi * x.ravel()
    umax = math.acosh(max(1.0, 745.0 / float(np.min(X))))
    u = np.arange(0, umax + h, h)
    w = np.full(u.shape, h)
    w[0] = h / 2
    cu = np.cosh(u)
    co = np.cos(t * u) * w
    out = np.empty(X.shape)
    step = max(1, 2_000_000 // len(u))
    for s in range(0, len(X), step):
        out[s : s + step] = np.exp(-np.multiply.outer(X[s : s + step], cu)) @ co
    out *= math.sqrt(math.cosh(math.pi * t))
    return out.reshape(x.shape)


def maass_eval(table: CoeffTable, t: float, epsilon: int, z, c: float = 1.0, reduce: bool = True):
    """Maass form from its Fourier coefficients.

    sqrt(y) sum lam(n) c K*_t(n y) (e(nx) + eps e(-nx)). Odd forms are
    multiplied by -i so that the returned values are real.
    """
    z = _split(z)
    if reduce:
        z, _, _ = fd_reduce_array(z)
    y = z.imag
    ymin = float(np.min(y))
    nmax = max(1, math.ceil(36.0 / (2 * math.pi * ymin)))  # K* below ~1e-14
    if nmax > table.N and np.any(table.lam[1:] != 0):
        raise TruncationError(f"need {nmax} coefficients, table has {table.N}")
    nmax = min(nmax, table.N)
    out = np.zeros(z.shape)
    for n in range(1, nmax + 1):
        ln = table.lam[n]
        if ln == 0:
            continue
        kv = k_bessel_star_array(t, n * y)
        if epsilon == 1:
            osc = 2 * np.cos(2 * np.pi * n * z.real)
        else:
            osc = 2 * np.sin(2 * np.pi * n * z.real)
        out += ln * c * kv * osc
    out *= np.sqrt(y)
    return float(out) if out.ndim == 0 else out


# ----------------------------------------------------------- test functions


@dataclass
class TestFunction:
    """A bounded function on X with known mu_X-mean.

    ``fn`` maps an array of points in the upper half plane to values.
    """

    kind: str
    fn: Callable = field(repr=False)
    mean: float
    label: str = ""

    __test__ = False  # keep pytest from collecting this class

    def __call__(self, z):
        return self.fn(z)


def constant_function(value: float = 1.0) -> TestFunction:
    return TestFunction("constant", lambda z: np.full(np.shape(z), value, dtype=np.float64),
                        value, f"const({value})")


def delta_density_function(tol: float = 1e-15) -> TestFunction:
    return TestFunction("cuspdensity", lambda z: eval_delta_density(z, tol),
                        delta_density_mean(), "y^12|Delta|^2")


def eisenstein_function(psi: Bump | None = None) -> TestFunction:
    psi = psi or DEFAULT_BUMP
    return TestFunction("incomplete-eisenstein", lambda z: incomplete_eisenstein(z, psi),
                        psi.mean(), f"E(.|psi[{psi.y0},{psi.y1}])")


def maass_function(table: CoeffTable, t: float, eps: int) -> TestFunction:
    return TestFunction("maass", lambda z: maass_eval(table, t, eps, z), 0.0, f"maass(t={t})")


DEFAULT_BUMP = Bump(0.75, 3.0)
