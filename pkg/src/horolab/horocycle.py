"""Discrete and continuous low-lying horocycles, Weyl sums and discrepancy.

A discrete point set is stored as an integer index array: the point with
index c is (c + i)/q. Test functions are evaluated once on the q grid
points and then gathered, which keeps every Weyl sum O(q).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import kernels
from .arith import DomainError, RationalApprox, best_rational
from .heckeforms import TestFunction, fd_reduce_array
from .lattice import s_min, s_min_sq
from .parallel import SERIAL, ParallelMap, chunk_ranges, ordered_sum

KINDS = ("hecke", "discrete-pair", "discrete-tuple", "monomial")


class ResolutionError(ValueError):
    """Quadrature nodes too sparse for the oscillation scale."""


@dataclass
class HoroPointSet:
    """Points ((c_1 + i)/q, ..., (c_d + i)/q) indexed by a = 0..q-1.

    ``index[a, j]`` holds c_j; the a-th point of a pair set is
    ((a + i)/q, (ab + i)/q).
    """

    kind: str
    q: int
    index: np.ndarray
    b: tuple[int, ...] = ()
    s: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown point set kind {self.kind!r}")

    def __len__(self):
        return self.index.shape[0]

    @property
    def dim(self) -> int:
        return self.index.shape[1]

    def points(self) -> np.ndarray:
        return (self.index + 1j) / self.q

    def projection(self, j: int) -> np.ndarray:
        return self.index[:, j]


def _check_unit(b, q):
    if math.gcd(b, q) != 1:
        raise DomainError(f"gcd({b}, {q}) != 1")


def hecke_points(q: int) -> HoroPointSet:
    if q < 2:
        raise DomainError("q must be at least 2")
    return HoroPointSet("hecke", q, np.arange(q, dtype=np.int64)[:, None])


def pair_points(q: int, b: int) -> HoroPointSet:
    if q < 2:
        raise DomainError("q must be at least 2")
    _check_unit(b, q)
    a = np.arange(q, dtype=np.int64)
    idx = np.stack([a, (a * (b % q)) % q], axis=1)
    return HoroPointSet("discrete-pair", q, idx, (b % q,), s_min(q, b))


def tuple_points(q: int, b_vec) -> HoroPointSet:
    """d-tuples ((ab_1 + i)/q, ..., (ab_d + i)/q); s is min over i != j of s(q; b_i/b_j)."""
    if q < 2 or len(b_vec) < 2:
        raise DomainError("need q >= 2 and at least two shifts")
    for b in b_vec:
        _check_unit(b, q)
    a = np.arange(q, dtype=np.int64)
    idx = np.stack([(a * (b % q)) % q for b in b_vec], axis=1)
    ssq = min(s_min_sq(q, bi * pow(bj, -1, q) % q)
              for i, bi in enumerate(b_vec) for j, bj in enumerate(b_vec) if i != j)
    return HoroPointSet("discrete-tuple", q, idx, tuple(b % q for b in b_vec), math.sqrt(ssq))


def monomial_points(k: int, l: int, q: int, b: int) -> HoroPointSet:
    """Pairs ((a^k + i)/q, (b a^l + i)/q)."""
    if not 1 <= k < l:
        raise DomainError("need 1 <= k < l")
    _check_unit(b, q)
    a = np.arange(q, dtype=object)
    first = np.array([pow(int(x), k, q) for x in a], dtype=np.int64)
    second = np.array([b * pow(int(x), l, q) % q for x in a], dtype=np.int64)
    return HoroPointSet("monomial", q, np.stack([first, second], axis=1), (b % q,))


# ---------------------------------------------------------------- Weyl sums


@dataclass
class WeylReport:
    q: int
    b: tuple[int, ...]
    s: float | None
    value: complex
    target: float
    abs_error: float
    runtime: float
    tests: tuple[str, ...] = ()


def grid_values(q: int, phi: Callable, pool: ParallelMap = SERIAL, chunk: int = 8192,
                y: float = 1.0, x0: float = 0.0, r0: float = 0.0) -> np.ndarray:
    """phi((c + x0 + i y)/q + r0) for c = 0..q-1, evaluated in fixed chunks."""

    def work(rng):
        c = np.arange(*rng, dtype=np.float64)
        return np.asarray(phi((c + x0 + 1j * y) / q + r0))

    parts = pool.map(work, chunk_ranges(0, q, chunk))
    return np.concatenate(parts).astype(np.complex128)


def _gather_sum(values, index, pool, chunk=16384):
    q = index.shape[0]

    def work(rng):
        lo, hi = rng
        prod = np.ones(hi - lo, dtype=np.complex128)
        for j, v in enumerate(values):
            prod *= v[index[lo:hi, j]]
        return complex(math.fsum(prod.real), math.fsum(prod.imag))

    return ordered_sum(pool.map(work, chunk_ranges(0, q, chunk)))


def weyl_sum(points: HoroPointSet, *phis: TestFunction, pool: ParallelMap = SERIAL) -> WeylReport:
    """(1/|P|) sum over the set of prod_j phi_j(z_j), against prod_j mean(phi_j).

    Pass one test function per coordinate. The summation order is fixed
    (a = 0..q-1 in fixed chunks), so the result does not depend on the pool.
    """
    if len(phis) != points.dim:
        raise DomainError(f"need {points.dim} test functions, got {len(phis)}")
    t0 = time.perf_counter()
    q = points.q
    cache = {}
    values = []
    for phi in phis:
        if id(phi) not in cache:
            cache[id(phi)] = grid_values(q, phi, pool)
        values.append(cache[id(phi)])
    if points.kind == "discrete-pair":
        b = points.b[0]
        parts = pool.map(lambda r: kernels.pair_gather_sum(values[0], values[1], b, q, r[0], r[1]),
                         chunk_ranges(0, q, 16384))
        total = ordered_sum(parts)
    else:
        total = _gather_sum(values, points.index, pool)
    value = total / len(points)
    target = float(np.prod([phi.mean for phi in phis]))
    return WeylReport(q, points.b, points.s, value, target, abs(value - target),
                      time.perf_counter() - t0, tuple(phi.label for phi in phis))


def weyl_sum_general(q: int, b: int, f1: Callable, f2: Callable, x0: float = 0.0,
                     y0: float = 1.0, r0=0, pool: ParallelMap = SERIAL) -> complex:
    """(1/q) sum_a f1((a + i)/q) f2((ba + x0 + y0 i)/q + r0).

    A negative y0 is read through the orientation-reversing action, i.e. the
    second point is reflected back to the upper half plane.
    """
    _check_unit(b, q)
    if y0 == 0:
        raise DomainError("y0 must be nonzero")
    r0 = Fraction(r0).limit_denominator(10**12) if not isinstance(r0, Fraction) else r0
    if math.gcd(r0.denominator, q) != 1:
        raise DomainError(f"denominator of r0 = {r0} shares a factor with q = {q}")
    v1 = grid_values(q, f1, pool)
    v2 = grid_values(q, f2, pool, y=abs(y0), x0=x0, r0=float(r0))
    parts = pool.map(lambda r: kernels.pair_gather_sum(v1, v2, b % q, q, r[0], r[1]),
                     chunk_ranges(0, q, 16384))
    return ordered_sum(parts) / q


# ------------------------------------------------------------- discrepancy

THIRDS = 3.0 / math.pi
CUSP_HEIGHT = 10.0


@dataclass(frozen=True)
class Box:
    """[x1, x2] x [y1, y2] inside the standard fundamental domain."""

    x1: float
    x2: float
    y1: float
    y2: float

    def __post_init__(self):
        if not (-0.5 <= self.x1 < self.x2 <= 0.5 and 0 < self.y1 < self.y2):
            raise DomainError(f"box {self} is not inside the fundamental domain")
        xm = 0.0 if self.x1 <= 0 <= self.x2 else min(self.x1 * self.x1, self.x2 * self.x2)
        if self.y1 * self.y1 + xm < 1 - 1e-12:
            raise DomainError(f"box {self} dips below the unit circle")

    @property
    def measure(self) -> float:
        return THIRDS * (self.x2 - self.x1) * (1 / self.y1 - 1 / self.y2)

    def contains(self, z) -> np.ndarray:
        return (z.real >= self.x1) & (z.real <= self.x2) & (z.imag >= self.y1) & (z.imag <= self.y2)


def dyadic_boxes(levels: int = 4, ymax: float = CUSP_HEIGHT) -> list[Box]:
    """Grid boxes at ``levels`` scales; level L cuts x into 2^L and log y into 2^L.

    Cells whose x-range leaves the unit circle above y = 1 are lowered to
    the arc, so the region between the arc and y = 1 is covered too.
    """
    out = []
    for L in range(levels):
        m = 2**L
        xs = np.linspace(-0.5, 0.5, m + 1)
        ys = np.geomspace(1.0, ymax, m + 1)
        for i in range(m):
            for j in range(m):
                x1, x2 = float(xs[i]), float(xs[i + 1])
                y1 = float(ys[j])
                if j == 0:
                    xm = 0.0 if x1 <= 0 <= x2 else min(x1 * x1, x2 * x2)
                    y1 = math.sqrt(1 - xm)
                out.append(Box(x1, x2, y1, float(ys[j + 1])))
    return out


def reduce_points(points: HoroPointSet) -> list[np.ndarray]:
    grid, _, _ = fd_reduce_array((np.arange(points.q) + 1j) / points.q)
    return [grid[points.index[:, j]] for j in range(points.dim)]


def discrepancy(points, boxes: list[Box] | None = None) -> float:
    """sup over boxes (or box pairs) of |empirical mass - mu_X mass|.

    ``points`` is a HoroPointSet of dimension 1 or 2, or an array of points
    in the upper half plane. Pair sets are tested on products of boxes
    against mu_X x mu_X.
    """
    boxes = boxes if boxes is not None else dyadic_boxes()
    if isinstance(points, HoroPointSet):
        coords = reduce_points(points)
    else:
        zr, _, _ = fd_reduce_array(np.asarray(points))
        coords = [zr]
    if len(coords) > 2:
        raise DomainError("discrepancy is defined for one or two coordinates")
    n = len(coords[0])
    mu = np.array([B.measure for B in boxes])
    M = [np.stack([B.contains(z) for B in boxes], axis=1).astype(np.float64) for z in coords]
    if len(M) == 1:
        emp = M[0].sum(axis=0) / n
        return float(np.max(np.abs(emp - mu)))
    emp = (M[0].T @ M[1]) / n
    return float(np.max(np.abs(emp - np.outer(mu, mu))))


def truncated_mass(points, ymax: float = CUSP_HEIGHT) -> float:
    """Fraction of fd-reduced points with height at most ``ymax``."""
    if isinstance(points, HoroPointSet):
        z = reduce_points(points)[0]
    else:
        z, _, _ = fd_reduce_array(np.asarray(points))
    return float(np.mean(z.imag <= ymax))


def sample_mu_x(n: int, rng: np.random.Generator, ymax: float = 1e6) -> np.ndarray:
    """n points distributed by mu_X on the fundamental domain (rejection sampling)."""
    out = []
    have = 0
    while have < n:
        m = 2 * (n - have) + 100
        x = rng.uniform(-0.5, 0.5, m)
        # 1/y is uniform on (0, 1/y_min] under dy/y^2; y_min = sqrt(3)/2
        y = 1.0 / rng.uniform(1 / ymax, 2 / math.sqrt(3), m)
        keep = x * x + y * y >= 1
        z = x[keep] + 1j * y[keep]
        out.append(z)
        have += len(z)
    return np.concatenate(out)[:n]


# --------------------------------------------------------- continuous case


def smooth_window(lo: float, hi: float) -> Callable:
    """Standard bump on [lo, hi], equal to 1 at the midpoint."""

    def W(x):
        u = (2 * np.asarray(x, dtype=np.float64) - lo - hi) / (hi - lo)
        out = np.zeros_like(u)
        inside = np.abs(u) < 1
        out[inside] = np.exp(1 - 1 / (1 - u[inside] ** 2))
        return out

    return W


@dataclass
class ContinuousResult:
    value: complex
    approx: RationalApprox
    Q: int
    n_nodes: int
    flagged_rational: bool = field(default=False)


def continuous_pair_integral(T: float, y: float, interval=(0.0, 1.0), W: Callable | None = None,
                             f1: Callable | None = None, f2: Callable | None = None,
                             x0: float = 0.0, y0: float = 1.0, r0: float = 0.0,
                             n_nodes: int | None = None, nodes_per_panel: int = 8,
                             q_exponent: float = 0.99, pool: ParallelMap = SERIAL) -> ContinuousResult:
    """Integral of W(x) f1(x + i/T) f2(xy + r0 + (x0 + i y0)/T) over ``interval``.

    Composite Gauss-Legendre on panels of width about 1/(8T). The best
    rational approximation a/q of y with q <= T^q_exponent is returned with it.
    """
    lo, hi = interval
    if not hi > lo:
        raise DomainError("empty interval")
    length = hi - lo
    W = W or smooth_window(lo, hi)
    f1 = f1 or (lambda z: np.ones(np.shape(z)))
    f2 = f2 or (lambda z: np.ones(np.shape(z)))
    panels = max(1, math.ceil(8 * T * length))
    if n_nodes is not None:
        if length / n_nodes > 1 / (4 * T):
            raise ResolutionError(f"{n_nodes} nodes on an interval of length {length} "
                                  f"is too coarse for T = {T}")
        nodes_per_panel = max(1, math.ceil(n_nodes / panels))
    total_nodes = panels * nodes_per_panel
    g, gw = np.polynomial.legendre.leggauss(nodes_per_panel)
    h = length / panels

    def work(rng):
        p = np.arange(*rng, dtype=np.float64)
        x = (lo + h * (p[:, None] + (g[None, :] + 1) / 2)).ravel()
        w = np.tile(gw * h / 2, len(p))
        v = w * W(x) * f1(x + 1j / T) * f2(x * y + r0 + (x0 + 1j * abs(y0)) / T)
        return complex(math.fsum(v.real), math.fsum(v.imag))

    value = ordered_sum(pool.map(work, chunk_ranges(0, panels, 1024)))
    Q = max(1, math.floor(T**q_exponent))
    approx = best_rational(y, Q)
    return ContinuousResult(value, approx, Q, total_nodes, flagged_rational=approx.error_bound == 0)
