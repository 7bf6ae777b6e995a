import math

import numpy as np
import pytest
from scipy import integrate

from horolab.arith import DomainError
from horolab.heckeforms import (DEFAULT_BUMP, constant_function, delta_normalized, eisenstein_function,
                                fd_reduce, incomplete_eisenstein, tau_exact)
from horolab.horocycle import (THIRDS, Box, ResolutionError, continuous_pair_integral, discrepancy,
                               dyadic_boxes, hecke_points, monomial_points, pair_points, sample_mu_x,
                               smooth_window, truncated_mass, tuple_points, weyl_sum, weyl_sum_general)
from horolab.lattice import s_min
from horolab.parallel import ParallelMap


def test_hecke_points():
    h = hecke_points(2)
    assert np.allclose(h.points()[:, 0], [0.5j, 0.5 + 0.5j])
    assert len(hecke_points(97)) == 97
    with pytest.raises(DomainError):
        hecke_points(1)


def test_hecke_points_reduce_by_hand():
    # hand reduction of (a + i)/5: 5i, (1/2 + 5i/2), i, i, (1/2 + 5i/2) up to x -> -x at the edge
    expected = [5j, 0.5 + 2.5j, 1j, 1j, 0.5 + 2.5j]
    for z, e in zip(hecke_points(5).points()[:, 0], expected):
        r, _ = fd_reduce(complex(z))
        assert r.y == pytest.approx(e.imag) and abs(r.x) == pytest.approx(abs(e.real), abs=1e-12)


def test_pair_points():
    p = pair_points(5, 2)
    assert tuple(p.index[3]) == (3, 1)
    assert np.allclose(p.points()[3], [(3 + 1j) / 5, (1 + 1j) / 5])
    d = pair_points(11, 1)
    assert np.array_equal(d.index[:, 0], d.index[:, 1])
    with pytest.raises(DomainError):
        pair_points(10, 4)


@pytest.mark.parametrize("q,b", [(101, 7), (1009, 500), (97, 96)])
def test_projection_and_shift_invariance(q, b):
    p = pair_points(q, b)
    base = hecke_points(q).projection(0)
    for j in (0, 1):
        assert np.array_equal(np.sort(p.projection(j)), base)
    pairs = {tuple(r) for r in p.index}
    for q1 in (2, 3, 5):
        a = (np.arange(q) * q1 * q1) % q
        shifted = {(int(x), int(x * b % q)) for x in a}
        assert shifted == pairs


def test_tuple_points():
    q = 101
    t = tuple_points(q, (1, 17))
    p = pair_points(q, 17)
    assert np.array_equal(t.index, p.index) and t.s == pytest.approx(p.s)
    assert tuple_points(q, (5, 5)).s == pytest.approx(math.sqrt(2))
    bv = (3, 10, 44)
    expect = min(s_min(q, bi * pow(bj, -1, q) % q) for bi in bv for bj in bv if bi != bj)
    assert tuple_points(q, bv).s == pytest.approx(expect)


def test_monomial_points():
    m = monomial_points(1, 2, 5, 1)
    assert tuple(m.index[2]) == (2, 4)
    assert len(monomial_points(2, 3, 13, 2)) == 13
    with pytest.raises(DomainError):
        monomial_points(1, 1, 5, 1)
    with pytest.raises(DomainError):
        monomial_points(3, 2, 5, 1)


def test_weyl_constant_is_one():
    one = constant_function()
    for pts in (pair_points(101, 7), tuple_points(31, (1, 2, 3)), monomial_points(1, 2, 31, 3)):
        r = weyl_sum(pts, *([one] * pts.dim))
        assert r.value == 1 and r.abs_error == 0


def _eisenstein_square_mean():
    # mu_X-mean of E(.|psi)^2 by quadrature over the fundamental domain (support ends at y = 3)
    psi = DEFAULT_BUMP

    def inner(x):
        y0 = math.sqrt(1 - x * x)
        f = lambda y: incomplete_eisenstein(complex(x, y), psi) ** 2 / y**2
        pts = [p for p in (0.75, 1.0, 1.33, 1.5, 2.0, 3.0) if p > y0]
        return integrate.quad(f, y0, 4.0, points=pts, limit=200, epsabs=1e-10)[0]

    return THIRDS * integrate.quad(inner, -0.5, 0.5, limit=100, epsabs=1e-9)[0]


def test_diagonal_trapped():
    phi = eisenstein_function()
    r = weyl_sum(pair_points(10007, 1), phi, phi)
    sq = _eisenstein_square_mean()
    assert abs(r.value - sq) < 0.02
    assert abs(sq - phi.mean**2) > 0.1
    d = pair_points(1009, 1).points()
    assert np.mean(np.abs(d[:, 0] - d[:, 1]) < 1e-9) == 1.0


def test_weyl_sum_general_reductions():
    q, b = 1009, 321
    phi = eisenstein_function()
    plain = weyl_sum(pair_points(q, b), phi, phi).value
    assert weyl_sum_general(q, b, phi, phi) == pytest.approx(plain, abs=1e-14)
    single = weyl_sum_general(q, b, phi, constant_function())
    grid = phi((np.arange(q) + 1j) / q)
    assert single == pytest.approx(np.mean(grid), abs=1e-14)
    F = delta_normalized
    v0 = weyl_sum_general(q, b, F, F, x0=0.3, y0=1.7, r0=0.25)
    v1 = weyl_sum_general(q, b, F, F, x0=0.3, y0=1.7, r0=3.25)
    assert abs(v0 - v1) < 1e-12 * max(1e-30, abs(v0)) + 1e-18
    with pytest.raises(DomainError):
        weyl_sum_general(q, b, F, F, r0=1 / q)
    with pytest.raises(DomainError):
        weyl_sum_general(q, b, F, F, y0=0.0)


def test_discrepancy_three_points():
    boxes = dyadic_boxes()
    # hand-reduced images of (a + i)/3; boundary points sit on x = -1/2
    hand = np.array([3j, -0.5 + 1.5j, -0.5 + 1.5j])
    worst = 0.0
    for B in boxes:
        c = np.count_nonzero(B.contains(hand))
        worst = max(worst, abs(c / 3 - B.measure))
    assert discrepancy(hecke_points(3), boxes) == pytest.approx(worst, abs=1e-12)


def test_box_validation():
    assert Box(-0.5, 0.5, 1.0, 10.0).measure == pytest.approx(THIRDS * 0.9)
    with pytest.raises(DomainError):
        Box(-0.6, 0.0, 2.0, 3.0)
    with pytest.raises(DomainError):
        Box(-0.1, 0.1, 0.9, 3.0)


def test_truncated_mass():
    cusp = THIRDS / 10
    assert truncated_mass(hecke_points(10007)) >= 1 - cusp - 0.01


def test_discrepancy_of_mu_x_sample():
    z = sample_mu_x(1_000_000, np.random.default_rng(7))
    assert discrepancy(z) < 0.01


def test_continuous_constant_and_rational():
    W = smooth_window(0.0, 1.0)
    ref = integrate.quad(lambda x: float(W(np.array([x]))[0]), 0, 1, epsabs=1e-13)[0]
    r = continuous_pair_integral(50.0, math.sqrt(2))
    assert r.value == pytest.approx(ref, abs=1e-10)
    r1 = continuous_pair_integral(50.0, 1.0)
    assert (r1.approx.a, r1.approx.q) == (1, 1) and r1.flagged_rational
    golden = (1 + math.sqrt(5)) / 2
    qs = [continuous_pair_integral(T, golden).approx.q for T in (200.0, 2000.0, 20000.0)]
    assert qs == sorted(qs) and qs[0] < qs[-1]
    with pytest.raises(ResolutionError):
        continuous_pair_integral(100.0, golden, n_nodes=300)


def test_continuous_matches_fourier_series():
    # Gaussian window: the integral of F(x + i/T) conj F(xy + i/T) is an explicit double series
    T, y, sig = 40.0, (1 + math.sqrt(5)) / 2, 0.06
    W = lambda x: np.exp(-((x - 0.5) ** 2) / (2 * sig * sig))
    r = continuous_pair_integral(T, y, (0.0, 1.0), W, delta_normalized,
                                 lambda z: np.conj(delta_normalized(z)), nodes_per_panel=12)
    N = int(6 * T) + 20
    tau = np.array(tau_exact(N)[1:], dtype=float)
    n = np.arange(1, N + 1)
    a = tau * np.exp(-2 * np.pi * n / T) / T**6
    xi = n[:, None] - n[None, :] * y
    What = sig * math.sqrt(2 * math.pi) * np.exp(-2 * math.pi**2 * sig**2 * xi**2) * np.exp(1j * math.pi * xi)
    terms = a[:, None] * a[None, :] * What
    series = terms.sum()
    assert abs(r.value - series) < 1e-9 * np.abs(terms).sum()


def test_weyl_thread_determinism():
    phi = eisenstein_function()
    p = pair_points(100003, 4711)
    with ParallelMap(4) as pool:
        par = weyl_sum(p, phi, phi, pool=pool).value
    assert abs(weyl_sum(p, phi, phi).value - par) <= 1e-12
