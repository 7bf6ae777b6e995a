"""The compiled and pure-Python kernels must agree on every entry point."""

import numpy as np
import pytest

from horolab import _pykernels as ref
from horolab import kernels
from horolab.arith import spf_table
from horolab.expsums import _tables
from horolab.lattice import gauss_reduce, lambda_lattice


def test_backend_names():
    names = [m.BACKEND for m in kernels.available_backends()]
    assert "python" in names and kernels.BACKEND == names[0]


def test_fd_reduce_batch(backend, rng):
    x = rng.uniform(-5, 5, 2000)
    y = 10 ** rng.uniform(-5, 1, 2000)
    got = backend.fd_reduce_batch(x.copy(), y.copy())
    want = ref.fd_reduce_batch(x.copy(), y.copy())
    for g, w in zip(got, want):
        assert np.allclose(g, w, rtol=1e-12, atol=1e-12)
    xr, yr, A, B, C, D = got
    assert np.all(A * D - B * C == 1)
    z = x + 1j * y
    assert np.allclose((A * z + B) / (C * z + D), xr + 1j * yr, rtol=1e-7, atol=1e-9)


def test_incomplete_eisenstein_reduced(backend, rng):
    xr = rng.uniform(-0.5, 0.5, 500)
    yr = np.maximum(np.sqrt(1 - xr**2), rng.uniform(0.8, 4, 500))
    a = backend.incomplete_eisenstein_reduced(xr, yr, 0.75, 3.0)
    b = ref.incomplete_eisenstein_reduced(xr, yr, 0.75, 3.0)
    assert np.allclose(a, b, rtol=1e-13, atol=1e-15)


def test_pair_gather_sum(backend, rng):
    q = 1009
    v1 = rng.normal(size=q) + 1j * rng.normal(size=q)
    v2 = rng.normal(size=q) + 1j * rng.normal(size=q)
    for lo, hi in [(0, q), (5, 700)]:
        a = backend.pair_gather_sum(v1, v2, 321, q, lo, hi)
        assert a == pytest.approx(ref.pair_gather_sum(v1, v2, 321, q, lo, hi), abs=1e-12)


@pytest.mark.parametrize("q,b,sign", [(101, 37, 1), (101, 37, -1), (997, 2, -1)])
def test_lattice_model_sum(backend, rng, q, b, sign):
    nmax = 4 * q
    w1 = rng.normal(size=nmax + 1) + 0j
    w2 = rng.normal(size=nmax + 1) + 1j * rng.normal(size=nmax + 1)
    w1[0] = w2[0] = 0
    rb = gauss_reduce(lambda_lattice(q, b, sign))
    (x1, x2), (y1, y2) = rb.x, rb.y
    U = nmax * (abs(y1) + abs(y2)) // q + 2
    a = backend.lattice_model_sum(x1, x2, y1, y2, w1, w2, nmax, -U, U + 1)
    # brute force over the box
    n = np.arange(1, nmax + 1)
    i1, i2 = np.nonzero((n[:, None] + sign * b * n[None, :]) % q == 0)
    brute = np.sum(w1[n[i1]] * w2[n[i2]])
    assert a == pytest.approx(brute, rel=1e-12, abs=1e-12)


def test_kloosterman_batch(backend, rng):
    for q in (1, 2, 12, 101):
        inv, ct, st = _tables(q)
        a = rng.integers(-500, 500, 50)
        b = rng.integers(-500, 500, 50)
        re1, im1 = backend.kloosterman_batch(a, b, q, inv, ct, st)
        re2, im2 = ref.kloosterman_batch(a, b, q, inv, ct, st)
        assert np.allclose(re1, re2, atol=1e-10) and np.allclose(im1, im2, atol=1e-10)


def test_classify_range(backend):
    N = 50000
    spf = spf_table(N)
    for z, q in [(100.0, 1), (1000.0, 6), (16.0, 1)]:
        assert np.array_equal(backend.classify_range(1, N + 1, z, q, spf),
                              ref.classify_range(1, N + 1, z, q, spf))
    m = backend.classify_range(1, 2, 100.0, 1, spf)
    assert m[0] == kernels.CASE_I
