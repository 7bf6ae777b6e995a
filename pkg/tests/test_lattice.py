import math

import pytest
from hypothesis import given, settings, strategies as st

from horolab.arith import DomainError, Residue
from horolab.lattice import (Lattice2D, b_for_vector, check_min_lemma, gauss_reduce, lambda_lattice,
                             minkowski_ok, reduced_basis, s_min, s_min_sq)
from oracles import brute_min_sq


def test_lambda_lattice_examples():
    L = lambda_lattice(7, 1)
    assert L.v1 == (-1, 1) and L.v2 == (7, 0) and L.covolume == 7
    assert lambda_lattice(5, 2).contains((3, 1))
    for q, b in [(7, 3), (101, 51), (12, 5)]:
        assert lambda_lattice(q, b).contains((q, 0))
    assert lambda_lattice(5, Residue(2, 5)).contains((3, 1))
    with pytest.raises(DomainError):
        lambda_lattice(12, 4)


def test_gauss_reduce_examples():
    rb = gauss_reduce(Lattice2D((-1, 1), (7, 0)))
    assert rb.x in ((-1, 1), (1, -1)) and rb.s_sq == 2
    assert gauss_reduce(Lattice2D((1, 0), (0, 1))).s_sq == 1
    again = gauss_reduce(Lattice2D(rb.x, rb.y))
    assert again.s_sq == rb.s_sq
    with pytest.raises(DomainError):
        Lattice2D((1, 2), (2, 4))


def test_s_min_examples():
    assert s_min_sq(101, 1) == 2
    assert s_min_sq(101, 51) == 5
    assert s_min_sq(101, 100) == 2
    assert s_min(101, 51) == pytest.approx(math.sqrt(5))


@settings(max_examples=300, deadline=None)
@given(st.integers(2, 3000), st.integers(1, 10**6), st.sampled_from([1, -1]))
def test_reduced_basis_properties(q, b, sign):
    b = b % q
    if math.gcd(b, q) != 1:
        return
    L = lambda_lattice(q, b, sign)
    rb = gauss_reduce(L)
    x, y = rb.x, rb.y
    nx, ny = x[0] ** 2 + x[1] ** 2, y[0] ** 2 + y[1] ** 2
    assert nx <= ny
    for t in ((x[0] + y[0], x[1] + y[1]), (x[0] - y[0], x[1] - y[1])):
        assert t[0] ** 2 + t[1] ** 2 >= ny
    (m11, m12), (m21, m22) = rb.transform
    assert abs(m11 * m22 - m12 * m21) == 1
    assert x == (m11 * L.v1[0] + m12 * L.v2[0], m11 * L.v1[1] + m12 * L.v2[1])
    assert L.contains(x) and L.contains(y)
    assert nx == brute_min_sq(q, b, sign)
    assert minkowski_ok(q, nx)


def test_shortest_vector_coprime_nonzero():
    for q in [101, 1009, 10007]:
        for b in range(2, 200):
            if b % q == 0:
                continue
            x1, x2 = reduced_basis(q, b).x
            assert x1 * x2 != 0 and math.gcd(x1, x2) == 1


def test_min_lemma_examples():
    r = check_min_lemma(101, 51, 1)
    assert r.passed and len(r.checks) == 5
    assert check_min_lemma(101, 51, 2).passed
    assert check_min_lemma(7, 3, 2).passed
    assert check_min_lemma(3, 1, 2).skipped
    with pytest.raises(DomainError):
        check_min_lemma(101, 0, 2)


def test_b_for_vector():
    for q in [101, 1009]:
        for x1, x2 in [(1, 2), (2, 3), (-3, 5)]:
            b = b_for_vector(q, x1, x2)
            assert (x1 + b * x2) % q == 0
