import math

import numpy as np
import pytest

from horolab.arith import DomainError
from horolab.heckeforms import CoeffTable, TruncationError, cm_theta_table
from horolab.sieve_st import (SELBERG_C, box_sieve_set, calibrate_selberg_constant, case_masks,
                              chebyshev_identity_check, check_case_partition, classify_case,
                              lattice_sieve_set, loglog, rough_count, selberg_bound_check,
                              sieve_main_lhs, st_partial_sum, xi)
from oracles import rough_count_trial_division


def test_lattice_sieve_set_membership():
    S = lattice_sieve_set(5, 2, 1.0, 10 * math.sqrt(2))
    assert np.all((S.n1 + 2 * S.n2) % 5 == 0)
    square = S.points[(S.n1 <= 10) & (S.n2 <= 10)]
    expect = {(n1, n2) for n1 in range(1, 11) for n2 in range(1, 11) if (n1 + 2 * n2) % 5 == 0}
    assert {tuple(map(int, p)) for p in square} == expect
    assert rough_count(S, 1, 1, 1, 1) == len(S)
    with pytest.raises(DomainError):
        lattice_sieve_set(10, 5, 1, 50)
    with pytest.raises(DomainError):
        lattice_sieve_set(7, 2, 5, 3)


def test_lattice_count_against_area(rng):
    for _ in range(100):
        q = int(rng.integers(50, 3000))
        b = int(rng.integers(1, q))
        if math.gcd(b, q) != 1:
            continue
        R1 = float(rng.uniform(1, 100))
        S = lattice_sieve_set(q, b, R1, R1 + float(rng.uniform(2 * math.sqrt(q), 400)))
        assert abs(len(S) - S.X) <= 4 * S.Y + 4


def test_rough_count_oracle(rng):
    S = lattice_sieve_set(31, 7, 5.0, 120.0)
    pts = [tuple(map(int, p)) for p in S.points]
    for a1, a2, y1, y2 in [(1, 1, 1, 1), (1, 1, 7, 13), (2, 3, 5, 5), (5, 1, 30, 2), (1, 1, 50, 50)]:
        assert rough_count(S, a1, a2, y1, y2) == rough_count_trial_division(pts, a1, a2, y1, y2, 31)
    B = box_sieve_set(40)
    pts = [tuple(map(int, p)) for p in B.points]
    assert rough_count(B, 1, 1, 6, 6) == rough_count_trial_division(pts, 1, 1, 6, 6, 1)
    # primes dividing q are not sifted
    S = lattice_sieve_set(6 * 5, 7, 5.0, 200.0)
    pts = [tuple(map(int, p)) for p in S.points]
    assert rough_count(S, 1, 1, 10, 10) == rough_count_trial_division(pts, 1, 1, 10, 10, 30)
    with pytest.raises(DomainError):
        rough_count(S, 2, 1, 3, 3)


def test_rough_count_monotone():
    S = lattice_sieve_set(101, 10, 10.0, 500.0)
    ys = [1, 2, 3, 5, 10, 30, 100]
    counts = [rough_count(S, 1, 1, y, 3) for y in ys]
    assert counts == sorted(counts, reverse=True)
    counts = [rough_count(S, 1, 1, 3, y) for y in ys]
    assert counts == sorted(counts, reverse=True)
    assert all(c <= len(S) for c in counts)


def test_selberg_examples():
    S = lattice_sieve_set(101, 10, 10.0, 500.0)
    lhs, rhs, ok = selberg_bound_check(S, 1, 1, 1, 1)
    assert ok and rhs >= S.X / math.log(2) ** 2
    lhs, rhs, ok = selberg_bound_check(S, 10**6, 1, 3, 3)
    assert lhs == 0 and ok
    B = box_sieve_set(200)
    for y in (2, 5, 11, 23):
        assert selberg_bound_check(B, 1, 1, y, y, C=20)[2]


def test_calibration_reproduces_frozen_constant():
    worst, witness = calibrate_selberg_constant()
    assert worst <= SELBERG_C / 2
    assert witness is not None


def test_classify_case_examples():
    z = 100.0
    assert classify_case(1, z).label == "I"
    assert classify_case(1, z).p_next == math.inf
    c = classify_case(101, z)
    assert (c.label, c.a, c.k) == ("I", 1, 0)
    # 2^3 * 3 * 5 = 120 > 100: a = 24, p_next = 5 < sqrt(z); a = 24 > 10 and 5 < xi(100)
    c = classify_case(120, z)
    assert (c.a, c.b, c.k, c.p_next) == (24, 5, 2, 5)
    assert c.label == ("III" if 5 < xi(z) else "IV")
    c = classify_case(4 * 9 * 49, z)
    assert c.a == 36 and c.p_next == 7
    # 2 * 11 * 13: a = 22 > 10, p_next = 13 >= sqrt(z)
    assert classify_case(2 * 11 * 13, z).label == "I"
    # 3 * 5 * 7 * 11: a = 15 then 105 > 100, p_next = 7 < 10, a = 15 > 10; 7 vs xi
    c = classify_case(3 * 5 * 7 * 11, z)
    assert c.a == 15 and c.label == ("III" if 7 < xi(z) else "IV")
    assert classify_case(2 * 3 * 97, z).label == "I"
    # primes dividing q are skipped
    assert classify_case(3 * 97, z, q=3).a == 97 and classify_case(3 * 97, z).a == 3
    with pytest.raises(DomainError):
        classify_case(10, 4.0)


def test_case_masks_match_scalar(rng):
    N, z = 20000, 300.0
    masks = case_masks(N, z, 7)
    bits = {"I": 1, "II": 2, "III": 4, "IV": 8}
    for n in rng.integers(1, N + 1, 500):
        assert masks[n - 1] == bits[classify_case(int(n), z, 7).label]


@pytest.mark.parametrize("z", [1e2, 1e3, 1e4])
def test_case_partition(z):
    ok, counts, bad = check_case_partition(10**6, z)
    assert ok and bad is None and sum(counts.values()) == 10**6


def test_sieve_main_lhs(tau_big):
    S = lattice_sieve_set(101, 10, 5.0, 400.0)
    ones = np.ones(1000)
    r = sieve_main_lhs(S, ones, ones)
    assert r.lhs == np.count_nonzero((np.gcd(S.n1, 101) == 1) & (np.gcd(S.n2, 101) == 1))
    S6 = lattice_sieve_set(6 * 5, 7, 5.0, 200.0)
    keep = (np.gcd(S6.n1 * S6.n2, 30) == 1)
    assert sieve_main_lhs(S6, ones, ones).lhs == np.count_nonzero(keep)
    empty = type(S)(np.zeros((0, 2), dtype=np.int64), 1.0, 1.0, 7)
    assert sieve_main_lhs(empty, ones, ones).lhs == 0
    with pytest.raises(TruncationError):
        sieve_main_lhs(S, ones[:100], ones)
    # lhs / X for |lambda_tau| decreases as q and X grow
    ab = np.abs(tau_big.lam)
    ratios = []
    for q in (1009, 10007, 100003):
        S = lattice_sieve_set(q, 2, 1.0, float(q))
        r = sieve_main_lhs(S, ab, ab)
        ratios.append(r.lhs / r.X)
    assert ratios[0] > ratios[1] > ratios[2]


def test_st_partial_sum(tau_big):
    assert st_partial_sum(tau_big, 2) == pytest.approx(24 / (2**5.5 * 2))
    assert st_partial_sum(CoeffTable(np.zeros(1000), "loaded-maass"), 999) == 0
    with pytest.raises(TruncationError):
        st_partial_sum(CoeffTable(np.zeros(10), "loaded-maass"), 50)
    zs = np.geomspace(1e4, 1e6, 21)
    dev = np.array([st_partial_sum(tau_big, z) - 8 / (3 * math.pi) * loglog(z) for z in zs])
    assert dev.max() - dev.min() < 0.02
    cm = cm_theta_table(-23, 1, 10**6)
    consts = [st_partial_sum(cm, z) - 0.75 * loglog(z) for z in (1e4, 1e5, 1e6)]
    assert all(np.isfinite(consts)) and max(consts) - min(consts) < 0.1


def test_chebyshev_identity():
    ok, margin, gap = chebyshev_identity_check(100_001)
    assert ok and margin >= -1e-12 and gap <= 1e-12
    bound = lambda x: 1 + (x * x - 1) / 2 - (x * x - 1) ** 2 / 18
    assert bound(2.0) == pytest.approx(2.0) and bound(-2.0) == pytest.approx(2.0)
    assert bound(0.0) == pytest.approx(4 / 9)
