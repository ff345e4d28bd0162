import math

import numpy as np
import pytest

from hecke_murmur import empirical as em
from hecke_murmur.arith_core import primes_between
from hecke_murmur.errors import EmptyWindowError
from hecke_murmur.quadfield import DiscriminantWindow, family_table
from oracles import empirical_G_naive


def test_hand_example():
    pt = em.empirical_point(DiscriminantWindow(20, 10), 3)
    assert pt.G == pytest.approx(-math.sqrt(3), rel=1e-15)
    assert pt.G_denom == 2
    assert pt.counts == (1, 1)


def test_degenerate_family_raises():
    # D = {7, 11}: both have class number 1, so G_denom = 0
    with pytest.raises(ValueError, match="G_denom"):
        em.empirical_point(DiscriminantWindow(4, 10), 23)


def test_inert_prime_gives_zero():
    W = DiscriminantWindow(20, 10)  # D = {23}; (-23/5) = (2/5) = -1
    pt = em.empirical_point(W, 5)
    assert pt.G == 0.0 and pt.counts == (1, 0)


def test_p_two_and_composites_rejected():
    W = DiscriminantWindow(20, 10)
    with pytest.raises(ValueError):
        em.empirical_point(W, 2)
    with pytest.raises(ValueError):
        em.empirical_point(W, 9)


def test_empty_prime_range():
    assert em.empirical_sweep(DiscriminantWindow(100, 100), 24, 28) == []


def test_oracle_equivalence_small_windows():
    for X, Y in ((20, 60), (100, 200), (300, 200), (450, 50)):
        W = DiscriminantWindow(X, Y)
        fam = family_table(W)
        for p in primes_between(3, 200).tolist():
            G, denom, nsplit, plus, ram = empirical_G_naive(X, Y, p)
            pt = em.empirical_point(W, p, fam)
            assert pt.G_denom == denom
            assert pt.counts[1] == nsplit
            assert pt.G == pytest.approx(G, rel=1e-12, abs=1e-12)
            assert pt.ramified_term == pytest.approx(math.sqrt(p) * ram, rel=1e-15)
            for y, val in pt.G_num_plus_by_y.items():
                assert val == pytest.approx(2 * math.sqrt(p) * plus.get(y, 0), rel=1e-15)


def test_ramified_prime_inside_window():
    W = DiscriminantWindow(100, 200)
    p = 167  # prime, 167 = 3 mod 4, squarefree, inside [100, 300]
    pt = em.empirical_point(W, p)
    fam = family_table(W)
    assert pt.ramified_term == pytest.approx(math.sqrt(p) * (fam.h_of(p) - 1))


def test_decomposition_identity_and_support():
    W = DiscriminantWindow(2**12, 2**12)
    arr = em.sweep_arrays(W, primes_between(3, 3 * 2**12))
    for i in range(0, arr.primes.size, 7):
        q = arr.point(i)
        num = q.numerator()
        assert abs(q.G * q.G_denom - num) <= 1e-9 * max(1.0, abs(num))
        for y, v in q.G_num_plus_by_y.items():
            if y >= 2 * math.sqrt(q.xi):
                assert v == 0
        assert q.counts[1] <= q.counts[0]


def test_sweep_point_near_one_and_a_half():
    X = 2**15
    W = DiscriminantWindow(X, X)
    pts = em.empirical_sweep(W, int(1.5 * X) - 40, int(1.5 * X) + 40)
    assert pts and all(abs(pt.xi - 1.5) < 0.01 for pt in pts)
    assert [pt.p for pt in pts] == sorted(pt.p for pt in pts)


def test_sweep_matches_naive_at_moderate_scale():
    W = DiscriminantWindow(2**10, 2**10)
    fam = family_table(W)
    for p in (1031, 1543, 2003):
        G, *_ = empirical_G_naive(2**10, 2**10, p)
        assert em.empirical_point(W, p, fam).G == pytest.approx(G, rel=1e-12)


def test_three_mod_four_primes_lie_above():
    X = 2**14
    arr = em.sweep_arrays(DiscriminantWindow(X, X), primes_between(int(1.1 * X), int(1.9 * X)))
    G = arr.G
    three = G[arr.primes % 4 == 3].mean()
    one = G[arr.primes % 4 == 1].mean()
    assert three > one


def test_rolling_average_examples():
    W = DiscriminantWindow(2**10, 2**10)
    pts = em.empirical_sweep(W, 1500, 1700)
    single = em.rolling_average(pts, pts[0].p, 1)
    assert single.G_avg == pts[0].G and single.primes_used == 1
    two = em.rolling_average(pts, pts[0].p, pts[1].p - pts[0].p)
    assert two.G_avg == pytest.approx((pts[0].G + pts[1].G) / 2, rel=1e-15)
    assert two.Xi == pytest.approx(pts[0].p / 2**10)
    with pytest.raises(EmptyWindowError):
        em.rolling_average(pts, 10**6, 10)


def test_rolling_average_arrays_agree_with_points():
    W = DiscriminantWindow(2**11, 2**11)
    arr = em.sweep_arrays(W, primes_between(3, 5000))
    pts = [arr.point(i) for i in range(arr.primes.size)]
    for P, H in ((2500, 300), (3001, 40), (4000, 999)):
        a = em.rolling_average_arrays(arr, P, H)
        b = em.rolling_average(pts, P, H, X=2**11)
        assert a.primes_used == b.primes_used
        assert a.G_avg == pytest.approx(b.G_avg, rel=1e-13)


def test_equidistribution_examples():
    r4 = em.equidistribution_check(10**6, 10**5, 4)
    assert set(r4.counts) == {1, 3} and r4.max_rel_deviation < 0.05
    assert r4.total == primes_between(10**6, 10**6 + 10**5).size
    r8 = em.equidistribution_check(10**6, 10**5, 8)
    assert set(r8.counts) == {1, 3, 5, 7} and r8.max_rel_deviation < 0.05
    r2 = em.equidistribution_check(10**6, 10**5, 2)
    assert r2.counts == {1: r2.total}
    with pytest.raises(ValueError):
        em.equidistribution_check(10**6, 10, 4)


def test_li_interval_against_scipy():
    special = pytest.importorskip("scipy.special")
    want = special.expi(math.log(2e6)) - special.expi(math.log(1e6))
    assert em.li_interval(1e6, 2e6) == pytest.approx(want, rel=1e-12)


def test_G_denom_leading_order():
    from hecke_murmur.density import DensityParams, constants

    X, Y = 2**16, 2**13
    c = constants(DensityParams())
    fam = family_table(DiscriminantWindow(X, Y))
    denom = int((fam.h - 1).sum())
    pred = 4 * c.A / (11 * math.pi * c.zeta2) * Y * math.sqrt(X)
    assert abs(denom - pred) / (Y * math.sqrt(X)) <= 0.02


def test_G_denom_matches_integrated_prediction():
    from hecke_murmur.density import DensityParams, constants

    # summing the density of h(-D) over [X, X+Y] instead of freezing sqrt(D) at sqrt(X)
    X, Y = 2**16, 2**13
    c = constants(DensityParams())
    fam = family_table(DiscriminantWindow(X, Y))
    pred = 4 * c.A / (11 * math.pi * c.zeta2) * (2 / 3) * ((X + Y) ** 1.5 - X**1.5)
    assert abs(fam.h.sum() / pred - 1) <= 0.01


def test_G_num_minus_leading_order():
    X, Y = 2**16, 2**13
    p = int(primes_between(int(1.5 * X), int(1.5 * X) + 100)[0])
    pt = em.empirical_point(DiscriminantWindow(X, Y), p)
    scale = Y * math.sqrt(p)
    assert abs(pt.G_num_minus + scale / (3 * math.pi**2 / 6)) / scale <= 0.03
