"""Property-based checks of the algebraic invariants on random inputs."""
import math
from fractions import Fraction

import numpy as np
from hypothesis import assume, given, strategies as st

from hecke_murmur import analytic as an
from hecke_murmur import arith_core as ac
from hecke_murmur import density as dn
from hecke_murmur import localfactors as lf
from hecke_murmur import quadfield as qf
from hecke_murmur import empirical as em
from oracles import C_8n_p_direct, R_direct, factor_naive, jacobi_by_factoring, mobius_naive

SMALL_PRIMES = [p for p in range(3, 98) if all(p % d for d in range(2, p))]
odd_primes = st.sampled_from(SMALL_PRIMES)
odd_moduli = st.integers(1, 10**6).map(lambda k: 2 * k + 1)


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6), odd_moduli)
def test_jacobi_multiplicative_in_top(a, b, n):
    assert ac.jacobi(a * b, n) == ac.jacobi(a, n) * ac.jacobi(b, n)


@given(st.integers(-10**4, 10**4), st.integers(1, 3000).map(lambda k: 2 * k + 1))
def test_jacobi_matches_factored_legendre(a, n):
    assert ac.jacobi(a, n) == jacobi_by_factoring(a, n)


@given(st.integers(-10**5, 10**5), st.integers(1, 10**4), st.integers(1, 10**4))
def test_kronecker_multiplicative_in_bottom_for_discriminants(k, m, n):
    D = 4 * k + 1 if k else 5  # D = 1 mod 4 makes n -> (D/n) a character
    assert ac.kronecker(D, m * n) == ac.kronecker(D, m) * ac.kronecker(D, n)


@given(st.integers(1, 10**7))
def test_factorize_and_mobius(n):
    f = ac.factorize(n)
    assert f.value() == n
    assert dict(f.factors) == factor_naive(n)
    assert ac.mobius(n) == mobius_naive(n)
    assert ac.rad(n) == math.prod(factor_naive(n))


@given(st.integers(1, 10**9), st.integers(1, 2000))
def test_sieve_mobius_segment_matches_trial_division(lo, length):
    t = ac.sieve_mobius(lo, lo + length)
    for n in range(lo, lo + length + 1, max(1, length // 20)):
        assert t.mu[n - lo] == mobius_naive(n)


@given(st.integers(1, 10**6), st.integers(1, 10**6))
def test_exact_rational_reciprocal(a, b):
    x = Fraction(a, b)
    assert x * (1 / x) == 1
    assert Fraction(x.numerator, x.denominator) == x


@given(st.integers(1, 10**4), st.integers(1, 10**4))
def test_Q_multiplicative_on_coprime_pairs(a, b):
    assume(math.gcd(a, b) == 1)
    assert an.Q_d(a * b) == an.Q_d(a) * an.Q_d(b)


@given(st.integers(1, 10**5))
def test_vartheta_eta_kappa(y):
    assert dn.vartheta(y) * dn.eta_y(y) == dn.kappa(y)
    assert sum((an.Q_d(d) for d in ac.divisors(y)), Fraction(0)) == dn.kappa(y)


@given(st.integers(5, 4 * 10**4).map(lambda k: 4 * k + 3))
def test_class_number_methods_agree(D):
    assume(ac.is_squarefree(D))
    h, L1 = qf.class_number_dirichlet(D)
    assert qf.class_number_forms(D) == h
    assert abs(L1 - math.pi * h / math.sqrt(D)) <= 1e-12 * L1
    assert 1 <= h <= math.sqrt(D) * (math.log(D) + 2)


@given(st.integers(1, 40), odd_primes)
def test_C_8n_p_product_matches_direct(n, p):
    assert lf.C_8n_p_product(n, p) == C_8n_p_direct(n, p)


@given(st.integers(0, 49).map(lambda k: 2 * k + 1), odd_primes)
def test_R_a_p_matches_direct(a, p):
    assert lf.R_a_p(a, p) == R_direct(a, p)


@given(st.integers(1, 12), st.integers(1, 6), st.integers(1, 4), st.sampled_from([3, 5, 7, 11, 13]))
def test_C_y_product_matches_bruteforce(y, n, a, p):
    assume(y % p)
    spec = lf.LocalSumSpec(y, n, a, p)
    assert lf.C_y_product(spec) == lf.C_y_bruteforce(spec)


@given(st.integers(1, 200), st.sampled_from([3, 5, 7, 11, 13, 17, 19, 23]))
def test_c_y_identity(y, p):
    assume(y % p)
    assert lf.c_y_identity_check(y, p).ok


@given(st.integers(1, 40), st.integers(0, 20000))
def test_delta_y_periodic_mod_8y(y, k):
    primes = ac.primes_between(3 + 8 * y * k, 3 + 8 * y * (k + 1) + 2000)
    primes = primes[primes % y != 0][:40]
    for p in primes.tolist():
        q = next((q for q in ac.primes_between(p + 8 * y, p + 8 * y * 200).tolist() if (q - p) % (8 * y) == 0), None)
        if q is not None:
            assert dn.delta_y(y, p) == dn.delta_y(y, q)


@given(st.floats(0.01, 30.0))
def test_support_rule(xi):
    assume(not dn.is_excluded(xi, 0.05))
    v = dn.density_averaged(xi)
    assert set(v.per_y) == {y for y in range(1, 12) if y < 2 * math.sqrt(xi)}


def _next_odd_prime(n: int) -> int:
    n = max(n, 3)
    while not ac.is_prime(n):
        n += 1
    return n


@given(st.integers(3, 10**6).map(_next_odd_prime))
def test_c_p_in_unit_interval(p):
    c = lf.c_p(p, 1000)
    assert 0 < c <= 1


@given(st.floats(0.0, 1e6))
def test_j0_bounded(x):
    assert abs(float(an.bessel_j0(x))) <= 1.0


@given(st.integers(20, 600), st.integers(10, 600), st.integers(3, 400))
def test_empirical_decomposition_identity(X, Y, p):
    assume(ac.is_prime(p))
    W = qf.DiscriminantWindow(X, Y)
    fam = qf.family_table(W)
    assume(int((fam.h - 1).sum()) > 0)
    pt = em.empirical_point(W, p, fam)
    num = pt.numerator()
    assert abs(pt.G * pt.G_denom - num) <= 1e-9 * max(1.0, abs(num))
    for y, v in pt.G_num_plus_by_y.items():
        if y >= 2 * math.sqrt(pt.xi):
            assert v == 0
