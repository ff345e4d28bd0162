"""Both kernel backends must agree: integers exactly, floats to a few ulps."""
import numpy as np
import pytest

from hecke_murmur import kernels
from hecke_murmur.kernels import _numpy
from hecke_murmur.quadfield import DiscriminantWindow, family_table

nb = pytest.importorskip("hecke_murmur.kernels._numba")
RNG = np.random.default_rng(20261016)


def test_backend_flag_reported():
    assert kernels.BACKEND in ("numba", "numpy")


def test_jacobi_many_parity():
    for n in (1, 3, 15, 97, 1001, 999983, 2**31 - 1):
        a = RNG.integers(-10**9, 10**9, 500)
        assert np.array_equal(nb.jacobi_many(a, n), _numpy.jacobi_many(a, n))


def test_spf_and_mobius_parity():
    assert np.array_equal(nb.spf_sieve(10**5), _numpy.spf_sieve(10**5))
    primes = np.flatnonzero(_numpy.spf_sieve(2000) == np.arange(2001))[2:].astype(np.int64)
    for lo, hi in ((1, 1000), (10**6, 10**6 + 5000), (999_000, 1_001_000)):
        assert np.array_equal(nb.mobius_segment(lo, hi, primes), _numpy.mobius_segment(lo, hi, primes))


def test_class_number_parity():
    Ds = family_table(DiscriminantWindow(3, 5000)).D
    spf = _numpy.spf_sieve(int(Ds.max()))
    f_nb, f_np = nb.class_numbers_forms(Ds), _numpy.class_numbers_forms(Ds)
    d_nb, d_np = nb.class_numbers_dirichlet(Ds, spf), _numpy.class_numbers_dirichlet(Ds, spf)
    assert np.array_equal(f_nb, f_np) and np.array_equal(d_nb, d_np) and np.array_equal(f_nb, d_nb)


def test_empirical_counts_parity():
    X = Y = 4096
    fam = family_table(DiscriminantWindow(X, Y))
    primes = np.flatnonzero(_numpy.spf_sieve(3 * X) == np.arange(3 * X + 1))[1:].astype(np.int64)
    ymax = 20
    a = nb.empirical_counts(primes, X, Y, fam.D, fam.h_by_offset(), ymax)
    for workers in (1, 3):
        b = _numpy.empirical_counts(primes, X, Y, fam.D, fam.h_by_offset(), ymax, workers=workers)
        for u, v in zip(a, b):
            assert np.array_equal(u, v)


def test_c_products_parity_both_paths():
    primes = np.flatnonzero(_numpy.spf_sieve(20000) == np.arange(20001))[2:].astype(np.int64)
    ells = np.array([3, 5, 7, 11, 13, 1009, 7919], dtype=np.int64)
    f = 1.0 + 1.0 / ells.astype(np.float64) ** 2
    # many primes: residue tables; three primes: Euler's criterion
    for ps in (primes, primes[:3]):
        a, b = nb.c_products(ps, ells, f), _numpy.c_products(ps, ells, f)
        assert np.array_equal(a, b)


def test_j0_parity():
    x = np.concatenate([np.linspace(0, 30, 6001), np.geomspace(30, 1e7, 3000), [2.25, 2.2500001, 25.25, 25.2500001]])
    a, b = nb.j0_many(x), _numpy.j0_many(x)
    assert np.max(np.abs(a - b)) <= 4e-16


def test_j0_branch_continuity():
    for edge in (2.25, 2.75, 12.25, 25.25):
        xs = np.array([np.nextafter(edge, 0), edge, np.nextafter(edge, 30)])
        for impl in (nb, _numpy):
            v = impl.j0_many(xs)
            assert np.ptp(v) <= 1e-15


def test_j0_msums_parity():
    a = np.array([0.01, 0.37, 1.9, 5.0])
    N = np.array([10, 1000, 5000, 300000], dtype=np.int64)
    s_nb, s_np = nb.j0_msums(a, N), _numpy.j0_msums(a, N)
    assert np.allclose(s_nb, s_np, rtol=0, atol=1e-11)


def test_hankel_pq_parity():
    x = np.geomspace(26, 1e6, 50)
    P1, Q1 = _numpy.hankel_pq(x)
    for i, xi in enumerate(x):
        P2, Q2 = nb.hankel_pq(xi)
        assert P2 == pytest.approx(P1[i], abs=1e-16) and Q2 == pytest.approx(Q1[i], abs=1e-16)


def test_set_workers_clamps():
    assert kernels.set_workers(0) == 1
    assert kernels.set_workers(1) == 1
    assert kernels.get_workers() == 1


@pytest.mark.parametrize("flag,want", [("1", "numpy"), ("", "numba")])
def test_env_flag_selects_backend(flag, want):
    import os
    import subprocess
    import sys

    env = dict(os.environ, HECKE_MURMUR_NO_NUMBA=flag)
    code = "from hecke_murmur import kernels; print(kernels.BACKEND)"
    r = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert r.stdout.strip() == want
