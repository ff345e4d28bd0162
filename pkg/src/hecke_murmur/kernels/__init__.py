"""Dispatch layer for the hot kernels.

Both backends expose the same functions with the same signatures and return
bit-identical integer results; float kernels differ only in rounding order
where noted.
"""
import numpy as np

from .._accel import USE_NUMBA
from . import _numpy

if USE_NUMBA:
    from . import _numba as _impl
else:
    _impl = _numpy

BACKEND = "numba" if USE_NUMBA else "numpy"
_workers = 1


def set_workers(n: int) -> int:
    """Size the kernel thread pool; returns the count actually applied."""
    global _workers
    n = max(1, int(n))
    if USE_NUMBA:
        import numba

        n = min(n, numba.config.NUMBA_NUM_THREADS)
        numba.set_num_threads(n)
    _workers = n
    return n


def get_workers() -> int:
    return _workers


def jacobi_many(a, n: int) -> np.ndarray:
    return _impl.jacobi_many(np.ascontiguousarray(a, dtype=np.int64), int(n))


def spf_sieve(limit: int) -> np.ndarray:
    return _impl.spf_sieve(int(limit))


def mobius_segment(lo: int, hi: int, primes: np.ndarray) -> np.ndarray:
    return _impl.mobius_segment(int(lo), int(hi), np.ascontiguousarray(primes, dtype=np.int64))


def class_numbers_forms(Ds) -> np.ndarray:
    return _impl.class_numbers_forms(np.ascontiguousarray(Ds, dtype=np.int64))


def class_numbers_dirichlet(Ds, spf: np.ndarray) -> np.ndarray:
    return _impl.class_numbers_dirichlet(np.ascontiguousarray(Ds, dtype=np.int64), np.ascontiguousarray(spf, dtype=np.int32))


def empirical_counts(primes, X: int, Y: int, fam_D, h_by_off, ymax: int):
    args = (
        np.ascontiguousarray(primes, dtype=np.int64),
        int(X),
        int(Y),
        np.ascontiguousarray(fam_D, dtype=np.int64),
        np.ascontiguousarray(h_by_off, dtype=np.int64),
        int(ymax),
    )
    if USE_NUMBA:
        return _impl.empirical_counts(*args)
    return _impl.empirical_counts(*args, workers=_workers)


def c_products(primes, ells, factors) -> np.ndarray:
    return _impl.c_products(
        np.ascontiguousarray(primes, dtype=np.int64),
        np.ascontiguousarray(ells, dtype=np.int64),
        np.ascontiguousarray(factors, dtype=np.float64),
    )


def j0_many(x) -> np.ndarray:
    return _impl.j0_many(np.ascontiguousarray(x, dtype=np.float64))


def j0_msums(a, N) -> np.ndarray:
    return _impl.j0_msums(np.ascontiguousarray(a, dtype=np.float64), np.ascontiguousarray(N, dtype=np.int64))


def hankel_pq(x):
    """Vectorized P, Q of the Hankel expansion (numpy path on both backends: only called on short arrays)."""
    return _numpy.hankel_pq(np.asarray(x, dtype=np.float64))
