"""Integer and character primitives: sieves, Kronecker symbol, multiplicative helpers."""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import ResourceLimitError

# Exact rationals are the stdlib Fraction: arbitrary precision, always reduced, positive denominator.
ExactRational = Fraction

SIEVE_BUDGET = int(os.environ.get("HECKE_MURMUR_SIEVE_BUDGET", 1 << 28))

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _check_budget(size: int) -> None:
    if size > SIEVE_BUDGET:
        raise ResourceLimitError(f"sieve of {size} entries exceeds the budget of {SIEVE_BUDGET}")


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n > 0."""
    if n <= 0 or n % 2 == 0:
        raise ValueError(f"Jacobi symbol needs an odd positive modulus, got {n}")
    return kernels._numpy.jacobi(a, n)


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for arbitrary integers."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -1
    if n % 2 == 0:
        if a % 2 == 0:
            return 0
        v = (n & -n).bit_length() - 1
        n >>= v
        if v % 2 and a % 8 in (3, 5):
            result = -result
    return result * kernels._numpy.jacobi(a, n)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for every n below 3.3e24."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for b in _MR_BASES:
        x = pow(b, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeTable:
    limit: int
    primes: np.ndarray
    smallest_prime_factor: np.ndarray

    def __contains__(self, n: int) -> bool:
        return 2 <= n <= self.limit and self.smallest_prime_factor[n] == n

    def primes_in(self, lo: int, hi: int) -> np.ndarray:
        i = np.searchsorted(self.primes, lo, side="left")
        j = np.searchsorted(self.primes, hi, side="right")
        return self.primes[i:j]


def sieve_primes(limit: int) -> PrimeTable:
    if limit < 2:
        raise ValueError("limit must be at least 2")
    _check_budget(limit + 1)
    spf = kernels.spf_sieve(limit)
    primes = np.flatnonzero(spf == np.arange(limit + 1)).astype(np.int64)
    primes = primes[primes >= 2]
    spf.flags.writeable = False
    primes.flags.writeable = False
    return PrimeTable(limit, primes, spf)


@lru_cache(maxsize=8)
def _small_primes(limit: int) -> np.ndarray:
    return sieve_primes(max(limit, 2)).primes


def primes_between(lo: int, hi: int) -> np.ndarray:
    """Primes in [lo, hi] via a segmented sieve (only sqrt(hi) is sieved in full)."""
    if hi < max(lo, 2):
        return np.zeros(0, dtype=np.int64)
    lo = max(lo, 2)
    _check_budget(hi - lo + 1)
    base = _small_primes(math.isqrt(hi) + 1)
    flags = np.ones(hi - lo + 1, dtype=bool)
    for p in base.tolist():
        if p * p > hi:
            break
        start = max(p * p, -(-lo // p) * p)
        flags[start - lo :: p] = False
    return np.flatnonzero(flags).astype(np.int64) + lo


@dataclass(frozen=True)
class MobiusTable:
    lo: int
    hi: int
    mu: np.ndarray
    squarefree: np.ndarray

    def at(self, n: int) -> int:
        if not self.lo <= n <= self.hi:
            raise IndexError(f"{n} outside [{self.lo}, {self.hi}]")
        return int(self.mu[n - self.lo])


def sieve_mobius(lo: int, hi: int) -> MobiusTable:
    if lo < 1 or hi < lo:
        raise ValueError(f"need 1 <= lo <= hi, got [{lo}, {hi}]")
    _check_budget(hi - lo + 1)
    mu = kernels.mobius_segment(lo, hi, _small_primes(math.isqrt(hi) + 1))
    mu.flags.writeable = False
    sq = mu != 0
    sq.flags.writeable = False
    return MobiusTable(lo, hi, mu, sq)


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[tuple[int, int], ...]

    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def exponent(self, p: int) -> int:
        for q, e in self.factors:
            if q == p:
                return e
        return 0

    def value(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p**e
        return out


@lru_cache(maxsize=1 << 16)
def factorize(n: int) -> Factorization:
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    m, out = n, []
    for p in (2, 3):
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        if e:
            out.append((p, e))
    p = 5
    while p * p <= m:
        for q in (p, p + 2):
            e = 0
            while m % q == 0:
                m //= q
                e += 1
            if e:
                out.append((q, e))
        p += 6
    if m > 1:
        out.append((m, 1))
    return Factorization(n, tuple(out))


def omega(n: int) -> int:
    return len(factorize(n).factors)


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def rad(n: int) -> int:
    return math.prod(factorize(n).primes())


def squarefree_kernel(n: int) -> int:
    """k(n): product of the primes dividing n to an odd power."""
    return math.prod(p for p, e in factorize(n).factors if e % 2)


def is_squarefree(n: int) -> bool:
    return all(e == 1 for _, e in factorize(n).factors)


def mobius(n: int) -> int:
    f = factorize(n).factors
    if any(e > 1 for _, e in f):
        return 0
    return -1 if len(f) % 2 else 1


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n).factors:
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def legendre_residue_sum(p: int, a: int) -> int:
    """Sum over x mod p of ((x^2 - a)/p), computed directly."""
    if p == 2 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    if a % p == 0:
        raise ValueError(f"p={p} divides a={a}")
    x = np.arange(p, dtype=np.int64)
    return int(kernels.jacobi_many((x * x - a) % p, p).sum(dtype=np.int64))


def eta(m: int) -> Fraction:
    """Product of p/(p+1) over the distinct primes p dividing m."""
    if m < 1:
        raise ValueError("m must be positive")
    out = Fraction(1)
    for p in factorize(m).primes():
        out *= Fraction(p, p + 1)
    return out


def eta_partial_sum(T: int) -> float:
    """Sum_{m <= T} eta(2m)/m^2 in double precision."""
    if T < 1:
        raise ValueError("T must be positive")
    vals = np.full(T + 1, 2.0 / 3.0)
    for q in _small_primes(T).tolist():
        if q > 2:
            vals[q::q] *= q / (q + 1)
    m = np.arange(1, T + 1, dtype=np.float64)
    return math.fsum(vals[1:] / (m * m))


def squarefree_char_sum(N: int, m: int, table) -> int:
    """Sum_{n <= N} mu^2(n) chi(n) with chi given by its values on residues mod m."""
    table = np.asarray(table, dtype=np.int64)
    if N < 1 or m < 1 or table.shape != (m,):
        raise ValueError("need N, m >= 1 and a table of length m")
    if not np.isin(table, (-1, 0, 1)).all() or table[1 % m] != 1:
        raise ValueError("character table must take values in {-1, 0, 1} with chi(1) = 1")
    probe = range(min(m, 64))
    for a in probe:
        for b in probe:
            if table[a * b % m] != table[a] * table[b]:
                raise ValueError(f"character table is not multiplicative: chi({a}*{b}) != chi({a})chi({b})")
    sq = sieve_mobius(1, N).squarefree
    n = np.arange(1, N + 1, dtype=np.int64)
    return int(table[n % m][sq].sum())


_BERNOULLI_2K = (Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30))


def zeta_real(s: float, terms: int = 10_000) -> float:
    """Riemann zeta for real s > 1 by Euler-Maclaurin with four correction terms."""
    if s <= 1:
        raise ValueError(f"zeta_real needs s > 1, got {s}")
    N = int(terms)
    n = np.arange(1, N, dtype=np.float64)
    parts = [math.fsum(n**-s), N ** (1 - s) / (s - 1), 0.5 * N**-s]
    rising = s
    for k, b in enumerate(_BERNOULLI_2K, start=1):
        parts.append(float(b) / math.factorial(2 * k) * rising * N ** (-s - 2 * k + 1))
        rising *= (s + 2 * k - 1) * (s + 2 * k)
    return math.fsum(parts)
