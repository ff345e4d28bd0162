"""Exact local character sums: C_{8n,p}, R_{a,p}, the twisted sums C^{(y)}, sigma tables and c(p)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels
from .arith_core import factorize, is_prime, kronecker, mobius, primes_between
from .errors import BudgetExceededError

LOOP_BUDGET = 10**8
SIGMA_KINDS = ("sigma2", "sigmap", "sigmaI", "sigmaII")


@dataclass(frozen=True)
class LocalSumSpec:
    y: int
    n: int
    a: int
    p: int

    def __post_init__(self):
        if min(self.y, self.n, self.a) < 1:
            raise ValueError("y, n, a must be positive")
        if self.p == 2 or not is_prime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.y % self.p == 0:
            raise ValueError(f"p={self.p} divides y={self.y}")

    @property
    def a_y(self) -> int:
        """Largest divisor of a supported on the primes of y."""
        out, a = 1, self.a
        for q in factorize(self.y).primes():
            while a % q == 0:
                a //= q
                out *= q
        return out

    @property
    def modulus(self) -> int:
        return 8 * self.y**2 * self.n * self.a**2


@dataclass(frozen=True)
class LocalFactorTable:
    place: int
    valuations: tuple[int, int, int]
    value: Fraction
    kind: str


def _odd_prime(p: int) -> None:
    if p == 2 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")


@lru_cache(maxsize=4096)
def _kronecker_table(n: int) -> np.ndarray:
    # (r/n) is periodic in r with period dividing 4n
    return np.array([kronecker(r, n) for r in range(4 * n)], dtype=np.int64)


def _symbol_sum(top: np.ndarray, n: int) -> int:
    return int(_kronecker_table(n)[top % (4 * n)].sum())


def C_8n_p_bruteforce(n: int, p: int) -> int:
    """Sum over odd x in [0, 8n) of ((x^2 - 4p)/n)."""
    _odd_prime(p)
    x = np.arange(1, 8 * n, 2, dtype=np.int64)
    return _symbol_sum(x * x - 4 * p, n)


def C_8n_p_product(n: int, p: int) -> int:
    _odd_prime(p)
    out = 1
    for q, e in factorize(n).factors:
        if q == 2:
            out *= 4 * (-2) ** e
        elif q == p:
            out *= (p - 1) * p ** (e - 1)
        elif e % 2 == 0:
            out *= q ** (e - 1) * (q - 1 - kronecker(p, q))
        else:
            out *= -(q ** (e - 1))
    if n % 2:
        out *= 4
    return out


def R_a_p(a: int, p: int) -> int:
    """Number of x mod a^2 with x^2 = 4p (mod a^2), for odd a."""
    if a < 1 or a % 2 == 0:
        raise ValueError(f"a must be odd and positive, got {a}")
    _odd_prime(p)
    out = 1
    for q, _ in factorize(a).factors:
        if q == p or kronecker(p, q) != 1:
            return 0
        out *= 2
    return out


def R_a_p_bruteforce(a: int, p: int) -> int:
    m = a * a
    x = np.arange(m, dtype=np.int64)
    return int(np.count_nonzero((x * x - 4 * p) % m == 0))


def C_8na2_p_a_bruteforce(n: int, a: int, p: int) -> int:
    """Sum over odd x mod 8na^2 with a^2 | 4p - x^2 of ((x^2 - 4p)/n)."""
    return C_y_bruteforce(LocalSumSpec(1, n, a, p))


def C_8na2_p_a(n: int, a: int, p: int) -> int:
    if math.gcd(n, a) > 1 or a % 2 == 0:
        return 0
    return C_8n_p_product(n, p) * R_a_p(a, p)


def C_y_bruteforce(spec: LocalSumSpec, budget: int = LOOP_BUDGET) -> int:
    m = spec.modulus
    if m > budget:
        raise BudgetExceededError(f"modulus {m} exceeds the loop budget {budget}")
    yy, aa, p, n = spec.y**2, spec.a**2, spec.p, spec.n
    total = 0
    step = 1 << 22
    for lo in range(0, m, step):
        x = np.arange(lo, min(m, lo + step), dtype=np.int64)
        r = 4 * p - x * x
        r = r[r % yy == 0] // yy
        r = r[(r % 4 == 3) & (r % aa == 0)]
        total += _symbol_sum(-r, n)
    return total


def sigma_local(kind: str, place: int, valuations: tuple[int, int, int], p: int) -> Fraction:
    """Local factor at one place; valuations = (nu, mu, e) of (y, a_y, n) there."""
    _odd_prime(p)
    nu, mu, e = valuations
    if min(nu, mu, e) < 0:
        raise ValueError("valuations must be non-negative")
    if kind == "sigma2":
        if place != 2:
            raise ValueError("sigma2 lives at the place 2")
        if nu == 0:
            if mu:
                raise ValueError("mu > 0 requires nu > 0")
            return Fraction(4 if e == 0 else 4 * (-2) ** e)
        if mu or e % 2:
            return Fraction(0)
        if nu == 1 and p % 4 == 3:
            return Fraction(2 ** (e + 3))
        if nu == 2 and p % 8 == 5:
            return Fraction(2 ** (e + 4))
        if nu >= 3 and p % 8 == 1:
            return Fraction(2 ** (e + 4))
        return Fraction(0)
    if kind == "sigmap":
        if place != p or nu or mu:
            raise ValueError("sigmap lives at the place p with nu = mu = 0")
        return Fraction(1 if e == 0 else (p - 1) * p ** (e - 1))
    if kind == "sigmaII":
        if place in (2, p) or nu or mu:
            raise ValueError("sigmaII lives at odd places other than p with nu = mu = 0")
        if e % 2 == 0:
            return Fraction(place ** (e - 1) * (place - 1 - kronecker(p, place))) if e else Fraction(1)
        return Fraction(-(place ** (e - 1)))
    if kind == "sigmaI":
        if place in (2, p) or nu < 1:
            raise ValueError("sigmaI lives at odd places dividing y (nu >= 1)")
        if kronecker(p, place) != 1:
            return Fraction(0)
        if e == 0:
            return Fraction(2)
        if e % 2 == 0 and mu == 0:
            return Fraction(2 * (place - 1) * place ** (e - 1))
        return Fraction(0)
    raise ValueError(f"unknown kind {kind!r}")


def sigma_table(y: int, n: int, a: int, p: int) -> list[LocalFactorTable]:
    """The local factors whose product is C^{(y)}_{a_y^2 8 y^2 n, p}."""
    spec = LocalSumSpec(y, n, a, p)
    a_y = spec.a_y
    places = sorted({2, p} | set(factorize(y).primes()) | set(factorize(n).primes()))
    rows = []
    for q in places:
        val = (_v(y, q), _v(a_y, q), _v(n, q))
        if q == 2:
            kind = "sigma2"
        elif q == p:
            kind = "sigmap"
        elif val[0] > 0:
            kind = "sigmaI"
        else:
            kind = "sigmaII"
        rows.append(LocalFactorTable(q, val, sigma_local(kind, q, val, p), kind))
    return rows


def _v(n: int, q: int) -> int:
    e = 0
    while n % q == 0:
        n //= q
        e += 1
    return e


def C_y_product(spec: LocalSumSpec) -> int:
    n, a, p = spec.n, spec.a, spec.p
    if math.gcd(n, a) > 1:
        return 0
    a_rest = a // spec.a_y
    if a_rest % 2 == 0:
        return 0
    value = Fraction(R_a_p(a_rest, p))
    for row in sigma_table(spec.y, n, a, p):
        value *= row.value
        if not value:
            return 0
    assert value.denominator == 1
    return int(value)


def c_factor(ell: int) -> Fraction:
    """1 - 2 l^-2 - 2 l^-3 / (1 - l^-2), the Euler factor of c(p) at a split odd place."""
    l = Fraction(ell)
    return 1 - 2 / l**2 - 2 / l**3 / (1 - 1 / l**2)


def c_p_exact(p: int, M: int) -> Fraction:
    _odd_prime(p)
    out = Fraction(p + 1, 3 * p)
    for ell in primes_between(3, M).tolist():
        if kronecker(p, ell) == 1:
            out *= c_factor(ell)
    return out


@lru_cache(maxsize=16)
def _odd_primes_and_factors(M: int) -> tuple[np.ndarray, np.ndarray]:
    ells = primes_between(3, M)
    l = ells.astype(np.float64)
    f = 1.0 - 2.0 / l**2 - 2.0 / l**3 / (1.0 - 1.0 / l**2)
    return ells, f


def c_p_many(primes, M: int) -> np.ndarray:
    """c(p) truncated at odd l <= M, for an array of odd primes."""
    primes = np.asarray(primes, dtype=np.int64)
    if M < 3:
        raise ValueError("M must be at least 3")
    ells, f = _odd_primes_and_factors(int(M))
    prod = kernels.c_products(primes, ells, f)
    return (primes + 1) / (3.0 * primes) * prod


def c_p(p: int, M: int) -> float:
    """c(p) with the Euler product truncated at odd primes l <= M.

    The omitted tail satisfies |log(c_inf / c_M)| <= sum_{l > M} 2 l^-2 <= 2/M.
    """
    _odd_prime(p)
    return float(c_p_many(np.array([p]), M)[0])


def c_p_tail_bound(M: int) -> float:
    return 2.0 / M


def double_sum_truncated(p: int, N0: int, A0: int) -> float:
    """sum_{n <= N0} sum_{a <= A0} mu(a) C_{8na^2,p,a} / (8 n^2 a^2), via the product formulas."""
    _odd_prime(p)
    a = np.arange(1, A0 + 1, 2, dtype=np.int64)
    w = np.array([mobius(int(k)) * R_a_p(int(k), p) for k in a], dtype=np.float64) / (a.astype(np.float64) ** 2)
    live = w != 0
    a, w = a[live], w[live]
    terms = []
    for n in range(1, N0 + 1):
        c = C_8n_p_product(n, p)
        if c:
            inner = w[np.gcd(a, n) == 1]
            terms.append(c / (8.0 * n * n) * math.fsum(inner))
    return math.fsum(terms)


def _series_exact(t0: Fraction, t1: Fraction, t2: Fraction, ratio: Fraction) -> Fraction:
    """t0 + sum_{f >= 1} t_f where t_{f+2} = ratio * t_f for f >= 1."""
    return t0 + (t1 + t2) / (1 - ratio)


@dataclass
class PlaceComparison:
    place: int
    nu: int
    from_sigma: Fraction
    closed_form: Fraction
    target: Fraction

    @property
    def equal(self) -> bool:
        return self.from_sigma == self.closed_form == self.target


@dataclass
class CyIdentityReport:
    y: int
    p: int
    places: list[PlaceComparison] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.equal for c in self.places)


def _factor_2(nu: int, p: int) -> Fraction:
    """(1/(8 4^nu)) sum_e sigma(2, nu, 0, e) / 4^e, summed exactly."""
    t = [sigma_local("sigma2", 2, (nu, 0, e), p) / Fraction(4) ** e for e in range(3)]
    return _series_exact(*t, Fraction(1, 4)) / (8 * Fraction(4) ** nu)


def _factor_odd_y(q: int, nu: int, p: int) -> Fraction:
    """Local factor of c_y(p) at an odd q | y: the n-series minus the a = q term."""
    q2 = Fraction(q * q)
    t = [sigma_local("sigmaI", q, (nu, 0, f), p) / q2**f for f in range(3)]
    return (_series_exact(*t, 1 / q2) - sigma_local("sigmaI", q, (nu, 1, 0), p) / q2) / q2**nu


def _factor_odd_plain(q: int, p: int) -> Fraction:
    """Local factor of c(p) at an odd q not dividing y."""
    q2 = Fraction(q * q)
    t = [sigma_local("sigmaII", q, (0, 0, f), p) / q2**f for f in range(3)]
    return _series_exact(*t, 1 / q2) - R_a_p(q, p) / q2


def c_y_identity_check(y: int, p: int) -> CyIdentityReport:
    """Per-place comparison of the c_y(p) local factors against vartheta(q^nu) delta / q^(2 nu)."""
    from .density import delta_y, vartheta

    _odd_prime(p)
    if y % p == 0:
        raise ValueError(f"p={p} divides y={y}")
    report = CyIdentityReport(y, p)
    for q, nu in factorize(y).factors:
        qn = q**nu
        target = vartheta(qn) / Fraction(qn * qn) * delta_y(qn, p)
        if q == 2:
            ratio = _factor_2(nu, p) / _factor_2(0, p)
            stated = Fraction(1, 3) if nu == 1 else Fraction(1, 3 * 2 ** (2 * nu - 3))
            closed = stated * delta_y(qn, p) / Fraction(1, 3)
        else:
            ratio = _factor_odd_y(q, nu, p) / _factor_odd_plain(q, p)
            closed = Fraction(2 * (q - 1) * (q**3 + q**2 - 1), q ** (2 * nu) * (q**4 - 3 * q**2 - 2 * q + 2))
            closed *= delta_y(qn, p)
        report.places.append(PlaceComparison(q, nu, ratio, closed, target))
    return report
