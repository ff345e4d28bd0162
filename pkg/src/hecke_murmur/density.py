"""Closed-form murmuration densities and their arithmetic weights."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith_core import factorize, is_prime, kronecker, primes_between
from .errors import EmptyWindowError, ExclusionZoneError
from .localfactors import c_p, c_p_many

ZETA2 = math.pi**2 / 6
# slack when comparing a distance against the exclusion radius, so that e.g. 0.3 - 0.25 counts as 0.05
EXCLUSION_SLACK = 1e-12


@dataclass(frozen=True)
class DensityParams:
    euler_cutoff: int = 10**5
    exclusion: float = 0.05
    accelerate: bool = True

    def __post_init__(self):
        if self.euler_cutoff < 100:
            raise ValueError("euler_cutoff must be at least 100")
        if not self.exclusion > 0:
            raise ValueError("exclusion radius must be positive")


@dataclass
class DensityValue:
    Xi: float
    M_total: float
    per_y: dict[int, float]
    M_minus_term: float
    form: str
    p: int | None = None
    bessel: float | None = None


@dataclass(frozen=True)
class DensityConstants:
    A: float
    cbar: float
    zeta2: float = ZETA2

    @property
    def pref(self) -> float:
        """11 zeta(2) / (4A), the common prefactor of every M_y."""
        return 11 * self.zeta2 / (4 * self.A)

    @property
    def minus_coeff(self) -> float:
        return 11 * math.pi / (12 * self.A)


def delta_y(y: int, p: int) -> int:
    if y < 1:
        raise ValueError("y must be positive")
    if y % p == 0:
        raise ValueError(f"p={p} divides y={y}")
    for q, k in factorize(y).factors:
        if q == 2:
            if k == 1:
                ok = p % 4 == 3
            elif k == 2:
                ok = p % 8 == 5
            else:
                ok = p % 8 == 1
        else:
            ok = kronecker(p, q) == 1
        if not ok:
            return 0
    return 1


def delta_y_many(y: int, primes: np.ndarray) -> np.ndarray:
    """delta_y(p) over an array of primes not dividing y."""
    primes = np.asarray(primes, dtype=np.int64)
    out = np.ones(primes.shape, dtype=np.int64)
    for q, k in factorize(y).factors:
        if q == 2:
            want = {1: (4, 3), 2: (8, 5)}.get(k, (8, 1))
            out &= (primes % want[0] == want[1]).astype(np.int64)
        else:
            qr = np.zeros(q, dtype=np.int64)
            x = np.arange(1, q)
            qr[(x * x) % q] = 1
            out &= qr[primes % q]
    return out


def vartheta(y: int) -> Fraction:
    fac = factorize(y)
    out = Fraction(2 ** (len(fac.factors) + min(fac.exponent(2), 2)))
    for q in fac.primes():
        if q > 2:
            out *= 1 + Fraction(2 * q * q + q - 1, q**4 - 3 * q * q - 2 * q + 2)
    return out


def kappa(y: int) -> Fraction:
    out = Fraction(2 if y % 2 == 0 else 1)
    for q in factorize(y).primes():
        if q > 2:
            out *= 1 + Fraction(q * q, q**4 - 2 * q * q - q + 1)
    return out


def eta_y(y: int) -> Fraction:
    fac = factorize(y)
    star = -1 if y % 4 == 0 else 0
    out = Fraction(2) ** (star - len(fac.factors))
    for q in fac.primes():
        if q > 2:
            l2, l3 = Fraction(1, q * q), Fraction(1, q**3)
            out *= (1 - 2 * l2 - 2 * l3 / (1 - l2)) / (1 - l2 - l3 / (1 - l2))
    return out


def _log_product(logs: np.ndarray) -> float:
    return math.exp(math.fsum(logs.tolist()))


@lru_cache(maxsize=32)
def constant_A(M: int, accelerate: bool = False) -> float:
    """prod_{p <= M} (1 + p / ((p+1)^2 (p-1))).

    Plain truncation leaves a log-tail below sum_{p > M} 2 p^-2 <= 2/M. With
    ``accelerate`` the product is rewritten as zeta(2) prod_p (1 - 1/(p^2 (p+1))),
    whose tail is O(M^-2).
    """
    if M < 2:
        raise ValueError("M must be at least 2")
    p = primes_between(2, M).astype(np.float64)
    if accelerate:
        return ZETA2 * _log_product(np.log1p(-1.0 / (p * p * (p + 1))))
    return _log_product(np.log1p(p / ((p + 1) ** 2 * (p - 1))))


def constant_A_exact(M: int) -> Fraction:
    out = Fraction(1)
    for p in primes_between(2, M).tolist():
        out *= 1 + Fraction(p, (p + 1) ** 2 * (p - 1))
    return out


@lru_cache(maxsize=32)
def constant_cbar(M: int, accelerate: bool = False) -> float:
    """(1/3) prod_{2 < l <= M} (1 - l^-2 - l^-3/(1 - l^-2)).

    With ``accelerate`` the factor (1 - l^-2) is pulled out into 4/(3 zeta(2)),
    leaving prod (1 - l^-3/(1 - l^-2)^2) with an O(M^-2) tail.
    """
    if M < 3:
        raise ValueError("M must be at least 3")
    l = primes_between(3, M).astype(np.float64)
    l2 = 1.0 / (l * l)
    if accelerate:
        return 4 / (9 * ZETA2) * _log_product(np.log1p(-(l2 / l) / (1 - l2) ** 2))
    return _log_product(np.log1p(-l2 - (l2 / l) / (1 - l2))) / 3


def constant_cbar_exact(M: int) -> Fraction:
    out = Fraction(1, 3)
    for ell in primes_between(3, M).tolist():
        l2, l3 = Fraction(1, ell * ell), Fraction(1, ell**3)
        out *= 1 - l2 - l3 / (1 - l2)
    return out


def constants(params: DensityParams) -> DensityConstants:
    return DensityConstants(
        constant_A(params.euler_cutoff, params.accelerate), constant_cbar(params.euler_cutoff, params.accelerate)
    )


def y_support(xi: float) -> range:
    """The y with 1 <= y < 2 sqrt(xi)."""
    y = 1
    while y * y < 4 * xi:
        y += 1
    return range(1, y)


def nearest_singular(xi: float) -> tuple[int, float]:
    """(y, |xi - y^2/4|) for the singular point y^2/4 closest to xi, y >= 1."""
    y0 = max(1, round(2 * math.sqrt(max(xi, 0.0))))
    cands = [y for y in (y0 - 1, y0, y0 + 1) if y >= 1]
    y = min(cands, key=lambda k: abs(xi - k * k / 4))
    return y, abs(xi - y * y / 4)


def is_excluded(xi: float, radius: float) -> bool:
    return nearest_singular(xi)[1] < radius - EXCLUSION_SLACK


def check_exclusion(xi: float, radius: float) -> None:
    y, dist = nearest_singular(xi)
    if dist < radius - EXCLUSION_SLACK:
        raise ExclusionZoneError(xi, y, radius)


def xi_grid(lo: float, hi: float, n: int, radius: float) -> tuple[np.ndarray, np.ndarray]:
    """Evenly spaced grid split into (kept, skipped) by the exclusion rule."""
    g = np.linspace(lo, hi, n)
    mask = np.array([not is_excluded(float(x), radius) for x in g], dtype=bool)
    return g[mask], g[~mask]


def _assemble(xi: float, weights: dict[int, float], consts: DensityConstants, form: str, p: int | None) -> DensityValue:
    per_y = {}
    for y in y_support(xi):
        per_y[y] = consts.pref * weights[y] * math.sqrt(xi / (4 * xi - y * y))
    minus = -consts.minus_coeff * math.sqrt(xi)
    total = math.fsum(list(per_y.values()) + [minus])
    return DensityValue(xi, total, per_y, minus, form, p)


def density_per_prime(p: int, X: int, params: DensityParams = DensityParams(), consts: DensityConstants | None = None) -> DensityValue:
    if p == 2 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    xi = p / X
    check_exclusion(xi, params.exclusion)
    consts = consts or constants(params)
    cp = c_p(p, params.euler_cutoff)
    weights = {y: cp * delta_y(y, p) * float(vartheta(y)) for y in y_support(xi)}
    return _assemble(xi, weights, consts, "per_prime", p)


def density_averaged(Xi: float, params: DensityParams = DensityParams(), consts: DensityConstants | None = None) -> DensityValue:
    if Xi <= 0:
        raise ValueError("Xi must be positive")
    check_exclusion(Xi, params.exclusion)
    consts = consts or constants(params)
    weights = {y: consts.cbar * float(kappa(y)) for y in y_support(Xi)}
    return _assemble(Xi, weights, consts, "averaged", None)


@lru_cache(maxsize=64)
def _kappa_table(ymax: int) -> np.ndarray:
    return np.array([0.0] + [float(kappa(y)) for y in range(1, ymax + 1)])


def density_array(xi, weights: np.ndarray, consts: DensityConstants) -> np.ndarray:
    """Vectorized density pref * sum_y w_y sqrt(xi/(4xi - y^2)) - minus_coeff sqrt(xi).

    ``weights[y]`` is the y-weight (index 0 unused); no exclusion check is made,
    so this is meant for quadrature nodes that avoid the singular points.
    """
    xi = np.asarray(xi, dtype=np.float64)
    out = np.zeros_like(xi)
    ymax = weights.size - 1
    for y in range(1, ymax + 1):
        live = 4 * xi > y * y
        if not live.any():
            break
        xl = xi[live]
        out[live] += weights[y] * np.sqrt(xl / (4 * xl - y * y))
    if (4 * xi > (ymax + 1) ** 2).any():
        raise ValueError("weight table too short for the requested xi")
    return consts.pref * out - consts.minus_coeff * np.sqrt(np.maximum(xi, 0.0))


def averaged_weights(ymax: int, consts: DensityConstants) -> np.ndarray:
    return consts.cbar * _kappa_table(ymax)


def per_prime_weights(p: int, ymax: int, M: int) -> np.ndarray:
    cp = c_p(p, M)
    w = [0.0] + [cp * delta_y(y, p) * float(vartheta(y)) if y % p else 0.0 for y in range(1, ymax + 1)]
    return np.array(w)


def _window_primes(X: int, H: int) -> np.ndarray:
    primes = primes_between(max(X, 3), X + H)
    if primes.size == 0:
        raise EmptyWindowError(f"no odd primes in [{X}, {X + H}]")
    return primes


def cbar_window_average(X: int, H: int, M: int) -> float:
    """Mean of c(p) (Euler product truncated at M) over the odd primes in [X, X + H]."""
    c = c_p_many(_window_primes(X, H), M)
    return float(np.add.reduce(c) / c.size)


def delta_weighted_window_average(X: int, H: int, y: int, M: int) -> float:
    """Mean of c(p) delta_y(p) over the primes in [X, X + H] not dividing y."""
    primes = _window_primes(X, H)
    primes = primes[y % primes != 0]
    c = c_p_many(primes, M) * delta_y_many(y, primes)
    return float(np.add.reduce(c) / c.size)


def c_periodic_part(primes, M: int) -> np.ndarray:
    """c(p) without the (p+1)/(3p) prefactor; depends only on p modulo prod_{2 < l <= M} l."""
    from . import kernels
    from .localfactors import _odd_primes_and_factors

    ells, f = _odd_primes_and_factors(int(M))
    return kernels.c_products(np.asarray(primes, dtype=np.int64), ells, f)


def per_prime_window_average(P: int, H: int, X: int, params: DensityParams = DensityParams()) -> float:
    """Mean over primes p in [P, P + H] of the per-prime density at xi = p/X."""
    primes = _window_primes(P, H)
    consts = constants(params)
    xi = primes / X
    for v in (xi.min(), xi.max()):
        check_exclusion(float(v), params.exclusion)
    ymax = max(y_support(float(xi.max())), default=1)
    cps = c_p_many(primes, params.euler_cutoff)
    vals = -consts.minus_coeff * np.sqrt(xi)
    for y in range(1, ymax + 1):
        live = (4 * xi > y * y) & (y % primes != 0)
        w = cps * delta_y_many(y, primes) * float(vartheta(y))
        vals[live] += consts.pref * w[live] * np.sqrt(xi[live] / (4 * xi[live] - y * y))
    return float(np.add.reduce(vals) / vals.size)
