"""Exact empirical trace averages G(p, X, Y), their per-y decomposition and prime-window averages."""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .arith_core import is_prime, primes_between
from .errors import EmptyWindowError, InvariantViolation
from .quadfield import DiscriminantWindow, FamilyTable, family_table


@dataclass
class EmpiricalPoint:
    p: int
    xi: float
    G: float
    G_num_plus_by_y: dict[int, float]
    G_num_minus: float
    G_denom: float
    ramified_term: float
    counts: tuple[int, int]

    def numerator(self) -> float:
        return math.fsum(list(self.G_num_plus_by_y.values()) + [self.G_num_minus, self.ramified_term])


@dataclass(frozen=True)
class PrimeWindowAverage:
    P: int
    H: int
    Xi: float
    primes_used: int
    G_avg: float


@dataclass
class EquidistributionReport:
    window: tuple[int, int]
    q: int
    counts: dict[int, int]
    expected: float
    max_rel_deviation: float
    total: int = field(default=0)


def _ymax(p: int, X: int) -> int:
    # largest y with y^2 X < 4p
    return max(0, math.isqrt((4 * p - 1) // X))


@dataclass
class SweepArrays:
    """Column form of a sweep: integer counts stay exact, floats are derived on demand."""

    window: DiscriminantWindow
    primes: np.ndarray
    n_family: int
    G_denom: int
    n_split: np.ndarray
    plus: np.ndarray  # plus[i, y] = sum of h(-D) over D in D_p whose norm solution has this y
    h_ramified: np.ndarray  # h(-p) - 1 when p is itself a family member, else 0

    @property
    def xi(self) -> np.ndarray:
        return self.primes / self.window.X

    @property
    def G(self) -> np.ndarray:
        root = np.sqrt(self.primes.astype(np.float64))
        total = 2 * (self.plus.sum(axis=1) - self.n_split) + self.h_ramified
        return root * total / self.G_denom

    def point(self, i: int) -> EmpiricalPoint:
        p = int(self.primes[i])
        root = math.sqrt(p)
        plus = {y: 2 * root * int(self.plus[i, y]) for y in range(1, self.plus.shape[1])}
        minus = -2 * root * int(self.n_split[i])
        ram = root * int(self.h_ramified[i])
        G = root * (2 * (int(self.plus[i].sum()) - int(self.n_split[i])) + int(self.h_ramified[i])) / self.G_denom
        return EmpiricalPoint(p, p / self.window.X, G, plus, minus, float(self.G_denom), ram, (self.n_family, int(self.n_split[i])))


def sweep_arrays(window: DiscriminantWindow, primes, family: FamilyTable | None = None) -> SweepArrays:
    """Evaluate G at every prime in ``primes`` (odd primes, ascending)."""
    primes = np.asarray(primes, dtype=np.int64)
    if (primes == 2).any():
        raise ValueError("p = 2 is excluded")
    family = family or family_table(window)
    if family.window != window:
        raise ValueError("family table was built for a different window")
    denom = int((family.h - 1).sum())
    if family.D.size == 0 or denom == 0:
        raise ValueError("empty family: G_denom = sum (h(-D) - 1) is zero")
    ymax = _ymax(int(primes.max()), window.X) if primes.size else 0
    if primes.size:
        nsplit, plus, dup = kernels.empirical_counts(primes, window.X, window.Y, family.D, family.h_by_offset(), ymax)
        if dup.any():
            i = int(np.flatnonzero(dup)[0])
            raise InvariantViolation(f"nu(D, {int(primes[i])}) > 1 for some D: norm solutions are not unique")
    else:
        nsplit = np.zeros(0, dtype=np.int64)
        plus = np.zeros((0, 1), dtype=np.int64)
    hb = family.h_by_offset()
    off = primes - window.X
    inside = (off >= 0) & (off <= window.Y)
    ram = np.zeros(primes.size, dtype=np.int64)
    ram[inside] = np.where(hb[off[inside]] > 0, hb[off[inside]] - 1, 0)
    return SweepArrays(window, primes, int(family.D.size), denom, nsplit, plus, ram)


def empirical_point(window: DiscriminantWindow, p: int, family: FamilyTable | None = None) -> EmpiricalPoint:
    if p == 2:
        raise ValueError("p = 2 is excluded")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return sweep_arrays(window, [p], family).point(0)


def empirical_sweep(window: DiscriminantWindow, p_lo: int, p_hi: int, family: FamilyTable | None = None) -> list[EmpiricalPoint]:
    primes = primes_between(max(p_lo, 3), p_hi)
    if primes.size == 0:
        return []
    arr = sweep_arrays(window, primes, family)
    return [arr.point(i) for i in range(primes.size)]


def rolling_average(points, P: int, H: int, X: int | None = None) -> PrimeWindowAverage:
    """Mean of G over the points with P <= p <= P + H (points sorted by p)."""
    if H < 1:
        raise ValueError("H must be positive")
    ps = [pt.p for pt in points]
    lo = bisect.bisect_left(ps, P)
    hi = bisect.bisect_right(ps, P + H)
    if hi <= lo:
        raise EmptyWindowError(f"no primes in [{P}, {P + H}]")
    G = np.array([pt.G for pt in points[lo:hi]], dtype=np.float64)
    if X is None:
        X = points[lo].p / points[lo].xi
    return PrimeWindowAverage(int(P), int(H), P / X, hi - lo, float(np.add.reduce(G) / G.size))


def rolling_average_arrays(sweep: SweepArrays, P: int, H: int) -> PrimeWindowAverage:
    lo = int(np.searchsorted(sweep.primes, P, side="left"))
    hi = int(np.searchsorted(sweep.primes, P + H, side="right"))
    if hi <= lo:
        raise EmptyWindowError(f"no primes in [{P}, {P + H}]")
    G = sweep.G[lo:hi]
    return PrimeWindowAverage(int(P), int(H), P / sweep.window.X, hi - lo, float(np.add.reduce(G) / G.size))


def li_interval(a: float, b: float) -> float:
    """int_a^b dt / log t for 1 < a < b, by composite Gauss-Legendre on a smooth integrand."""
    if not 1 < a <= b:
        raise ValueError("need 1 < a <= b")
    x, w = np.polynomial.legendre.leggauss(20)
    edges = np.geomspace(a, b, 65) if b > a else np.array([a, b])
    lo, hi = edges[:-1, None], edges[1:, None]
    t = (hi + lo) / 2 + (hi - lo) / 2 * x[None, :]
    return float(np.add.reduce(((hi - lo) / 2 * w[None, :] / np.log(t)).ravel()))


def equidistribution_check(X: int, H: int, q: int) -> EquidistributionReport:
    if q < 2:
        raise ValueError("q must be at least 2")
    if H < 10 * q:
        raise ValueError("H must be at least 10 q")
    primes = primes_between(X, X + H)
    classes = [a for a in range(q) if math.gcd(a, q) == 1]
    res = primes % q
    counts = {a: int(np.count_nonzero(res == a)) for a in classes}
    expected = li_interval(max(X, 2), X + H) / len(classes)
    dev = max(abs(c - expected) / expected for c in counts.values())
    return EquidistributionReport((X, X + H), q, counts, expected, float(dev), sum(counts.values()))
