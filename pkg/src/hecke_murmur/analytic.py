"""Bessel resummation of the averaged density, Euler-product identities and weighted murmuration functions."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np

from . import kernels
from .arith_core import factorize, primes_between, zeta_real
from .density import (
    DensityConstants,
    DensityParams,
    _kappa_table,
    check_exclusion,
    constant_A,
    constant_cbar,
    constants,
    density_array,
)
from .errors import BudgetExceededError, QuadratureError

ACCELERATIONS = ("none", "cesaro", "tail_integral")
WEIGHT_KINDS = ("indicator_1_2", "smooth_bump")
QUAD_RULES = ("gauss_legendre_cos", "gauss_legendre")
# cap on the number of m-terms summed directly for a single d
M_BUDGET = 5 * 10**7
_EPS = np.finfo(np.float64).eps


# ---------------------------------------------------------------- Q(d)


def Q_d(d: int) -> Fraction:
    """mu^2(d) prod_{q | d, q odd} q^2 / (q^4 - 2q^2 - q + 1)."""
    if d < 1:
        raise ValueError("d must be a positive integer")
    out = Fraction(1)
    for q, e in factorize(d).factors:
        if e > 1:
            return Fraction(0)
        if q != 2:
            out *= Fraction(q * q, q**4 - 2 * q * q - q + 1)
    return out


@lru_cache(maxsize=8)
def Q_array(M: int) -> np.ndarray:
    """Float table of Q(d) for 0 <= d <= M (index 0 is 0)."""
    Q = np.ones(M + 1, dtype=np.float64)
    Q[0] = 0.0
    Q[4::4] = 0.0
    for q in primes_between(3, M).tolist():
        Q[q::q] *= q * q / (q**4 - 2 * q * q - q + 1)
        Q[q * q :: q * q] = 0.0
    Q.setflags(write=False)
    return Q


# ---------------------------------------------------------------- J0


def bessel_j0(x):
    """J0 by power series (x <= 2.25), series re-centred at tabulated anchors (x <= 25.25) or the Hankel expansion beyond."""
    arr = np.asarray(x, dtype=np.float64)
    if (arr < 0).any() or np.isnan(arr).any():
        raise ValueError("bessel_j0 needs x >= 0")
    out = kernels.j0_many(arr.ravel()).reshape(arr.shape)
    return float(out) if np.ndim(x) == 0 else out


def bessel_j0_quadrature(x: float, n: int | None = None) -> float:
    """(1/pi) int_0^pi cos(x sin t) dt by the trapezoid rule; the periodic integrand makes it spectrally accurate."""
    if x < 0:
        raise ValueError("x must be non-negative")
    n = n or int(2 * x) + 64
    t = np.linspace(0.0, math.pi, n + 1)
    f = np.cos(x * np.sin(t))
    return float((f[1:-1].sum() + 0.5 * (f[0] + f[-1])) / n)


# ---------------------------------------------------------------- Bessel form of M


@dataclass(frozen=True)
class BesselSeriesParams:
    d_max: int = 1000
    m_max: int = 1000
    acceleration: str = "tail_integral"
    # number of summation-by-parts terms in the tail_integral correction
    tail_terms: int = 5

    def __post_init__(self):
        if self.d_max < 10 or self.m_max < 10:
            raise ValueError("d_max and m_max must be at least 10")
        if self.acceleration not in ACCELERATIONS:
            raise ValueError(f"acceleration must be one of {ACCELERATIONS}")
        if not 1 <= self.tail_terms <= 12:
            raise ValueError("tail_terms must lie in [1, 12]")


class BesselEvaluation(NamedTuple):
    value: float
    trunc_estimate: float


def bessel_prefactor(consts: DensityConstants) -> float:
    """Coefficient C in M = C sqrt(Xi) sum_d Q(d)/d sum_m J0(4 pi m sqrt(Xi)/d) - 1/2."""
    return 11 * math.pi * consts.zeta2 * consts.cbar / (4 * consts.A)


def bessel_assemble(Xi: float, inner, consts: DensityConstants) -> float:
    """Combine inner m-sums (``inner[d-1]`` for d = 1, 2, ...) into M(Xi)."""
    inner = np.asarray(inner, dtype=np.float64)
    d = np.arange(1, inner.size + 1)
    Q = Q_array(max(int(inner.size), 1))[1 : inner.size + 1]
    return bessel_prefactor(consts) * math.sqrt(Xi) * float(np.add.reduce(Q / d * inner)) - 0.5


def _hankel_h(a: np.ndarray, m: np.ndarray) -> np.ndarray:
    # J0(a m) = Re[exp(-i pi/4) exp(i a m) h(m)]
    x = a * m
    P, Q = kernels.hankel_pq(x)
    return np.sqrt(2.0 / (np.pi * x)) * (P + 1j * Q)


def _tail_sum(a: np.ndarray, n: np.ndarray, K: int) -> tuple[np.ndarray, np.ndarray]:
    """sum_{m >= n} J0(a m) by repeated summation by parts on the Hankel form, with the next-term error."""
    j = np.arange(K + 1)
    m = n[:, None] + j[None, :]
    h = _hankel_h(a[:, None], m.astype(np.float64))
    one_w = 1.0 - np.exp(1j * a)
    phase = lambda k: np.exp(1j * np.mod(a * (n + k), 2 * np.pi))  # noqa: E731
    total = np.zeros(a.shape, dtype=np.complex128)
    diff = h.copy()
    last = None
    for k in range(K + 1):
        term = phase(k) * diff[:, k] / one_w ** (k + 1)
        if k < K:
            total += term
        else:
            last = term
        # forward difference in m, aligned so that column k+1 holds nabla^{k+1} h(n + k + 1)
        diff[:, k + 1 :] = diff[:, k + 1 :] - diff[:, k:-1].copy()
    rot = np.exp(-0.25j * np.pi)
    return (rot * total).real, np.abs(last)


def _m_sums(a: np.ndarray, params: BesselSeriesParams) -> tuple[np.ndarray, np.ndarray]:
    """sum_{m >= 1} J0(a m) for each a, with per-entry error estimates."""
    one_w = np.abs(1.0 - np.exp(1j * a))
    if params.acceleration == "tail_integral":
        N = np.maximum(params.m_max, np.ceil(60.0 / one_w)).astype(np.int64)
        if N.max() > M_BUDGET:
            raise BudgetExceededError(f"m-sum needs {int(N.max())} terms (budget {M_BUDGET})")
        head = kernels.j0_msums(a, N)
        tail, err = _tail_sum(a, N + 1, params.tail_terms)
        return head + tail, err
    N = np.full(a.shape, params.m_max, dtype=np.int64)
    h_next = np.abs(_hankel_h(a, (N + 1).astype(np.float64)))
    if params.acceleration == "none":
        return kernels.j0_msums(a, N), h_next / one_w
    # Cesaro mean of the partial sums S_1..S_N; error from halving N
    out = np.empty(a.shape)
    err = np.empty(a.shape)
    for i, ai in enumerate(a.tolist()):
        n = int(N[i])
        S = np.cumsum(kernels.j0_many(ai * np.arange(1, n + 1, dtype=np.float64)))
        out[i] = S.mean()
        err[i] = abs(out[i] - S[: n // 2].mean())
    return out, err


def _L_tail_bound(s: float, M: int) -> float:
    # log of prod_{p > M} (1 + 2p^2/(p^4 (p^{s+2}))) bounded via sum_{n > M} 4 n^{-s-4}
    return 4.0 * M ** (-s - 3) / (s + 3)


def density_bessel(
    Xi: float,
    params: BesselSeriesParams = BesselSeriesParams(),
    density: DensityParams = DensityParams(),
    consts: DensityConstants | None = None,
) -> BesselEvaluation:
    """M(Xi) from its Bessel double series; the d > d_max tail uses S(a) = 1/a - 1/2, exact for a < 2 pi."""
    if not Xi > 0:
        raise ValueError("Xi must be positive")
    check_exclusion(Xi, density.exclusion)
    if params.d_max <= 2 * math.sqrt(Xi):
        raise ValueError(f"d_max must exceed 2 sqrt(Xi) = {2 * math.sqrt(Xi):.3f}")
    consts = consts or constants(density)
    C = bessel_prefactor(consts)
    root = math.sqrt(Xi)
    Q = Q_array(params.d_max)
    d = np.flatnonzero(Q)
    d = d[d >= 1]
    a = 4 * math.pi * root / d
    S, err = _m_sums(a.astype(np.float64), params)
    coef = C * root * Q[d] / d
    head = float(np.add.reduce(coef * S))
    head_err = float(np.add.reduce(coef * err))
    # d > d_max: sum_m J0(a m) = 1/a - 1/2 because a < 2 pi
    M = density.euler_cutoff
    T0 = L_closed_form(0.0, M) - float(np.add.reduce(Q[1:]))
    T1 = L_closed_form(1.0, M) - float(np.add.reduce(Q[d] / d))
    tail = C / (4 * math.pi) * T0 - 0.5 * C * root * T1
    tail_err = C * (L_closed_form(0.0, M) * _L_tail_bound(0.0, M) + root * L_closed_form(1.0, M) * _L_tail_bound(1.0, M))
    value = math.fsum([head, tail, -0.5])
    return BesselEvaluation(value, head_err + tail_err + 8 * _EPS * abs(head))


# ---------------------------------------------------------------- Euler-product identities


@dataclass(frozen=True)
class EulerIdentityReport:
    M: int
    sum_Q: float
    sum_Q_over_d: float
    lhs_8_11: float
    lhs_2_3: float
    residual_8_11: float
    residual_2_3: float


def euler_identities(M: int, matched: bool = True) -> EulerIdentityReport:
    """Residuals of zeta(2) cbar / A sum Q(d) = 8/11 and zeta(2) cbar sum Q(d)/d = 2/3.

    A, cbar and (with ``matched``) zeta(2) are plain Euler products over p <= M,
    the sums run over d <= M. ``matched=False`` uses the exact zeta(2).
    """
    if M < 1000:
        raise ValueError("M must be at least 1000")
    Q = Q_array(M)
    d = np.arange(M + 1, dtype=np.float64)
    d[0] = 1.0
    s0 = math.fsum(Q.tolist())
    s1 = math.fsum((Q / d).tolist())
    if matched:
        p = primes_between(2, M).astype(np.float64)
        z2 = math.exp(-math.fsum(np.log1p(-1.0 / (p * p)).tolist()))
    else:
        z2 = math.pi**2 / 6
    A, cbar = constant_A(M), constant_cbar(M)
    lhs0 = z2 * cbar / A * s0
    lhs1 = z2 * cbar * s1
    return EulerIdentityReport(M, s0, s1, lhs0, lhs1, abs(lhs0 - 8 / 11), abs(lhs1 - 2 / 3))


def L_closed_form(s: float, M: int = 10**5) -> float:
    """zeta(s+2)/zeta(2s+4) (1+2^-s)/(1+2^-s/4) prod_{2<p<=M} (1 + (2p^2+p-1)/((p^4-2p^2-p+1)(p^{s+2}+1)))."""
    p = primes_between(3, M).astype(np.float64)
    num = 2 * p * p + p - 1
    den = (p**4 - 2 * p * p - p + 1) * (p ** (s + 2) + 1)
    prod = math.exp(math.fsum(np.log1p(num / den).tolist()))
    two = (1 + 2.0**-s) / (1 + 2.0**-s / 4)
    return zeta_real(s + 2) / zeta_real(2 * s + 4) * two * prod


class LSeriesCheck(NamedTuple):
    s: float
    M: int
    direct: float
    closed: float
    residual: float


def L_series_check(s: float, M: int, prime_cutoff: int | None = None) -> LSeriesCheck:
    """|sum_{d <= M} Q(d) d^-s - L(s)| with L(s) from its Euler-product closed form."""
    if not s > 0.5:
        raise ValueError("L_series_check needs s > 1/2")
    if M < 10:
        raise ValueError("M must be at least 10")
    Q = Q_array(M)
    d = np.arange(1, M + 1, dtype=np.float64)
    direct = math.fsum((Q[1:] * d**-s).tolist())
    closed = L_closed_form(s, prime_cutoff or max(M, 10**5))
    return LSeriesCheck(s, M, direct, closed, abs(direct - closed))


# ---------------------------------------------------------------- weighted murmuration function


@dataclass(frozen=True)
class WeightFunction:
    kind: str = "indicator_1_2"
    support: tuple[float, float] = (1.0, 2.0)
    nodes: int = 32
    rule: str = "gauss_legendre_cos"
    # smooth bump shape exp(-sharpness / (1 - t^2)) on t in (-1, 1)
    sharpness: float = 1.0

    def __post_init__(self):
        if self.kind not in WEIGHT_KINDS:
            raise ValueError(f"kind must be one of {WEIGHT_KINDS}")
        if self.rule not in QUAD_RULES:
            raise ValueError(f"rule must be one of {QUAD_RULES}")
        a, b = self.support
        if not 0 < a < b:
            raise ValueError("support must satisfy 0 < a < b")
        if self.kind == "indicator_1_2" and tuple(self.support) != (1.0, 2.0):
            raise ValueError("indicator_1_2 has support [1, 2]")
        if self.nodes < 4:
            raise ValueError("at least 4 quadrature nodes are needed")
        if not self.sharpness > 0:
            raise ValueError("sharpness must be positive")

    def __call__(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=np.float64)
        a, b = self.support
        inside = (u >= a) & (u <= b) if self.kind == "indicator_1_2" else (u > a) & (u < b)
        if self.kind == "indicator_1_2":
            return inside.astype(np.float64)
        t = (2 * u - (a + b)) / (b - a)
        out = np.zeros_like(u)
        ti = t[inside]
        out[inside] = np.exp(-self.sharpness / (1 - ti * ti))
        return out

    def with_nodes(self, nodes: int) -> "WeightFunction":
        return WeightFunction(self.kind, self.support, nodes, self.rule, self.sharpness)


class MurmurationValue(NamedTuple):
    Xi: float
    value: float
    quad_error: float


@lru_cache(maxsize=16)
def _gauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def singular_points(Xi: float, support: tuple[float, float]) -> np.ndarray:
    """u in the open support with Xi/u = y^2/4 for an integer y >= 1."""
    a, b = support
    lo = max(1, math.ceil(2 * math.sqrt(Xi / b)))
    hi = math.floor(2 * math.sqrt(Xi / a))
    u = np.array([4 * Xi / (y * y) for y in range(lo, hi + 1)], dtype=np.float64)
    return np.sort(u[(u > a) & (u < b)])


def averaged_density_fn(Xi_max: float, consts: DensityConstants) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized averaged density valid for xi <= Xi_max."""
    ymax = math.floor(2 * math.sqrt(Xi_max)) + 1
    w = consts.cbar * _kappa_table(ymax)
    return lambda xi: density_array(xi, w, consts)


def _map(rule: str, l: np.ndarray, r: np.ndarray, theta: np.ndarray):
    # node map on a panel; returns (u, du/dtheta)
    if rule == "gauss_legendre_cos":
        return l + (r - l) * (1 - np.cos(theta)) / 2, (r - l) * np.sin(theta) / 2
    return l + (r - l) * theta, (r - l) * np.ones_like(theta)


def murmuration_fn(
    Xi: float,
    weight: WeightFunction = WeightFunction(),
    params: DensityParams = DensityParams(),
    density: Callable[[np.ndarray], np.ndarray] | None = None,
    rel_tol: float = 1e-8,
    consts: DensityConstants | None = None,
    max_depth: int = 40,
) -> MurmurationValue:
    """M_Phi(Xi) = int M(Xi/u) Phi(u) u^{1/2} du / int Phi(u) u^{1/2} du.

    The support is split at every singular point u = 4 Xi / y^2; on each panel
    the cosine node map absorbs the endpoint square-root singularity, and
    panels are bisected until the n- and 2n-point Gauss rules agree.
    """
    if Xi < 0:
        raise ValueError("Xi must be non-negative")
    if Xi == 0:
        return MurmurationValue(0.0, 0.0, 0.0)
    if density is None:
        consts = consts or constants(params)
        density = averaged_density_fn(Xi / weight.support[0], consts)
    a, b = weight.support
    edges = np.concatenate([[a], singular_points(Xi, weight.support), [b]])
    span = math.pi if weight.rule == "gauss_legendre_cos" else 1.0
    n = weight.nodes
    x1, w1 = _gauss(n)
    x2, w2 = _gauss(2 * n)

    # work items: (panel left, panel right, theta0, theta1, depth)
    L = edges[:-1].copy()
    R = edges[1:].copy()
    T0 = np.zeros(L.size)
    T1 = np.full(L.size, span)
    depth = np.zeros(L.size, dtype=np.int64)
    total_span = span * L.size

    acc = np.zeros(2)
    acc_err = np.zeros(2)
    acc_abs = np.zeros(2)
    scale = None
    while L.size:
        half = (T1 - T0) / 2
        mid = (T1 + T0) / 2
        res = []
        for xs, ws in ((x1, w1), (x2, w2)):
            th = mid[:, None] + half[:, None] * xs[None, :]
            u, du = _map(weight.rule, L[:, None], R[:, None], th)
            base = weight(u) * np.sqrt(u) * du * (half[:, None] * ws[None, :])
            Mv = density((Xi / u).ravel()).reshape(u.shape)
            num = Mv * base
            res.append((num.sum(axis=1), base.sum(axis=1), np.abs(num).sum(axis=1) + np.abs(base).sum(axis=1)))
        (n1, d1, _), (n2, d2, ab) = res
        e = np.abs(n2 - n1) + np.abs(d2 - d1)
        if scale is None:
            scale = max(float(ab.sum()), np.finfo(float).tiny)
        tol = rel_tol * scale * (T1 - T0) / total_span
        # rounding floor: 4 Xi/u - y^2 cancels near a singular point, so noise below eps * scale cannot be refined away
        floor = 64 * _EPS * np.maximum(ab, scale)
        ok = (e <= tol) | (e <= floor)
        acc += [float(np.add.reduce(n2[ok])), float(np.add.reduce(d2[ok]))]
        acc_err += [float(np.add.reduce(np.abs(n2 - n1)[ok])), float(np.add.reduce(np.abs(d2 - d1)[ok]))]
        acc_abs += [float(np.add.reduce(ab[ok])), 0.0]
        bad = ~ok
        if (depth[bad] >= max_depth).any():
            i = np.flatnonzero(bad & (depth >= max_depth))[0]
            (ul, ur), _ = _map(weight.rule, L[i], R[i], np.array([T0[i], T1[i]]))
            raise QuadratureError(float(ul), float(ur), float(e[i]))
        L, R, T0, T1, depth = (
            np.repeat(L[bad], 2),
            np.repeat(R[bad], 2),
            np.stack([T0[bad], mid[bad]], 1).ravel(),
            np.stack([mid[bad], T1[bad]], 1).ravel(),
            np.repeat(depth[bad] + 1, 2),
        )
    num, den = acc
    if den <= 0:
        raise QuadratureError(float(a), float(b), float("nan"))
    value = num / den
    err = acc_err[0] / den + abs(num) * acc_err[1] / den**2 + 4 * _EPS * acc_abs[0] / den
    return MurmurationValue(float(Xi), float(value), float(err))


# ---------------------------------------------------------------- large-Xi asymptote


@dataclass
class AsymptoteReport:
    slope: float
    intercept: float
    Xi: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    dropped: list[float] = field(default_factory=list)

    @property
    def used(self) -> np.ndarray:
        keep = ~np.isin(self.Xi, self.dropped)
        return self.Xi[keep]


def asymptote_report(
    weight: WeightFunction,
    grid,
    params: DensityParams = DensityParams(),
    density: Callable[[np.ndarray], np.ndarray] | None = None,
    rel_tol: float = 1e-10,
) -> AsymptoteReport:
    """Least-squares slope of log|M_Phi(Xi) + 1/2| against log Xi."""
    grid = np.asarray(sorted(float(g) for g in grid))
    if grid.size < 2 or grid[0] < 100 or grid[-1] / grid[0] < 100 * (1 - 1e-12):
        raise ValueError("grid needs at least two points >= 1e2 spanning two decades")
    consts = None if density is not None else constants(params)
    vals, errs = [], []
    for X in grid:
        r = murmuration_fn(float(X), weight, params, density, rel_tol, consts)
        vals.append(r.value)
        errs.append(r.quad_error)
    vals = np.asarray(vals)
    errs = np.asarray(errs)
    dev = np.abs(vals + 0.5)
    drop = dev < 10 * errs
    dropped = grid[drop].tolist()
    if dropped:
        warnings.warn(f"dropped {len(dropped)} grid point(s) where |M_Phi + 1/2| is below 10x the quadrature error", RuntimeWarning, stacklevel=2)
    keep = ~drop
    if keep.sum() < 2:
        return AsymptoteReport(float("nan"), float("nan"), grid, vals, errs, dropped)
    slope, icpt = np.polyfit(np.log(grid[keep]), np.log(dev[keep]), 1)
    return AsymptoteReport(float(slope), float(icpt), grid, vals, errs, dropped)
