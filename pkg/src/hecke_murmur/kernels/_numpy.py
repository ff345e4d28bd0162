"""Pure-numpy implementations mirroring ``_numba`` one for one."""
from functools import lru_cache
from math import gcd, isqrt

import numpy as np

from ._j0table import ANCHOR_LO, ANCHOR_STEP, SERIES_MAX, TAYLOR_MAX
from ._j0table import TABLE as J0_TABLE


def jacobi(a: int, n: int) -> int:
    a %= n
    t = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                t = -t
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            t = -t
        a %= n
    return t if n == 1 else 0


def jacobi_many(a, n) -> np.ndarray:
    """Elementwise Jacobi symbol (a_i / n_i); n may be a scalar or an array of odd positives."""
    a = np.asarray(a, dtype=np.int64)
    n = np.broadcast_to(np.asarray(n, dtype=np.int64), a.shape).copy()
    a = a % n
    t = np.ones(a.shape, dtype=np.int8)
    live = np.flatnonzero(a)
    while live.size:
        av = a[live]
        nv = n[live]
        tv = t[live]
        while True:
            ev = av % 2 == 0
            if not ev.any():
                break
            av[ev] //= 2
            r = nv[ev] % 8
            tv[ev] = np.where((r == 3) | (r == 5), -tv[ev], tv[ev])
        flip = (av % 4 == 3) & (nv % 4 == 3)
        tv[flip] = -tv[flip]
        av, nv = nv % av, av
        a[live], n[live], t[live] = av, nv, tv
        live = live[av != 0]
    t[n != 1] = 0
    return t


def spf_sieve(limit: int) -> np.ndarray:
    spf = np.zeros(limit + 1, dtype=np.int32)
    for i in range(2, isqrt(limit) + 1):
        if spf[i] == 0:
            seg = spf[i * i :: i]
            seg[seg == 0] = i
    idx = np.arange(limit + 1, dtype=np.int32)
    unset = spf == 0
    spf[unset] = idx[unset]
    spf[:2] = 0
    return spf


def mobius_segment(lo: int, hi: int, primes: np.ndarray) -> np.ndarray:
    mu = np.ones(hi - lo + 1, dtype=np.int8)
    rem = np.arange(lo, hi + 1, dtype=np.int64)
    for p in primes:
        p = int(p)
        if p * p > hi:
            break
        start = -(-lo // p) * p - lo
        mu[start::p] *= -1
        rem[start::p] //= p
        start = -(-lo // (p * p)) * p * p - lo
        mu[start :: p * p] = 0
    mu[rem > 1] *= -1
    return mu


@lru_cache(maxsize=64)
def _pair_grid(amax: int):
    a_list, b_list = [], []
    for a in range(1, amax + 1):
        b = np.arange(1, a + 1, 2, dtype=np.int64)
        a_list.append(np.full(b.size, a, dtype=np.int64))
        b_list.append(b)
    if not a_list:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    return np.concatenate(a_list), np.concatenate(b_list)


def _h_forms(D: int) -> int:
    a, b = _pair_grid(isqrt(D // 3))
    num = b * b + D
    ok = num % (4 * a) == 0
    a, b, num = a[ok], b[ok], num[ok]
    c = num // (4 * a)
    keep = (c >= a) & (np.gcd(np.gcd(a, b), c) == 1)
    a, b, c = a[keep], b[keep], c[keep]
    return int(np.where((b == a) | (a == c), 1, 2).sum())


def class_numbers_forms(Ds: np.ndarray) -> np.ndarray:
    return np.array([_h_forms(int(D)) for D in Ds], dtype=np.int64)


class _Multiplicative:
    """Omega-levels of [1, limit] so a completely multiplicative function can be filled level by level."""

    def __init__(self, spf: np.ndarray):
        self.spf = spf.astype(np.int64)
        limit = spf.size - 1
        idx = np.arange(limit + 1, dtype=np.int64)
        self.cof = np.zeros(limit + 1, dtype=np.int64)
        self.cof[2:] = idx[2:] // self.spf[2:]
        omega = np.zeros(limit + 1, dtype=np.int64)
        for n in range(2, limit + 1):
            omega[n] = omega[self.cof[n]] + 1
        self.levels = [np.flatnonzero(omega == k) for k in range(1, int(omega.max(initial=0)) + 1)]
        self.primes = self.levels[0] if self.levels else np.zeros(0, np.int64)


@lru_cache(maxsize=4)
def _mult_for(spf_bytes: bytes, size: int) -> _Multiplicative:
    return _Multiplicative(np.frombuffer(spf_bytes, dtype=np.int32, count=size))


def _h_dirichlet(D: int, mult: _Multiplicative) -> int:
    half = (D - 1) // 2
    chi = np.zeros(half + 1, dtype=np.int8)
    if half >= 1:
        chi[1] = 1
    primes = mult.primes[: np.searchsorted(mult.primes, half, side="right")]
    at_prime = np.zeros(half + 1, dtype=np.int8)
    at_prime[primes] = jacobi_many(primes, D)
    for level in mult.levels:
        idx = level[: np.searchsorted(level, half, side="right")]
        if idx.size == 0:
            break
        chi[idx] = at_prime[mult.spf[idx]] * chi[mult.cof[idx]]
    s = int(chi.sum(dtype=np.int64))
    den = 1 if D % 8 == 7 else 3
    if s % den:
        return -1
    return s // den


def class_numbers_dirichlet(Ds: np.ndarray, spf: np.ndarray) -> np.ndarray:
    if len(Ds) == 0:
        return np.zeros(0, dtype=np.int64)
    mult = _mult_for(np.ascontiguousarray(spf, dtype=np.int32).tobytes(), spf.size)
    return np.array([_h_dirichlet(int(D), mult) for D in Ds], dtype=np.int64)


def _one_prime(p: int, X: int, Y: int, fam_D: np.ndarray, h_by_off: np.ndarray, ymax: int, plus_row: np.ndarray):
    cnt = int(np.count_nonzero(jacobi_many(p - fam_D % p, p) == 1))
    hits = []
    for y in range(1, ymax + 1):
        yy = y * y
        hi2 = 4 * p - yy * X
        if hi2 < 1:
            break
        lo2 = 4 * p - yy * (X + Y)
        x0 = 1 if lo2 <= 1 else isqrt(lo2 - 1) + 1
        x = np.arange(x0, isqrt(hi2) + 1, dtype=np.int64)
        r = 4 * p - x * x
        r = r[r % yy == 0]
        D = r // yy
        D = D[(D >= X) & (D <= X + Y)]
        D = D[h_by_off[D - X] > 0]
        if D.size:
            D = D[jacobi_many(p - D % p, p) == 1]
            plus_row[y] += int(h_by_off[D - X].sum())
            hits.append(D)
    dup = 0
    if hits:
        allh = np.concatenate(hits)
        dup = int(allh.size - np.unique(allh).size)
    return cnt, dup


def empirical_counts(primes, X, Y, fam_D, h_by_off, ymax, workers: int = 1):
    n = len(primes)
    nsplit = np.zeros(n, dtype=np.int64)
    dup = np.zeros(n, dtype=np.int64)
    plus = np.zeros((n, ymax + 1), dtype=np.int64)

    def run(i):
        nsplit[i], dup[i] = _one_prime(int(primes[i]), X, Y, fam_D, h_by_off, ymax, plus[i])

    if workers > 1 and n > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, range(n)))
    else:
        for i in range(n):
            run(i)
    return nsplit, plus, dup


def c_products(primes: np.ndarray, ells: np.ndarray, factors: np.ndarray) -> np.ndarray:
    out = np.ones(primes.shape[0], dtype=np.float64)
    plist = primes.tolist()
    for ell, f in zip(ells.tolist(), factors.tolist()):
        if 32 * len(plist) < ell:
            # Euler's criterion beats building an O(ell) residue table for a handful of primes
            hit = np.array([pow(p, (ell - 1) // 2, ell) == 1 for p in plist], dtype=bool)
        else:
            qr = np.zeros(ell, dtype=bool)
            x = np.arange(1, ell, dtype=np.int64)
            qr[(x * x) % ell] = True
            hit = qr[primes % ell]
        out[hit] *= f
    return out


def hankel_pq(x: np.ndarray):
    x = np.asarray(x, dtype=np.float64)
    P = np.ones_like(x)
    Q = np.zeros_like(x)
    b = np.ones_like(x)
    live = np.ones(x.shape, dtype=bool)
    for k in range(1, 80):
        nb = b * (2 * k - 1) ** 2 / (8.0 * k * x)
        live &= nb <= b
        if not live.any():
            break
        b = np.where(live, nb, b)
        sign = (1 if (k // 2) % 2 == 0 else -1) if k % 2 == 0 else (1 if ((k + 1) // 2) % 2 == 0 else -1)
        if k % 2 == 0:
            P = np.where(live, P + sign * b, P)
        else:
            Q = np.where(live, Q + sign * b, Q)
        live &= b >= 1e-18
    return P, Q


def j0_many(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    small = x <= SERIES_MAX
    if small.any():
        q = 0.25 * x[small] ** 2
        term = np.ones_like(q)
        s = np.ones_like(q)
        for k in range(1, 40):
            term *= -q / (k * k)
            s += term
        out[small] = s
    mid = ~small & (x <= TAYLOR_MAX)
    if mid.any():
        xm = x[mid]
        j = np.clip(((xm - ANCHOR_LO) / ANCHOR_STEP + 0.5).astype(np.int64), 0, J0_TABLE.shape[0] - 1)
        t = xm - (ANCHOR_LO + ANCHOR_STEP * j)
        coef = J0_TABLE[j]
        s = np.zeros_like(xm)
        for n in range(J0_TABLE.shape[1] - 1, -1, -1):
            s = s * t + coef[:, n]
        out[mid] = s
    big = x > TAYLOR_MAX
    if big.any():
        xb = x[big]
        P, Q = hankel_pq(xb)
        chi = xb - 0.25 * np.pi
        out[big] = np.sqrt(2.0 / (np.pi * xb)) * (P * np.cos(chi) - Q * np.sin(chi))
    return out


def j0_msums(a: np.ndarray, N: np.ndarray) -> np.ndarray:
    out = np.empty(a.shape[0], dtype=np.float64)
    for i in range(a.shape[0]):
        total = 0.0
        for lo in range(1, int(N[i]) + 1, 1 << 18):
            m = np.arange(lo, min(int(N[i]), lo + (1 << 18) - 1) + 1, dtype=np.float64)
            total += float(np.add.reduce(j0_many(a[i] * m)))
        out[i] = total
    return out


__all__ = [
    "gcd",
    "jacobi",
    "jacobi_many",
    "spf_sieve",
    "mobius_segment",
    "class_numbers_forms",
    "class_numbers_dirichlet",
    "empirical_counts",
    "c_products",
    "hankel_pq",
    "j0_many",
    "j0_msums",
]
