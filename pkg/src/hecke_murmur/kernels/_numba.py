"""numba implementations of the hot loops (see ``_numpy`` for the fallback)."""
import math

import numpy as np
from numba import njit, prange

from ._j0table import ANCHOR_LO, ANCHOR_STEP, SERIES_MAX, TABLE as _J0_TABLE, TAYLOR_MAX


@njit(cache=True)
def isqrt(n):
    r = np.int64(math.sqrt(n))
    while r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    return r


@njit(cache=True)
def gcd(a, b):
    while b:
        a, b = b, a % b
    return a


@njit(cache=True)
def jacobi(a, n):
    # n odd and positive
    a = a % n
    t = 1
    while a != 0:
        while a % 2 == 0:
            a //= 2
            r = n % 8
            if r == 3 or r == 5:
                t = -t
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            t = -t
        a = a % n
    if n == 1:
        return t
    return 0


@njit(cache=True)
def jacobi_many(a, n):
    out = np.empty(a.shape[0], np.int8)
    for i in range(a.shape[0]):
        out[i] = jacobi(a[i], n)
    return out


@njit(cache=True)
def spf_sieve(limit):
    spf = np.zeros(limit + 1, np.int32)
    for i in range(2, limit + 1):
        if spf[i] == 0:
            spf[i] = i
            if i <= limit // i:
                for j in range(i * i, limit + 1, i):
                    if spf[j] == 0:
                        spf[j] = i
    return spf


@njit(cache=True)
def mobius_segment(lo, hi, primes):
    n = hi - lo + 1
    mu = np.ones(n, np.int8)
    rem = np.empty(n, np.int64)
    for i in range(n):
        rem[i] = lo + i
    for k in range(primes.shape[0]):
        p = primes[k]
        if p * p > hi:
            break
        start = ((lo + p - 1) // p) * p
        for m in range(start, hi + 1, p):
            i = m - lo
            mu[i] = -mu[i]
            rem[i] //= p
        pp = p * p
        start = ((lo + pp - 1) // pp) * pp
        for m in range(start, hi + 1, pp):
            mu[m - lo] = 0
    for i in range(n):
        if rem[i] > 1:
            mu[i] = -mu[i]
    return mu


@njit(cache=True)
def _h_forms(D):
    h = 0
    a = 1
    while 3 * a * a <= D:
        four_a = 4 * a
        for b in range(1, a + 1, 2):
            num = b * b + D
            if num % four_a != 0:
                continue
            c = num // four_a
            if c < a:
                continue
            if gcd(gcd(a, b), c) != 1:
                continue
            if b == a or a == c:
                h += 1
            else:
                h += 2
        a += 1
    return h


@njit(parallel=True, cache=True)
def class_numbers_forms(Ds):
    out = np.empty(Ds.shape[0], np.int64)
    for i in prange(Ds.shape[0]):
        out[i] = _h_forms(Ds[i])
    return out


@njit(cache=True)
def _h_dirichlet(D, spf):
    half = (D - 1) // 2
    chi = np.empty(half + 1, np.int8)
    chi[0] = 0
    s = 0
    if half >= 1:
        chi[1] = 1
        s = 1
    for a in range(2, half + 1):
        q = spf[a]
        if q == a:
            chi[a] = jacobi(a, D)
        else:
            chi[a] = chi[q] * chi[a // q]
        s += chi[a]
    chi2 = 1 if D % 8 == 7 else -1
    den = 2 - chi2
    if s % den != 0:
        return -1
    return s // den


@njit(parallel=True, cache=True)
def class_numbers_dirichlet(Ds, spf):
    out = np.empty(Ds.shape[0], np.int64)
    for i in prange(Ds.shape[0]):
        out[i] = _h_dirichlet(Ds[i], spf)
    return out


@njit(cache=True)
def _one_prime(p, X, Y, fam_D, h_by_off, ymax, plus_row):
    cnt = 0
    for k in range(fam_D.shape[0]):
        D = fam_D[k]
        if jacobi(p - D % p, p) == 1:
            cnt += 1
    cap = ymax * (2 * isqrt(p) + 3) + 1
    hits = np.empty(cap, np.int64)
    nh = 0
    y = 1
    while y <= ymax:
        yy = y * y
        hi2 = 4 * p - yy * X
        if hi2 < 1:
            break
        lo2 = 4 * p - yy * (X + Y)
        if lo2 <= 1:
            x = 1
        else:
            x = isqrt(lo2 - 1) + 1
        while x * x <= hi2:
            r = 4 * p - x * x
            if r % yy == 0:
                D = r // yy
                if D >= X and D <= X + Y:
                    hv = h_by_off[D - X]
                    if hv > 0 and jacobi(p - D % p, p) == 1:
                        plus_row[y] += hv
                        hits[nh] = D
                        nh += 1
            x += 1
        y += 1
    dup = 0
    if nh > 1:
        hs = np.sort(hits[:nh])
        for k in range(1, nh):
            if hs[k] == hs[k - 1]:
                dup += 1
    return cnt, dup


@njit(parallel=True, cache=True)
def empirical_counts(primes, X, Y, fam_D, h_by_off, ymax):
    n = primes.shape[0]
    nsplit = np.zeros(n, np.int64)
    dup = np.zeros(n, np.int64)
    plus = np.zeros((n, ymax + 1), np.int64)
    for i in prange(n):
        c, d = _one_prime(primes[i], X, Y, fam_D, h_by_off, ymax, plus[i])
        nsplit[i] = c
        dup[i] = d
    return nsplit, plus, dup


@njit(cache=True)
def _powmod(b, e, m):
    r = 1
    b %= m
    while e:
        if e & 1:
            r = r * b % m
        b = b * b % m
        e >>= 1
    return r


@njit(parallel=True, cache=True)
def _apply_factor(out, primes, qr, ell, f):
    for i in prange(primes.shape[0]):
        if qr[primes[i] % ell]:
            out[i] *= f


@njit(parallel=True, cache=True)
def _apply_factor_euler(out, primes, ell, f):
    for i in prange(primes.shape[0]):
        r = primes[i] % ell
        if r and _powmod(r, (ell - 1) // 2, ell) == 1:
            out[i] *= f


@njit(cache=True)
def _qr_table(ell):
    qr = np.zeros(ell, np.bool_)
    for x in range(1, ell):
        qr[(x * x) % ell] = True
    return qr


def c_products(primes, ells, factors):
    out = np.ones(primes.shape[0], np.float64)
    for j in range(ells.shape[0]):
        ell = int(ells[j])
        # a residue table costs O(ell); Euler's criterion costs O(log ell) per prime
        if 32 * primes.shape[0] < ell:
            _apply_factor_euler(out, primes, ell, factors[j])
        else:
            _apply_factor(out, primes, _qr_table(ell), ell, factors[j])
    return out


@njit(cache=True)
def hankel_pq(x):
    # P, Q of the large-argument expansion J0(x) = sqrt(2/(pi x)) (P cos(x - pi/4) - Q sin(x - pi/4))
    P = 1.0
    Q = 0.0
    b = 1.0
    for k in range(1, 80):
        nb = b * (2 * k - 1) * (2 * k - 1) / (8.0 * k * x)
        if nb > b:
            break
        b = nb
        if k % 2 == 0:
            P += b if (k // 2) % 2 == 0 else -b
        else:
            Q += b if ((k + 1) // 2) % 2 == 0 else -b
        if b < 1e-18:
            break
    return P, Q


@njit(cache=True)
def j0(x):
    if x <= SERIES_MAX:
        q = 0.25 * x * x
        term = 1.0
        s = 1.0
        for k in range(1, 40):
            term *= -q / (k * k)
            s += term
        return s
    if x <= TAYLOR_MAX:
        j = int((x - ANCHOR_LO) / ANCHOR_STEP + 0.5)
        j = min(max(j, 0), _J0_TABLE.shape[0] - 1)
        t = x - (ANCHOR_LO + ANCHOR_STEP * j)
        s = 0.0
        for n in range(_J0_TABLE.shape[1] - 1, -1, -1):
            s = s * t + _J0_TABLE[j, n]
        return s
    P, Q = hankel_pq(x)
    chi = x - 0.25 * math.pi
    return math.sqrt(2.0 / (math.pi * x)) * (P * math.cos(chi) - Q * math.sin(chi))


@njit(parallel=True, cache=True)
def j0_many(x):
    out = np.empty(x.shape[0], np.float64)
    for i in prange(x.shape[0]):
        out[i] = j0(x[i])
    return out


@njit(parallel=True, cache=True)
def j0_msums(a, N):
    # sum_{m=1}^{N_i} J0(a_i m) for each i
    out = np.empty(a.shape[0], np.float64)
    for i in prange(a.shape[0]):
        s = 0.0
        c = 0.0
        for m in range(1, N[i] + 1):
            # Kahan-compensated so the result does not depend on the thread split
            yv = j0(a[i] * m) - c
            t = s + yv
            c = (t - s) - yv
            s = t
        out[i] = s
    return out
