"""Taylor coefficients of J0 around anchor points, shared by both kernel backends.

The plain power series loses up to 12 digits to cancellation near x = 12 and its
rounding noise is not smooth in x. Re-centring at anchors 0.5 apart keeps every
term small: J0(x0 + t) = sum_n C[j, n] t^n with |t| <= 1/4. The anchor values come
from the power series in 50-digit decimal arithmetic, the higher derivatives from
the Bessel equation differentiated n times:
    x y^(n+2) + (n+1) y^(n+1) + x y^(n) + n y^(n-1) = 0.
"""
from decimal import Decimal, localcontext

import numpy as np

SERIES_MAX = 2.25  # plain series below this (largest term about 1.3)
ANCHOR_LO = 2.5
ANCHOR_STEP = 0.5
ANCHOR_HI = 25.0
TAYLOR_MAX = ANCHOR_HI + ANCHOR_STEP / 2  # Hankel expansion beyond, accurate to about 1e-22
N_TERMS = 19


def _j0_j1(x: Decimal) -> tuple[Decimal, Decimal]:
    q = -(x * x) / 4
    t0 = Decimal(1)
    j0 = t0
    t1 = x / 2
    j1 = t1
    k = 1
    while abs(t0) > Decimal(10) ** -45 or abs(t1) > Decimal(10) ** -45 or k < 10:
        t0 = t0 * q / (k * k)
        t1 = t1 * q / (k * (k + 1))
        j0 += t0
        j1 += t1
        k += 1
    return j0, j1


def build_table() -> np.ndarray:
    anchors = np.arange(ANCHOR_LO, ANCHOR_HI + ANCHOR_STEP / 2, ANCHOR_STEP)
    table = np.empty((anchors.size, N_TERMS), dtype=np.float64)
    with localcontext() as ctx:
        ctx.prec = 50
        for j, a in enumerate(anchors.tolist()):
            x = Decimal(repr(a))
            j0, j1 = _j0_j1(x)
            d = [j0, -j1]
            for n in range(N_TERMS - 2):
                prev = d[n - 1] if n >= 1 else Decimal(0)
                d.append(-((n + 1) * d[n + 1] + x * d[n] + n * prev) / x)
            fact = Decimal(1)
            for n in range(N_TERMS):
                if n:
                    fact *= n
                table[j, n] = float(d[n] / fact)
    table.setflags(write=False)
    return table


TABLE = build_table()
