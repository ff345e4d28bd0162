"""Invariant suites run by ``hecke-murmur validate``; each check yields one report row."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

import numpy as np


@dataclass(frozen=True)
class CheckRow:
    identity: str
    params: str
    lhs: str
    rhs: str
    passed: bool


def _row(identity: str, params: str, lhs, rhs, passed: bool) -> CheckRow:
    return CheckRow(identity, params, str(lhs), str(rhs), bool(passed))


def suite_arith_core() -> Iterator[CheckRow]:
    from .arith_core import legendre_residue_sum, primes_between, sieve_mobius, zeta_real

    worst = 0
    for p in primes_between(3, 199).tolist():
        for a in range(1, p):
            worst = max(worst, abs(legendre_residue_sum(p, a) + 1))
    yield _row("legendre_residue_sum", "p<=199", f"max|S+1|={worst}", 0, worst == 0)
    n = int(primes_between(2, 10**6).size)
    yield _row("prime_count", "x=1e6", n, 78498, n == 78498)
    sf = int(sieve_mobius(1, 10**6).squarefree.sum())
    yield _row("squarefree_count", "x=1e6", sf, 607926, sf == 607926)
    z = zeta_real(2.0)
    yield _row("zeta_real", "s=2", repr(z), repr(math.pi**2 / 6), abs(z - math.pi**2 / 6) < 1e-13)


def suite_quadfield() -> Iterator[CheckRow]:
    from .quadfield import DiscriminantWindow, class_numbers, enumerate_family, norm_solutions

    D = enumerate_family(DiscriminantWindow(4, 20000))
    f, d = class_numbers(D, "forms"), class_numbers(D, "dirichlet")
    bad = int((f != d).sum())
    yield _row("class_number_forms_vs_dirichlet", "D<=20004", f"mismatches={bad}", 0, bad == 0)
    sol = norm_solutions(7, 11)
    ok = [(s.x, s.y) for s in sol] == [(4, 2)]
    yield _row("norm_equation", "D=7,p=11", [(s.x, s.y) for s in sol], [(4, 2)], ok)


def suite_localfactors() -> Iterator[CheckRow]:
    from .arith_core import primes_between
    from .localfactors import C_8n_p_bruteforce, C_8n_p_product, C_y_bruteforce, C_y_product, LocalSumSpec, c_y_identity_check

    bad = 0
    for p in primes_between(3, 97).tolist():
        for n in range(1, 51):
            bad += C_8n_p_bruteforce(n, p) != C_8n_p_product(n, p)
    yield _row("C_8n_p_product", "n<=50,p<=97", f"mismatches={bad}", 0, bad == 0)
    bad = total = 0
    for p in (3, 5, 7, 11, 13):
        for y in range(1, 13):
            if y % p == 0:
                continue
            for n in range(1, 9):
                for a in range(1, 7):
                    spec = LocalSumSpec(y, n, a, p)
                    total += 1
                    bad += C_y_bruteforce(spec) != C_y_product(spec)
    yield _row("C_y_product", f"y<=12,n<=8,a<=6 ({total} cases)", f"mismatches={bad}", 0, bad == 0)
    bad = 0
    for p in (3, 5, 7, 11, 13, 17):
        for y in range(1, 101):
            if y % p:
                bad += not c_y_identity_check(y, p).ok
    yield _row("c_y_identity", "y<=100,p<=17", f"mismatches={bad}", 0, bad == 0)


def suite_density() -> Iterator[CheckRow]:
    from .analytic import Q_d
    from .arith_core import divisors, eta_partial_sum
    from .density import DensityParams, constants, eta_y, kappa, vartheta

    bad1 = bad2 = 0
    for y in range(1, 1001):
        k = kappa(y)
        bad1 += vartheta(y) * eta_y(y) != k
        bad2 += sum((Q_d(d) for d in divisors(y)), Fraction(0)) != k
    yield _row("vartheta_eta_equals_kappa", "y<=1000", f"mismatches={bad1}", 0, bad1 == 0)
    yield _row("kappa_divisor_sum_of_Q", "y<=1000", f"mismatches={bad2}", 0, bad2 == 0)
    A = constants(DensityParams()).A
    Cs = [abs(eta_partial_sum(T) - 8 * A / 11) * T for T in (10**3, 10**4, 10**5)]
    ok = max(Cs) <= 2 * min(Cs)
    yield _row("eta_2m_tail_C", "T=1e3,1e4,1e5", ";".join(f"{c:.4g}" for c in Cs), "within x2", ok)


def suite_analytic() -> Iterator[CheckRow]:
    from .analytic import L_series_check, bessel_j0, bessel_j0_quadrature, density_bessel, euler_identities
    from .density import density_averaged, xi_grid

    rep = euler_identities(10**4)
    yield _row("euler_8_11", "M=1e4", repr(rep.lhs_8_11), "8/11", rep.residual_8_11 <= 1e-4)
    yield _row("euler_2_3", "M=1e4", repr(rep.lhs_2_3), "2/3", rep.residual_2_3 <= 1e-4)
    for s, tol in ((1.0, 1e-6), (2.0, 1e-8), (0.75, 1e-3)):
        r = L_series_check(s, 10**6)
        yield _row("L_series_closed_form", f"s={s},M=1e6", repr(r.direct), repr(r.closed), r.residual <= tol)
    xs = np.linspace(0.0, 40.0, 20)
    err = max(abs(bessel_j0(float(x)) - bessel_j0_quadrature(float(x))) for x in xs)
    yield _row("bessel_j0_vs_quadrature", "20 points in [0,40]", f"max_err={err:.3g}", "1e-10", err <= 1e-10)
    grid, _ = xi_grid(0.3, 8.0, 20, 0.05)
    worst = max(abs(density_bessel(float(x)).value - density_averaged(float(x)).M_total) for x in grid)
    yield _row("bessel_vs_direct_density", "20 points in [0.3,8]", f"max_diff={worst:.3g}", "1e-3", worst <= 1e-3)


def suite_empirical() -> Iterator[CheckRow]:
    from .empirical import empirical_point, equidistribution_check, sweep_arrays
    from .arith_core import primes_between
    from .quadfield import DiscriminantWindow

    pt = empirical_point(DiscriminantWindow(20, 10), 3)
    yield _row("G_hand_example", "X=20,Y=10,p=3", repr(pt.G), repr(-math.sqrt(3)), abs(pt.G + math.sqrt(3)) < 1e-15)
    W = DiscriminantWindow(2**12, 2**12)
    arr = sweep_arrays(W, primes_between(3, 3 * 2**12))
    worst = 0.0
    for i in range(arr.primes.size):
        q = arr.point(i)
        worst = max(worst, abs(q.G * q.G_denom - q.numerator()) / max(1.0, abs(q.numerator())))
    yield _row("decomposition_identity", "X=Y=4096", f"max_rel={worst:.3g}", "1e-9", worst <= 1e-9)
    rep = equidistribution_check(10**6, 10**5, 4)
    yield _row("equidistribution", "X=1e6,H=1e5,q=4", f"max_dev={rep.max_rel_deviation:.4f}", "0.05", rep.max_rel_deviation < 0.05)


SUITES: dict[str, Callable[[], Iterator[CheckRow]]] = {
    "arith_core": suite_arith_core,
    "quadfield": suite_quadfield,
    "localfactors": suite_localfactors,
    "density": suite_density,
    "analytic": suite_analytic,
    "empirical": suite_empirical,
}
