import math
import warnings
from fractions import Fraction

import numpy as np
import pytest

from hecke_murmur import analytic as an
from hecke_murmur.density import DensityParams, constants, density_averaged, xi_grid
from hecke_murmur.errors import ExclusionZoneError, QuadratureError
from oracles import j0_trapezoid

INDICATOR = an.WeightFunction("indicator_1_2")
BUMP = an.WeightFunction("smooth_bump")


def test_Q_d_examples():
    assert an.Q_d(1) == 1
    assert an.Q_d(2) == 1
    assert an.Q_d(3) == Fraction(9, 61)
    assert an.Q_d(4) == 0 and an.Q_d(18) == 0
    with pytest.raises(ValueError):
        an.Q_d(0)


def test_Q_d_multiplicative():
    sf = [d for d in range(1, 1001) if an.Q_d(d) != 0]
    for a in sf[:60]:
        for b in sf:
            if a * b <= 1000 and math.gcd(a, b) == 1:
                assert an.Q_d(a * b) == an.Q_d(a) * an.Q_d(b)


def test_Q_array_matches_exact():
    Q = an.Q_array(3000)
    for d in range(1, 3001):
        assert Q[d] == pytest.approx(float(an.Q_d(d)), rel=1e-14, abs=0)
    assert not Q.flags.writeable


def test_bessel_j0_examples():
    assert an.bessel_j0(0.0) == 1.0
    assert abs(an.bessel_j0(2.404825557695773)) <= 1e-9
    assert an.bessel_j0(10.0) == pytest.approx(an.bessel_j0_quadrature(10.0), abs=1e-9)
    with pytest.raises(ValueError):
        an.bessel_j0(-1.0)


def test_bessel_j0_against_independent_quadrature():
    xs = np.linspace(0.0, 40.0, 20)
    for x in xs:
        assert abs(an.bessel_j0(float(x)) - j0_trapezoid(float(x))) <= 1e-10
        assert abs(an.bessel_j0(float(x)) - an.bessel_j0_quadrature(float(x))) <= 1e-10


def test_bessel_j0_against_scipy():
    special = pytest.importorskip("scipy.special")
    x = np.concatenate([np.linspace(0, 30, 3001), np.geomspace(30, 1e6, 2000)])
    assert np.max(np.abs(an.bessel_j0(x) - special.j0(x))) <= 1e-10


def test_bessel_j0_ode_residual():
    h = 1e-4
    for x in np.linspace(0.5, 50.0, 100):
        f0, fp, fm = an.bessel_j0(x), an.bessel_j0(x + h), an.bessel_j0(x - h)
        d1 = (fp - fm) / (2 * h)
        d2 = (fp - 2 * f0 + fm) / (h * h)
        assert abs(x * d2 + d1 + x * f0) <= 1e-6


def test_bessel_series_params_validation():
    with pytest.raises(ValueError):
        an.BesselSeriesParams(d_max=5)
    with pytest.raises(ValueError):
        an.BesselSeriesParams(acceleration="magic")


@pytest.mark.parametrize("Xi", [0.5, 2.0, 5.3])
def test_density_bessel_examples(Xi):
    b = an.density_bessel(Xi)
    assert abs(b.value - density_averaged(Xi).M_total) <= 1e-3
    assert b.trunc_estimate >= 0


def test_density_bessel_grid():
    grid, _ = xi_grid(0.3, 8.0, 20, 0.05)
    for Xi in grid:
        b = an.density_bessel(float(Xi))
        assert abs(b.value - density_averaged(float(Xi)).M_total) <= max(1e-3, b.trunc_estimate)


def test_density_bessel_constant_term():
    consts = constants(DensityParams())
    assert an.bessel_assemble(3.7, np.zeros(50), consts) == -0.5


def test_density_bessel_accelerations_differ_in_quality():
    Xi = 2.0
    exact = density_averaged(Xi).M_total
    raw = an.density_bessel(Xi, an.BesselSeriesParams(acceleration="none"))
    ces = an.density_bessel(Xi, an.BesselSeriesParams(acceleration="cesaro"))
    tail = an.density_bessel(Xi)
    assert abs(tail.value - exact) < abs(raw.value - exact)
    assert abs(tail.value - exact) <= 1e-6
    assert abs(ces.value - exact) <= 1e-2


def test_density_bessel_errors():
    with pytest.raises(ExclusionZoneError):
        an.density_bessel(1.0)
    with pytest.raises(ValueError):
        an.density_bessel(-1.0)


def test_euler_identities_examples():
    r = an.euler_identities(10**4)
    assert r.residual_8_11 <= 1e-4 and r.residual_2_3 <= 1e-4
    with pytest.raises(ValueError):
        an.euler_identities(100)


def test_euler_identity_residuals_shrink_with_M():
    r = [an.euler_identities(M) for M in (2000, 4000, 8000, 16000)]
    assert all(a.residual_8_11 > b.residual_8_11 for a, b in zip(r, r[1:]))
    assert all(a.residual_2_3 > b.residual_2_3 for a, b in zip(r, r[1:]))


def test_euler_identities_matched_at_1e6():
    r = an.euler_identities(10**6)
    assert r.residual_8_11 <= 1e-6
    assert r.residual_2_3 <= 1e-6


def test_L_series_check_examples():
    assert an.L_series_check(1.0, 10**6).residual <= 1e-6
    assert an.L_series_check(2.0, 10**6).residual <= 1e-8
    assert an.L_series_check(0.75, 10**6).residual <= 1e-3
    with pytest.raises(ValueError):
        an.L_series_check(0.5, 1000)


def test_L_closed_form_consistent_with_two_thirds_identity():
    consts = constants(DensityParams())
    assert consts.zeta2 * consts.cbar * an.L_closed_form(1.0) == pytest.approx(2 / 3, abs=1e-8)
    assert consts.zeta2 * consts.cbar / consts.A * an.L_closed_form(0.0) == pytest.approx(8 / 11, abs=1e-8)


def test_weight_function_shape():
    u = np.linspace(0, 3, 301)
    ind = INDICATOR(u)
    assert set(np.unique(ind)) == {0.0, 1.0}
    bump = BUMP(u)
    assert (bump >= 0).all() and bump[(u <= 1) | (u >= 2)].max() == 0
    assert BUMP(np.array([1.5]))[0] == pytest.approx(math.exp(-1))
    with pytest.raises(ValueError):
        an.WeightFunction("indicator_1_2", support=(1.0, 3.0))
    with pytest.raises(ValueError):
        an.WeightFunction("triangle")


def test_murmuration_fn_at_zero():
    assert an.murmuration_fn(0.0, INDICATOR).value == 0.0


def test_murmuration_fn_small_xi_is_minus_term_only():
    # for Xi < 1/4 every M(Xi/u) is -c sqrt(Xi/u), so the weighted integral has a closed form
    consts = constants(DensityParams())
    Xi = 0.1
    num = -consts.minus_coeff * math.sqrt(Xi) * (2 - 1)
    den = (2 / 3) * (2**1.5 - 1)
    assert an.murmuration_fn(Xi, INDICATOR).value == pytest.approx(num / den, rel=1e-10)


def test_murmuration_fn_against_scipy_quad():
    integrate = pytest.importorskip("scipy.integrate")
    consts = constants(DensityParams())
    for weight in (INDICATOR, BUMP):
        for Xi in (0.7, 1.5, 3.3):
            f = lambda u: density_averaged(Xi / u, DensityParams(exclusion=1e-9), consts).M_total * weight(np.array([u]))[0] * math.sqrt(u)
            pts = sorted(Xi / (y * y / 4) for y in range(1, 8) if 1 < Xi / (y * y / 4) < 2)
            num = integrate.quad(f, 1, 2, points=pts or None, limit=400, epsabs=1e-12)[0]
            den = integrate.quad(lambda u: weight(np.array([u]))[0] * math.sqrt(u), 1, 2, limit=400, epsabs=1e-13)[0]
            assert an.murmuration_fn(Xi, weight).value == pytest.approx(num / den, abs=1e-6)


def test_murmuration_fn_error_is_reported():
    r = an.murmuration_fn(2.7, INDICATOR, rel_tol=1e-10)
    assert 0 <= r.quad_error <= 1e-4 * max(1.0, abs(r.value))


def test_murmuration_fn_nonconvergence_names_interval():
    with pytest.raises(QuadratureError) as info:
        an.murmuration_fn(1.3, INDICATOR, rel_tol=1e-300, max_depth=3)
    assert info.value.lo < info.value.hi


def test_indicator_and_bump_close_at_1_5():
    a = an.murmuration_fn(1.5, INDICATOR).value
    b = an.murmuration_fn(1.5, BUMP).value
    assert math.isfinite(a) and math.isfinite(b)
    assert abs(a - b) <= 0.2


def test_murmuration_fn_near_minus_half_at_1e4():
    fit = np.geomspace(1e2, 1e3, 11)
    C = max(abs(an.murmuration_fn(float(x), INDICATOR).value + 0.5) * math.sqrt(x) for x in fit)
    r = an.murmuration_fn(1e4, INDICATOR)
    assert abs(r.value + 0.5) <= C / math.sqrt(1e4)


def test_murmuration_fn_tends_to_minus_half():
    for w in (INDICATOR, BUMP):
        devs = [abs(an.murmuration_fn(x, w).value + 0.5) for x in (1e2, 1e4, 1e6)]
        assert devs[-1] < 0.1


def _sign_changes(weight, grid):
    vals = np.array([an.murmuration_fn(float(x), weight).value for x in grid])
    roots = []
    for i in np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:])):
        lo, hi = float(grid[i]), float(grid[i + 1])
        flo = vals[i]
        for _ in range(30):
            mid = 0.5 * (lo + hi)
            fm = an.murmuration_fn(mid, weight).value
            if np.sign(fm) == np.sign(flo):
                lo, flo = mid, fm
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    return roots


def test_sign_changes_stable_under_node_doubling():
    grid = np.linspace(0.3, 8.0, 155)
    base = _sign_changes(INDICATOR, grid)
    fine = _sign_changes(INDICATOR.with_nodes(2 * INDICATOR.nodes), grid)
    assert len(base) == len(fine) >= 3
    assert max(abs(a - b) for a, b in zip(base, fine)) <= 0.1


def test_asymptote_report_validation():
    with pytest.raises(ValueError):
        an.asymptote_report(INDICATOR, [100, 1000])
    with pytest.raises(ValueError):
        an.asymptote_report(INDICATOR, [50, 1e4])


def test_asymptote_report_drops_synthetic_constant():
    const = lambda xi: np.full_like(np.asarray(xi, dtype=np.float64), -0.5)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rep = an.asymptote_report(INDICATOR, [1e2, 1e3, 1e4], density=const)
    assert sorted(rep.dropped) == [1e2, 1e3, 1e4]
    assert math.isnan(rep.slope)
    assert any(issubclass(w.category, RuntimeWarning) for w in caught)


def test_asymptote_report_recovers_synthetic_power_law():
    # M(xi) = -1/2 + xi^(-1/2) integrates to -1/2 + k Xi^(-1/2), so the slope is exactly -1/2
    power = lambda xi: -0.5 + np.asarray(xi, dtype=np.float64) ** -0.5
    rep = an.asymptote_report(INDICATOR, [1e2, 1e3, 1e4], density=power)
    assert rep.slope == pytest.approx(-0.5, abs=1e-6)


@pytest.mark.parametrize("weight", [INDICATOR, BUMP], ids=["indicator", "smooth_bump"])
def test_asymptote_report_three_point_grid(weight):
    rep = an.asymptote_report(weight, [1e2, 1e3, 1e4])
    assert -0.6 <= rep.slope <= -0.4
