import math

import mpmath
import numpy as np
import pytest
from pydantic import ValidationError

from decokit.errors import DomainError
from decokit.physics.constants import CONSTANTS
from decokit.physics.gas import most_probable_speed
from decokit.physics.specfun import gamma, gr_integral_closed_form
from decokit.physics.xsection import (
    MAX_SERIES_ORDER,
    VAN_DER_WAALS_ALPHA,
    BeamState,
    PowerLawCrossSection,
    k_from_c6,
    series_coefficients,
    sigma_macro_c6,
    sigma_macro_exact,
    sigma_macro_montecarlo,
    sigma_macro_quadrature,
    sigma_macro_series,
    sigma_micro,
)

SQRT_PI = math.sqrt(math.pi)


def power_law(alpha, k=1.0):
    return PowerLawCrossSection(prefactor_K=k, exponent_alpha=alpha)


def test_power_law_invariants():
    with pytest.raises(ValidationError):
        power_law(0.0, k=0.0)
    with pytest.raises(ValidationError):
        power_law(-4.0)
    assert power_law(-3.5).singular_endpoint
    assert not power_law(-0.4).singular_endpoint


def test_beam_momentum_view():
    beam = BeamState(test_mass=2.0, speed_v0=150.0)
    assert beam.momentum == 300.0
    assert BeamState.from_momentum(2.0, 300.0) == beam
    with pytest.raises(ValidationError):
        BeamState(test_mass=1.0, speed_v0=0.0)


def test_k_from_c6_exponent_and_homogeneity():
    base = k_from_c6(1e-76)
    assert base.exponent_alpha == -0.4
    assert k_from_c6(32e-76).prefactor_K == pytest.approx(4.0 * base.prefactor_K, rel=1e-13)
    assert k_from_c6(7.3e-76).prefactor_K == pytest.approx(7.3**0.4 * base.prefactor_K, rel=1e-13)


def test_k_from_c6_numerical_constant():
    mpmath.mp.dps = 30
    constant = (mpmath.pi**6 * 3 / 8) ** mpmath.mpf("0.4") / (mpmath.sin(mpmath.pi / 5) * mpmath.gamma(mpmath.mpf("0.4")))
    pl = k_from_c6(CONSTANTS.reduced_planck)
    assert pl.prefactor_K == pytest.approx(float(constant), rel=1e-13)


def test_k_from_c6_domain():
    with pytest.raises(DomainError):
        k_from_c6(0.0)


def test_sigma_micro():
    pl = power_law(-0.4, k=3.0)
    assert sigma_micro(pl, 1.0) == 3.0
    assert sigma_micro(pl, 32.0) == pytest.approx(0.75, rel=1e-15)
    assert sigma_micro(power_law(0.0, k=2.0), 17.0) == 2.0
    assert sigma_micro(power_law(0.0, k=2.0), 0.0) == 2.0
    with pytest.raises(DomainError):
        sigma_micro(pl, 0.0)
    with pytest.raises(DomainError):
        sigma_micro(pl, -1.0)


def test_exact_alpha_one_at_unit_ratio():
    assert sigma_macro_exact(power_law(1.0, k=2.0), 350.0, 350.0) == pytest.approx(2.5 * 2.0 * 350.0, rel=1e-14)


def test_exact_alpha_one_second_moment():
    rng = np.random.default_rng(3)
    for v0, vmp in rng.uniform(0.1, 10.0, size=(20, 2)):
        v0, vmp = float(v0), float(vmp)
        expected = (v0 * v0 + 1.5 * vmp * vmp) / v0
        assert sigma_macro_exact(power_law(1.0), v0, vmp) == pytest.approx(expected, rel=1e-12)


def test_exact_alpha_three_fourth_moment():
    rng = np.random.default_rng(5)
    for v0, vmp in rng.uniform(0.1, 10.0, size=(20, 2)):
        v0, vmp = float(v0), float(vmp)
        expected = (v0**4 + 5.0 * v0**2 * vmp**2 + 3.75 * vmp**4) / v0
        assert sigma_macro_exact(power_law(3.0), v0, vmp) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("alpha", [-0.4, -1.0, 0.0, 1.0, 2.0])
@pytest.mark.parametrize("x", [0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0])
def test_exact_against_quadrature(alpha, x):
    pl = power_law(alpha)
    exact = sigma_macro_exact(pl, x, 1.0)
    assert sigma_macro_quadrature(pl, x, 1.0) == pytest.approx(exact, rel=1e-8)


def test_exact_against_quadrature_in_si_units(argon_vmp):
    pl = k_from_c6(1e-76)
    v0 = 0.5 * argon_vmp
    exact = sigma_macro_exact(pl, v0, argon_vmp)
    assert sigma_macro_quadrature(pl, v0, argon_vmp, abs_tol=1e-30, rel_tol=1e-11) == pytest.approx(exact, rel=1e-10)


def test_quadrature_at_large_exponent():
    pl = power_law(250.0)
    assert sigma_macro_quadrature(pl, 1.0, 1.0) == pytest.approx(sigma_macro_exact(pl, 1.0, 1.0), rel=1e-6)


def test_quadrature_singular_endpoint_is_flagged(caplog):
    with caplog.at_level("WARNING", logger="decokit.physics.xsection"):
        value = sigma_macro_quadrature(power_law(-3.5), 1.0, 1.0, rel_tol=1e-9)
    assert "singular endpoint" in caplog.text
    assert value == pytest.approx(sigma_macro_exact(power_law(-3.5), 1.0, 1.0), rel=1e-7)


def test_reduced_integral_matches_sinh_gaussian_identity():
    # the reduced integral is the sinh-Gaussian moment with mu = (alpha + 3) / 2 and g = 2x
    alpha, x = -0.4, 1.3
    pl = power_law(alpha)
    scale = 2.0 / SQRT_PI / (x * x)
    reduced = sigma_macro_quadrature(pl, x, 1.0) / scale
    moment = math.exp(-x * x) * gr_integral_closed_form((alpha + 3.0) / 2.0, 2.0 * x)
    assert reduced == pytest.approx(moment, rel=1e-8)


def test_exact_against_mpmath():
    alpha, x = -0.4, 0.5
    expected = (2 / mpmath.sqrt(mpmath.pi)) * mpmath.gamma(alpha / 2 + 2) / x * mpmath.hyp1f1(-(alpha / 2 + 0.5), 1.5, -x * x)
    assert sigma_macro_exact(power_law(alpha), x, 1.0) == pytest.approx(float(expected), rel=1e-12)


def test_series_coefficients():
    coefficients = series_coefficients(VAN_DER_WAALS_ALPHA, 2)
    assert coefficients[0] == 1.0
    assert coefficients[1] == pytest.approx(0.2, abs=1e-12)
    assert coefficients[2] == pytest.approx(-0.028, rel=1e-12)
    assert series_coefficients(1.0, 1)[1] == pytest.approx(2.0 / 3.0)
    with pytest.raises(DomainError):
        series_coefficients(-0.4, MAX_SERIES_ORDER + 1)


def test_series_order_zero_is_leading_term():
    pl = power_law(VAN_DER_WAALS_ALPHA)
    v0, vmp = 2.0, 7.0
    expected = 2.0 / SQRT_PI * gamma(1.8) * vmp**0.6 / v0
    assert sigma_macro_series(pl, v0, vmp, 0) == pytest.approx(expected, rel=1e-14)


def test_series_approaches_exact_at_small_x():
    pl = power_law(VAN_DER_WAALS_ALPHA)
    assert sigma_macro_series(pl, 1e-3, 1.0, 1) / sigma_macro_exact(pl, 1e-3, 1.0) == pytest.approx(1.0, abs=1e-6)


def test_series_residual_scales_as_x_to_the_fourth():
    pl = power_law(VAN_DER_WAALS_ALPHA)

    def residual(x):
        exact = sigma_macro_exact(pl, x, 1.0)
        return abs(sigma_macro_series(pl, x, 1.0, 1) - exact) / exact

    assert 0.9e4 <= residual(1e-2) / residual(1e-3) <= 1.1e4


def test_higher_series_orders_converge():
    pl = power_law(VAN_DER_WAALS_ALPHA)
    exact = sigma_macro_exact(pl, 0.5, 1.0)
    errors = [abs(sigma_macro_series(pl, 0.5, 1.0, n) - exact) for n in range(5)]
    assert all(later < earlier for earlier, later in zip(errors, errors[1:]))


def test_small_x_limit():
    expected = 2.0 / SQRT_PI * gamma(1.8)
    assert 1e-4 * sigma_macro_exact(power_law(VAN_DER_WAALS_ALPHA), 1e-4, 1.0) == pytest.approx(expected, rel=1e-7)


@pytest.mark.parametrize("alpha", [-0.4, 0.0, 1.0])
def test_large_x_asymptote(alpha):
    ratio = sigma_macro_exact(power_law(alpha), 50.0, 1.0) / 50.0**alpha
    assert 0.99 <= ratio <= 1.01


def test_thermal_enhancement_for_slow_beams():
    pl = power_law(VAN_DER_WAALS_ALPHA)
    for x in (0.05, 0.3, 0.9):
        assert sigma_macro_exact(pl, x, 1.0) > sigma_micro(pl, x)


def test_sigma_macro_c6_matches_series():
    pl = k_from_c6(2e-76)
    assert sigma_macro_c6(2e-76, 40.0, 350.0) == pytest.approx(sigma_macro_series(pl, 40.0, 350.0, 1))


def test_exact_rejects_bad_speeds():
    with pytest.raises(DomainError):
        sigma_macro_exact(power_law(0.0), 0.0, 1.0)
    with pytest.raises(DomainError):
        sigma_macro_exact(power_law(0.0), 1.0, -1.0)


def test_montecarlo_constant_cross_section_at_large_x(argon, argon_vmp):
    estimate = sigma_macro_montecarlo(power_law(0.0, k=2.0), 50.0 * argon_vmp, argon, 100_000, seed=1)
    assert abs(estimate.mean - sigma_macro_exact(power_law(0.0, k=2.0), 50.0 * argon_vmp, argon_vmp)) < 4.0 * estimate.std_error


def test_montecarlo_second_moment(argon, argon_vmp):
    v0 = 0.7 * argon_vmp
    estimate = sigma_macro_montecarlo(power_law(1.0), v0, argon, 200_000, seed=2)
    expected = (v0 * v0 + 1.5 * argon_vmp**2) / v0
    assert abs(estimate.mean - expected) < 4.0 * estimate.std_error


def test_montecarlo_is_independent_of_worker_count(argon, argon_vmp):
    pl = power_law(VAN_DER_WAALS_ALPHA)
    serial = sigma_macro_montecarlo(pl, argon_vmp, argon, 150_000, seed=9)
    threaded = sigma_macro_montecarlo(pl, argon_vmp, argon, 150_000, seed=9, workers=3)
    assert serial == threaded
    assert serial.samples == 150_000


def test_montecarlo_needs_enough_samples(argon):
    with pytest.raises(DomainError):
        sigma_macro_montecarlo(power_law(0.0), 1.0, argon, 999, seed=1)


@pytest.mark.slow
@pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
def test_montecarlo_against_exact(argon, argon_vmp, x):
    pl = power_law(VAN_DER_WAALS_ALPHA)
    v0 = x * argon_vmp
    estimate = sigma_macro_montecarlo(pl, v0, argon, 1_000_000, seed=20050617)
    assert abs(estimate.mean - sigma_macro_exact(pl, v0, argon_vmp)) < 4.0 * estimate.std_error


@pytest.mark.slow
def test_quadrature_against_montecarlo_constant_cross_section(argon, argon_vmp):
    pl = power_law(0.0)
    quadrature = sigma_macro_quadrature(pl, argon_vmp, argon_vmp)
    estimate = sigma_macro_montecarlo(pl, argon_vmp, argon, 1_000_000, seed=7)
    assert abs(quadrature - estimate.mean) < 4.0 * estimate.std_error
