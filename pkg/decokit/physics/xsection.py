"""
Power-law microscopic cross-sections and their Maxwell-Boltzmann average

sigma_micro(v) = K v^alpha is averaged over the relative flux of a thermal
gas. The macroscopic cross-section has the closed form

    sigma_macro(v0) = K (2/sqrt(pi)) Gamma(alpha/2 + 2) (v_mp^(alpha+1) / v0)
                      * M(-(alpha/2 + 1/2), 3/2; -(v0/v_mp)^2)

and is cross-checked two ways: by quadrature of the reduced one-dimensional
integral and by Monte Carlo over sampled gas velocities.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple

import numpy as np
from pydantic import Field, field_validator

from decokit.errors import DomainError
from decokit.physics.base import PhysicsModel
from decokit.physics.constants import CONSTANTS, PhysicalConstants
from decokit.physics.gas import SAMPLE_BLOCK, GasState, mb_sample_range, most_probable_speed
from decokit.physics.quadrature import thermal_integral_quadrature
from decokit.physics.specfun import DEFAULT_CONFIG, SpecfunConfig, gamma, kummer_m

logger = logging.getLogger(__name__)

# Exponent of the van der Waals (-C6 / r^6) cross-section
VAN_DER_WAALS_ALPHA = -0.4

# Series orders beyond this are not offered
MAX_SERIES_ORDER = 10

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)


class PowerLawCrossSection(PhysicsModel):
    """sigma_micro(v) = prefactor_K * v ** exponent_alpha"""

    prefactor_K: float = Field(gt=0, allow_inf_nan=False)
    exponent_alpha: float = Field(gt=-4, allow_inf_nan=False)

    @property
    def singular_endpoint(self) -> bool:
        """True for -4 < alpha <= -3, where the reduced integrand is unbounded at 0"""
        return self.exponent_alpha <= -3.0

    def scaled(self, factor: float) -> "PowerLawCrossSection":
        return PowerLawCrossSection(prefactor_K=self.prefactor_K * factor, exponent_alpha=self.exponent_alpha)


class BeamState(PhysicsModel):
    """Test particle of mass M [kg] flying at speed v0 [m/s]"""

    test_mass: float = Field(gt=0, allow_inf_nan=False)
    speed_v0: float = Field(gt=0, allow_inf_nan=False)

    @property
    def momentum(self) -> float:
        """p0 = M v0 [kg m/s]"""
        return self.test_mass * self.speed_v0

    @classmethod
    def from_momentum(cls, test_mass: float, momentum: float) -> "BeamState":
        return cls(test_mass=test_mass, speed_v0=momentum / test_mass)


class MonteCarloEstimate(PhysicsModel):
    """Sample mean with its standard error"""

    mean: float
    std_error: float = Field(ge=0)
    samples: int = Field(ge=1)

    @field_validator("mean", "std_error")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("Monte-Carlo moments must be finite")
        return value


def k_from_c6(c6: float, constants: PhysicalConstants = CONSTANTS) -> PowerLawCrossSection:
    """
    Power law of the total cross-section in a -C6 / r^6 potential

    K = (3 pi^6 / 8)^(2/5) / (sin(pi/5) Gamma(2/5)) * (C6 / hbar)^(2/5), alpha = -2/5

    Args:
        c6: Van der Waals coefficient [J m^6], > 0
    """
    if not c6 > 0.0:
        raise DomainError(f"C6 must be positive, got {c6}")
    numerical = (3.0 * math.pi**6 / 8.0) ** 0.4 / (math.sin(math.pi / 5.0) * gamma(0.4))
    prefactor = numerical * (c6 / constants.reduced_planck) ** 0.4
    return PowerLawCrossSection(prefactor_K=prefactor, exponent_alpha=VAN_DER_WAALS_ALPHA)


def sigma_micro(pl: PowerLawCrossSection, v_rel: float) -> float:
    """K v_rel^alpha [m^2]"""
    if v_rel < 0.0 or (v_rel == 0.0 and pl.exponent_alpha < 0.0):
        raise DomainError(f"sigma_micro needs v_rel > 0 for alpha < 0, got {v_rel}")
    if v_rel == 0.0:
        return pl.prefactor_K if pl.exponent_alpha == 0.0 else 0.0
    return pl.prefactor_K * v_rel**pl.exponent_alpha


def _check_speeds(v0: float, vmp: float):
    if not (v0 > 0.0 and math.isfinite(v0)):
        raise DomainError(f"v0 must be positive and finite, got {v0}")
    if not (vmp > 0.0 and math.isfinite(vmp)):
        raise DomainError(f"v_mp must be positive and finite, got {vmp}")


def _leading_factor(pl: PowerLawCrossSection, v0: float, vmp: float) -> float:
    """K (2/sqrt(pi)) Gamma(alpha/2 + 2) v_mp^(alpha+1) / v0"""
    alpha = pl.exponent_alpha
    return pl.prefactor_K * _TWO_OVER_SQRT_PI * gamma(0.5 * alpha + 2.0) * vmp ** (alpha + 1.0) / v0


def _kummer_a(alpha: float) -> float:
    return -(0.5 * alpha + 0.5)


def sigma_macro_exact(
    pl: PowerLawCrossSection, v0: float, vmp: float, cfg: SpecfunConfig = DEFAULT_CONFIG
) -> float:
    """Exact thermally averaged cross-section [m^2]"""
    _check_speeds(v0, vmp)
    x = v0 / vmp
    return _leading_factor(pl, v0, vmp) * kummer_m(_kummer_a(pl.exponent_alpha), 1.5, -x * x, cfg)


def series_coefficients(alpha: float, order: int) -> List[float]:
    """
    Coefficients c_n of (v0/v_mp)^(2n), n = 0..order, in the small-velocity bracket

    c_0 = 1 and c_1 = (alpha + 1) / 3; for alpha = -2/5 this is 1 + x^2/5 + ...
    """
    if not 0 <= order <= MAX_SERIES_ORDER:
        raise DomainError(f"series order must lie in [0, {MAX_SERIES_ORDER}], got {order}")
    a = _kummer_a(alpha)
    coefficients = [1.0]
    for n in range(order):
        coefficients.append(coefficients[-1] * (a + n) * -1.0 / ((1.5 + n) * (n + 1)))
    return coefficients


def sigma_macro_series(pl: PowerLawCrossSection, v0: float, vmp: float, order: int) -> float:
    """Taylor truncation of the exact cross-section at (v0/v_mp)^(2 order) [m^2]"""
    _check_speeds(v0, vmp)
    x_sq = (v0 / vmp) ** 2
    bracket = 0.0
    for coefficient in reversed(series_coefficients(pl.exponent_alpha, order)):
        bracket = bracket * x_sq + coefficient
    return _leading_factor(pl, v0, vmp) * bracket


def sigma_macro_c6(c6: float, v0: float, vmp: float, order: int = 1,
                   constants: PhysicalConstants = CONSTANTS) -> float:
    """Small-velocity expansion of the van der Waals cross-section"""
    return sigma_macro_series(k_from_c6(c6, constants), v0, vmp, order)


def sigma_macro_quadrature(
    pl: PowerLawCrossSection,
    v0: float,
    vmp: float,
    abs_tol: float = 0.0,
    rel_tol: float = 1e-11,
) -> float:
    """
    Thermally averaged cross-section from adaptive quadrature of

        K (2/sqrt(pi)) (v_mp^(alpha+2) / v0^2) exp(-x^2) int t^(alpha+2) exp(-t^2) sinh(2 t x) dt

    with x = v0 / v_mp. `abs_tol` is in m^2.
    """
    _check_speeds(v0, vmp)
    if pl.singular_endpoint:
        logger.warning("alpha = %g: singular endpoint in the reduced integral", pl.exponent_alpha)
    alpha = pl.exponent_alpha
    scale = pl.prefactor_K * _TWO_OVER_SQRT_PI * vmp ** (alpha + 2.0) / (v0 * v0)
    integral = thermal_integral_quadrature(
        alpha + 2.0, v0 / vmp, abs_tol=abs_tol / scale, rel_tol=rel_tol
    )
    return scale * integral.value


def _block_moments(pl: PowerLawCrossSection, v0: float, gas: GasState, seed: int,
                   start: int, stop: int) -> Tuple[int, float, float]:
    """Count, mean and sum of squared deviations of K |v0 - u|^(alpha+1) / v0 on one range"""
    u = mb_sample_range(gas, seed, start, stop)
    relative = u.copy()
    relative[:, 2] -= v0
    speed = np.sqrt(np.einsum("ij,ij->i", relative, relative))
    # A draw exactly at u = v0 has probability zero; drop it if it ever happens
    speed = speed[speed > 0.0]
    values = pl.prefactor_K * speed ** (pl.exponent_alpha + 1.0) / v0
    mean = float(np.mean(values))
    return values.size, mean, float(np.sum((values - mean) ** 2))


def sigma_macro_montecarlo(
    pl: PowerLawCrossSection,
    v0: float,
    gas: GasState,
    samples: int,
    seed: int,
    workers: Optional[int] = None,
) -> MonteCarloEstimate:
    """
    Monte-Carlo average of K |v0 - u|^(alpha+1) / v0 over Maxwell-Boltzmann u

    The beam flies along +z. Sample blocks are combined in index order, so the
    estimate is identical for any number of worker threads.
    """
    if samples < 1000:
        raise DomainError(f"the Monte-Carlo estimate needs >= 1000 samples, got {samples}")
    if not v0 > 0.0:
        raise DomainError(f"v0 must be positive, got {v0}")

    ranges = [(start, min(start + SAMPLE_BLOCK, samples)) for start in range(0, samples, SAMPLE_BLOCK)]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            moments = list(pool.map(lambda r: _block_moments(pl, v0, gas, seed, *r), ranges))
    else:
        moments = [_block_moments(pl, v0, gas, seed, *r) for r in ranges]

    # Pairwise combination of block means and squared deviations
    count, mean, m2 = 0, 0.0, 0.0
    for n_b, mean_b, m2_b in moments:
        total = count + n_b
        delta = mean_b - mean
        mean += delta * n_b / total
        m2 += m2_b + delta * delta * count * n_b / total
        count = total

    std_error = math.sqrt(m2 / (count - 1) / count)
    logger.debug("Monte Carlo: %d draws, mean %.6g +- %.2g", count, mean, std_error)
    return MonteCarloEstimate(mean=mean, std_error=std_error, samples=count)
