"""
Oracle cross-check suite behind the `validate` command
"""

import logging
import math
from typing import Callable, Dict, List

import numpy as np
from pydantic import BaseModel, Field

from decokit.errors import DecokitError
from decokit.physics.constants import CONSTANTS, amu_to_kg, mbar_to_pascal
from decokit.physics.decoherence import (
    DensityMatrix,
    ScanConfig,
    decoherence_function,
    evolve_density_matrix,
    kernel_gaussian,
    offdiagonal_lobe_norm,
    visibility_pressure_scan,
)
from decokit.physics.gas import (
    GasState,
    mb_sample,
    mb_sample_range,
    mb_speed_cdf,
    most_probable_speed,
)
from decokit.physics.quadrature import gr_integral_quadrature
from decokit.physics.specfun import gamma, gr_integral_closed_form, kummer_m
from decokit.physics.xsection import (
    VAN_DER_WAALS_ALPHA,
    BeamState,
    PowerLawCrossSection,
    k_from_c6,
    series_coefficients,
    sigma_macro_exact,
    sigma_macro_montecarlo,
    sigma_macro_quadrature,
    sigma_macro_series,
)

logger = logging.getLogger(__name__)

# Reference system: C70 fullerenes in an argon background at room temperature
ARGON_MASS_AMU = 39.948
C70_MASS_AMU = 840.77
REFERENCE_TEMPERATURE = 300.0
REFERENCE_C6 = 1.0e-76

QUADRATURE_ALPHAS = (VAN_DER_WAALS_ALPHA, -1.0, 0.0, 1.0, 2.0)
QUADRATURE_RATIOS = (0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0)
MONTECARLO_RATIOS = (0.5, 1.0, 2.0)
GR_MUS = (0.8, 1.0, 1.3, 2.0)
GR_GAMMAS = (0.5, 2.0, 5.0)


class Check(BaseModel):
    """Definition of one cross-check"""

    name: str
    description: str
    tolerance: float = Field(ge=0)


class CheckResult(BaseModel):
    name: str
    description: str
    max_error: float
    tolerance: float
    passed: bool


def _relative(value: float, reference: float) -> float:
    return abs(value - reference) / abs(reference)


class ValidationSuite:
    """
    Runs every closed-form result against its independent oracle

    Args:
        seed: Seed of the Monte-Carlo and random-argument checks
        samples: Draws per Monte-Carlo estimate
        perturb_k: Relative change applied to K on the closed-form side only;
            a nonzero value must make the cross-section checks fail
    """

    def __init__(self, seed: int, samples: int, perturb_k: float = 0.0):
        self.seed = seed
        self.samples = samples
        self.perturb_k = perturb_k
        self.gas = GasState(
            temperature=REFERENCE_TEMPERATURE, particle_mass=amu_to_kg(ARGON_MASS_AMU)
        )
        self.vmp = most_probable_speed(self.gas)

        self._handlers: Dict[str, Callable[[], float]] = {
            "gamma_recurrence": self.check_gamma_recurrence,
            "kummer_transformation": self.check_kummer_transformation,
            "kummer_terminating": self.check_kummer_terminating,
            "gr_identity": self.check_gr_identity,
            "closed_vs_quadrature": self.check_closed_vs_quadrature,
            "closed_vs_montecarlo": self.check_closed_vs_montecarlo,
            "polynomial_exactness": self.check_polynomial_exactness,
            "series_coefficient": self.check_series_coefficient,
            "series_residual_scaling": self.check_series_residual_scaling,
            "series_small_x": self.check_series_small_x,
            "large_x_asymptote": self.check_large_x_asymptote,
            "c6_homogeneity": self.check_c6_homogeneity,
            "decoherence_function_limits": self.check_decoherence_function_limits,
            "gaussian_kernel_oracle": self.check_gaussian_kernel_oracle,
            "density_matrix_invariants": self.check_density_matrix_invariants,
            "offdiagonal_decay": self.check_offdiagonal_decay,
            "visibility_linearity": self.check_visibility_linearity,
            "p_half_bracketing": self.check_p_half_bracketing,
            "mb_moments": self.check_mb_moments,
            "mb_speed_ks": self.check_mb_speed_ks,
            "determinism": self.check_determinism,
        }

    @staticmethod
    def get_check_definitions() -> List[Check]:
        """Return the definitions of all checks, in report order"""
        return [
            Check(name="gamma_recurrence", tolerance=1e-12,
                  description="gamma(x + 1) = x gamma(x), 100 random x in [0.1, 20]"),
            Check(name="kummer_transformation", tolerance=1e-9,
                  description="M(a, b; z) = exp(z) M(b - a, b; -z), |z| <= 20"),
            Check(name="kummer_terminating", tolerance=1e-14,
                  description="M(-n, b; z) against direct polynomial evaluation"),
            Check(name="gr_identity", tolerance=1e-8,
                  description="sinh-Gaussian moment closed form against quadrature"),
            Check(name="closed_vs_quadrature", tolerance=1e-8,
                  description="exact sigma_macro against the reduced 1-D integral"),
            Check(name="closed_vs_montecarlo", tolerance=4.0,
                  description="exact sigma_macro against Monte Carlo, in standard errors"),
            Check(name="polynomial_exactness", tolerance=1e-12,
                  description="alpha = 1 and 3 against the MB moments of |v0 - u|"),
            Check(name="series_coefficient", tolerance=1e-12,
                  description="first series coefficient for alpha = -2/5 is 1/5"),
            Check(name="series_residual_scaling", tolerance=0.1,
                  description="order-1 residual shrinks 1e4-fold from x = 1e-2 to 1e-3"),
            Check(name="series_small_x", tolerance=1e-7,
                  description="series/exact at x = 1e-3 and the x -> 0 limit at x = 1e-4"),
            Check(name="large_x_asymptote", tolerance=1e-2,
                  description="sigma_macro / (K v0^alpha) -> 1 at x = 50"),
            Check(name="c6_homogeneity", tolerance=1e-13,
                  description="K(32 C6) = 4 K(C6)"),
            Check(name="decoherence_function_limits", tolerance=1e-3,
                  description="F(0) = 0 and F -> Gamma at 1e3 hbar / q_width"),
            Check(name="gaussian_kernel_oracle", tolerance=1e-6,
                  description="Gaussian-kernel F against its characteristic function"),
            Check(name="density_matrix_invariants", tolerance=1e-12,
                  description="trace, hermiticity, diagonal and semigroup under evolution"),
            Check(name="offdiagonal_decay", tolerance=1e-3,
                  description="far off-diagonal lobe decays as exp(-Gamma t)"),
            Check(name="visibility_linearity", tolerance=1e-12,
                  description="ln(V / V0) linear in pressure"),
            Check(name="p_half_bracketing", tolerance=1e-12,
                  description="p_half brackets the scan and halves with doubled flight time"),
            Check(name="mb_moments", tolerance=5.0,
                  description="sampled <|u|^2> and <u_i> in standard errors"),
            Check(name="mb_speed_ks", tolerance=2.0,
                  description="sqrt(n) times the KS distance of sampled speeds to the MB speed CDF"),
            Check(name="determinism", tolerance=0.0,
                  description="repeated, split and threaded sampling reproduce bit-exactly"),
        ]

    def _execute_check(self, check: Check) -> CheckResult:
        try:
            max_error = float(self._handlers[check.name]())
        except DecokitError as e:
            logger.error("check %s raised %s: %s", check.name, type(e).__name__, e)
            max_error = math.inf
        passed = math.isfinite(max_error) and max_error <= check.tolerance
        logger.info("%s: max error %.3e (%s)", check.name, max_error, "pass" if passed else "FAIL")
        return CheckResult(
            name=check.name,
            description=check.description,
            max_error=max_error,
            tolerance=check.tolerance,
            passed=passed,
        )

    def run(self) -> List[CheckResult]:
        return [self._execute_check(check) for check in self.get_check_definitions()]

    def _closed_side(self, pl: PowerLawCrossSection) -> PowerLawCrossSection:
        return pl.scaled(1.0 + self.perturb_k) if self.perturb_k else pl

    def _rng(self, stream: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, stream])

    # specfun

    def check_gamma_recurrence(self) -> float:
        xs = self._rng(1).uniform(0.1, 20.0, size=100)
        return max(_relative(x * gamma(x), gamma(x + 1.0)) for x in map(float, xs))

    def check_kummer_transformation(self) -> float:
        rng = self._rng(2)
        worst = 0.0
        for a, b, z in zip(rng.uniform(-2.5, 3.0, 50), rng.uniform(0.6, 5.0, 50), rng.uniform(-20.0, 20.0, 50)):
            a, b, z = float(a), float(b), float(z)
            direct = kummer_m(a, b, z)
            transformed = math.exp(z) * kummer_m(b - a, b, -z)
            worst = max(worst, _relative(transformed, direct))
        return worst

    def check_kummer_terminating(self) -> float:
        rng = self._rng(3)
        worst = 0.0
        for degree in range(4):
            for b, z in zip(rng.uniform(0.6, 5.0, 10), rng.uniform(-10.0, -0.1, 10)):
                b, z = float(b), float(z)
                # Pochhammer products written out term by term
                reference = 0.0
                for k in range(degree + 1):
                    rising_a = math.prod(-degree + j for j in range(k))
                    rising_b = math.prod(b + j for j in range(k))
                    reference += rising_a / rising_b * z**k / math.factorial(k)
                worst = max(worst, _relative(kummer_m(-float(degree), b, z), reference))
        return worst

    def check_gr_identity(self) -> float:
        return max(
            _relative(gr_integral_closed_form(mu, g), gr_integral_quadrature(mu, g))
            for mu in GR_MUS
            for g in GR_GAMMAS
        )

    # xsection

    def check_closed_vs_quadrature(self) -> float:
        worst = 0.0
        for alpha in QUADRATURE_ALPHAS:
            pl = PowerLawCrossSection(prefactor_K=1.0, exponent_alpha=alpha)
            for x in QUADRATURE_RATIOS:
                exact = sigma_macro_exact(self._closed_side(pl), x, 1.0)
                worst = max(worst, _relative(sigma_macro_quadrature(pl, x, 1.0), exact))
        return worst

    def check_closed_vs_montecarlo(self) -> float:
        pl = PowerLawCrossSection(prefactor_K=1.0, exponent_alpha=VAN_DER_WAALS_ALPHA)
        worst = 0.0
        for x in MONTECARLO_RATIOS:
            v0 = x * self.vmp
            exact = sigma_macro_exact(self._closed_side(pl), v0, self.vmp)
            estimate = sigma_macro_montecarlo(pl, v0, self.gas, self.samples, self.seed)
            worst = max(worst, abs(estimate.mean - exact) / estimate.std_error)
        return worst

    def check_polynomial_exactness(self) -> float:
        rng = self._rng(4)
        pairs = rng.uniform(0.1, 10.0, size=(20, 2))
        worst = 0.0
        for alpha, moment in (
            (1.0, lambda v, w: v * v + 1.5 * w * w),
            (3.0, lambda v, w: v**4 + 5.0 * v * v * w * w + 3.75 * w**4),
        ):
            pl = self._closed_side(PowerLawCrossSection(prefactor_K=1.0, exponent_alpha=alpha))
            for v0, vmp in map(tuple, pairs):
                worst = max(worst, _relative(v0 * sigma_macro_exact(pl, v0, vmp), moment(v0, vmp)))
        return worst

    def check_series_coefficient(self) -> float:
        return abs(series_coefficients(VAN_DER_WAALS_ALPHA, 1)[1] - 0.2)

    def check_series_residual_scaling(self) -> float:
        pl = PowerLawCrossSection(prefactor_K=1.0, exponent_alpha=VAN_DER_WAALS_ALPHA)

        def residual(x: float) -> float:
            exact = sigma_macro_exact(pl, x, 1.0)
            return abs(sigma_macro_series(pl, x, 1.0, 1) - exact) / exact

        return abs(residual(1e-2) / residual(1e-3) / 1e4 - 1.0)

    def check_series_small_x(self) -> float:
        pl = PowerLawCrossSection(prefactor_K=1.0, exponent_alpha=VAN_DER_WAALS_ALPHA)
        closed = self._closed_side(pl)
        ratio_error = _relative(sigma_macro_series(pl, 1e-3, 1.0, 1), sigma_macro_exact(closed, 1e-3, 1.0))
        limit = 2.0 / math.sqrt(math.pi) * gamma(0.5 * VAN_DER_WAALS_ALPHA + 2.0)
        limit_error = _relative(1e-4 * sigma_macro_exact(closed, 1e-4, 1.0), limit)
        return max(ratio_error, limit_error)

    def check_large_x_asymptote(self) -> float:
        worst = 0.0
        for alpha in (VAN_DER_WAALS_ALPHA, 0.0, 1.0):
            pl = PowerLawCrossSection(prefactor_K=1.0, exponent_alpha=alpha)
            worst = max(worst, abs(sigma_macro_exact(pl, 50.0, 1.0) / 50.0**alpha - 1.0))
        return worst

    def check_c6_homogeneity(self) -> float:
        return _relative(k_from_c6(32.0 * REFERENCE_C6).prefactor_K, 4.0 * k_from_c6(REFERENCE_C6).prefactor_K)

    # decoherence

    @staticmethod
    def _gaussian_oracle(gamma_total: float, q_width: float, delta: np.ndarray) -> np.ndarray:
        hbar = CONSTANTS.reduced_planck
        return gamma_total * -np.expm1(-0.5 * (q_width * delta / hbar) ** 2)

    def check_decoherence_function_limits(self) -> float:
        q_width = 1e-24
        kernel = kernel_gaussian(1.0, q_width, 2048)
        at_zero = abs(decoherence_function(kernel, 0.0))
        far = decoherence_function(kernel, 1e3 * CONSTANTS.reduced_planck / q_width)
        return max(at_zero, abs(far - 1.0))

    def check_gaussian_kernel_oracle(self) -> float:
        q_width = 1e-24
        deltas = np.array([0.1, 1.0, 10.0]) * CONSTANTS.reduced_planck / q_width
        oracle = self._gaussian_oracle(1.0, q_width, deltas)
        coarse = decoherence_function(kernel_gaussian(1.0, q_width, 64), deltas)
        fine = decoherence_function(kernel_gaussian(1.0, q_width, 1024), deltas)
        return float(max(np.max(np.abs(fine - oracle)), np.max(np.abs(coarse - fine))))

    def _two_packet_state(self):
        """Two packets 100 hbar/q_width apart, each 2 hbar/q_width wide"""
        q_width = 1e-24
        length = CONSTANTS.reduced_planck / q_width
        x = np.linspace(-80.0 * length, 80.0 * length, 321)
        rho = DensityMatrix.gaussian_superposition(x, [-50.0 * length, 50.0 * length], 2.0 * length)
        return rho, kernel_gaussian(1.0, q_width, 2048), length

    def check_density_matrix_invariants(self) -> float:
        rho0, kernel, _ = self._two_packet_state()
        scale = float(np.max(np.abs(rho0.values)))
        t1, t2 = 0.4, 1.1
        once = evolve_density_matrix(rho0, kernel, t1 + t2)
        twice = evolve_density_matrix(evolve_density_matrix(rho0, kernel, t1), kernel, t2)
        errors = [
            abs(once.trace - 1.0),
            float(np.max(np.abs(once.values - once.values.conj().T))) / scale,
            float(np.max(np.abs(np.diag(once.values) - np.diag(rho0.values)))) / scale,
            float(np.max(np.abs(once.values - twice.values))) / scale,
        ]
        return max(errors)

    def check_offdiagonal_decay(self) -> float:
        rho0, kernel, length = self._two_packet_state()
        left = (-60.0 * length, -40.0 * length)
        right = (40.0 * length, 60.0 * length)
        initial = offdiagonal_lobe_norm(rho0, left, right)
        worst = 0.0
        for rate_time in np.linspace(0.0, 3.0, 7):
            rho = evolve_density_matrix(rho0, kernel, float(rate_time) / kernel.gamma_total)
            decayed = offdiagonal_lobe_norm(rho, left, right) / initial
            worst = max(worst, _relative(decayed, math.exp(-rate_time)))
        return worst

    def _scan_config(self, flight_time: float = 1e-2) -> ScanConfig:
        return ScanConfig(
            gas=self.gas,
            beam=BeamState(test_mass=amu_to_kg(C70_MASS_AMU), speed_v0=100.0),
            cross_section=k_from_c6(REFERENCE_C6),
            flight_time=flight_time,
            v0_reference_visibility=0.9,
            pressure_min=mbar_to_pascal(1e-8),
            pressure_max=mbar_to_pascal(1e-5),
            points=25,
        )

    def check_visibility_linearity(self) -> float:
        cfg = self._scan_config()
        scan = visibility_pressure_scan(cfg)
        pressure = np.array([row.pressure for row in scan.rows]) / cfg.pressure_max
        log_ratio = np.array([math.log(row.visibility / cfg.v0_reference_visibility) for row in scan.rows])
        slope, intercept = np.polyfit(pressure, log_ratio, 1)
        residual = log_ratio - (slope * pressure + intercept)
        return float(np.max(np.abs(residual)) / np.max(np.abs(log_ratio)))

    def check_p_half_bracketing(self) -> float:
        cfg = self._scan_config()
        scan = visibility_pressure_scan(cfg)
        half = 0.5 * cfg.v0_reference_visibility
        violation = 0.0
        for row in scan.rows:
            if row.pressure < scan.p_half:
                violation = max(violation, (half - row.visibility) / half)
            elif row.pressure > scan.p_half:
                violation = max(violation, (row.visibility - half) / half)
        doubled = visibility_pressure_scan(self._scan_config(2.0 * cfg.flight_time))
        return max(violation, _relative(2.0 * doubled.p_half, scan.p_half))

    # gas

    def check_mb_moments(self) -> float:
        u = mb_sample(self.gas, self.seed, self.samples)
        root_n = math.sqrt(u.shape[0])
        speed_sq = np.einsum("ij,ij->i", u, u)
        worst = abs(speed_sq.mean() - 1.5 * self.vmp**2) / (speed_sq.std(ddof=1) / root_n)
        for axis in range(3):
            component = u[:, axis]
            worst = max(worst, abs(component.mean()) / (component.std(ddof=1) / root_n))
        return float(worst)

    def check_mb_speed_ks(self) -> float:
        speeds = np.sort(np.linalg.norm(mb_sample(self.gas, self.seed, self.samples), axis=1))
        cdf = mb_speed_cdf(speeds, self.gas)
        n = speeds.size
        above = np.arange(1, n + 1) / n - cdf
        below = cdf - np.arange(n) / n
        return float(math.sqrt(n) * max(above.max(), below.max()))

    def check_determinism(self) -> float:
        count, cut = 150_000, 70_000
        first = mb_sample(self.gas, self.seed, count)
        again = mb_sample(self.gas, self.seed, count)
        split = np.concatenate((
            mb_sample_range(self.gas, self.seed, 0, cut),
            mb_sample_range(self.gas, self.seed, cut, count),
        ))
        pl = PowerLawCrossSection(prefactor_K=1.0, exponent_alpha=VAN_DER_WAALS_ALPHA)
        serial = sigma_macro_montecarlo(pl, self.vmp, self.gas, count, self.seed)
        threaded = sigma_macro_montecarlo(pl, self.vmp, self.gas, count, self.seed, workers=4)
        mismatches = [
            not np.array_equal(first, again),
            not np.array_equal(first, split),
            serial != threaded,
        ]
        return float(sum(mismatches))


def render_report(results: List[CheckResult], version: str, seed: int, samples: int) -> str:
    """Plain-text report; identical results give byte-identical text"""
    width = max(len(r.name) for r in results)
    lines = [
        f"decoherence-kit v{version} validation report",
        f"seed={seed} samples={samples}",
        "",
    ]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(
            f"{status}  {r.name:<{width}}  max_error={r.max_error:.3e}  "
            f"tolerance={r.tolerance:.1e}  {r.description}"
        )
    passed = sum(r.passed for r in results)
    lines += ["", f"{passed}/{len(results)} checks passed"]
    return "\n".join(lines) + "\n"
