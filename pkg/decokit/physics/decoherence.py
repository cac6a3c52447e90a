"""
Decoherence observables

Classical side: the rate Gamma = n v0 sigma_macro, the visibility
V0 exp(-Gamma t) and pressure scans. Quantum side: with the gas momentum
frozen at p0, the collision terms of the master equation act on the
position-space density matrix as

    d rho(x, x') / dt = -F(x - x') rho(x, x'),
    F(D) = int G(q) (1 - sinc(q D / hbar)) d^3q,

where G(q) is the isotropic momentum-transfer kernel normalised to
int G d^3q = Gamma. The gain term averages to zero at large separations,
so F(D) -> Gamma there.
"""

import enum
import logging
import math
from typing import List, Union

import numpy as np
from pydantic import Field, field_validator, model_validator

from decokit.errors import DomainError, KernelError
from decokit.physics.base import ArrayModel, PhysicsModel
from decokit.physics.constants import CONSTANTS, PhysicalConstants
from decokit.physics.gas import GasState, density_from_pressure, most_probable_speed
from decokit.physics.specfun import DEFAULT_CONFIG, SpecfunConfig
from decokit.physics.xsection import BeamState, PowerLawCrossSection, sigma_macro_exact

logger = logging.getLogger(__name__)

# Below this |y| the Taylor series replaces sin(y)/y
_SINC_SERIES_CUTOFF = 1e-4
# Below this |y| the Taylor series replaces 1 - sin(y)/y
_ONE_MINUS_SINC_CUTOFF = 0.1

# Gaussian kernels are tabulated out to this many widths
GAUSSIAN_KERNEL_REACH = 8.0


class RateConvention(enum.StrEnum):
    """How the rate relates to the total scattering rate n v0 sigma"""

    LOSS_TERM = "loss-term"
    # Rate carries an extra factor of 2 pi
    GALLIS_FLEMING = "gallis-fleming"

    @property
    def factor(self) -> float:
        return 2.0 * math.pi if self is RateConvention.GALLIS_FLEMING else 1.0


class MomentumKernel(ArrayModel):
    """Radial momentum-transfer density G(q) with int G 4 pi q^2 dq = gamma_total"""

    q_grid: np.ndarray
    weights: np.ndarray
    gamma_total: float = Field(gt=0, allow_inf_nan=False)

    @field_validator("q_grid", "weights", mode="before")
    @classmethod
    def _own_copy(cls, value) -> np.ndarray:
        # own copy; the tables are frozen after validation
        return np.array(value, dtype=float)

    @model_validator(mode="after")
    def _check_tables(self) -> "MomentumKernel":
        q, w = self.q_grid, self.weights
        if q.ndim != 1 or w.shape != q.shape or q.size < 2:
            raise KernelError("q_grid and weights must be 1-D arrays of the same length >= 2")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(w))):
            raise KernelError("kernel tables must be finite")
        if q[0] < 0.0 or np.any(np.diff(q) <= 0.0):
            raise KernelError("q_grid must be non-negative and strictly increasing")
        if np.any(w < 0.0):
            raise KernelError("kernel weights must be non-negative")
        norm = _shell_integral(q, w)
        if abs(norm - self.gamma_total) > 1e-9 * self.gamma_total:
            raise KernelError(f"kernel integrates to {norm}, not gamma_total = {self.gamma_total}")
        q.flags.writeable = False
        w.flags.writeable = False
        return self


class DensityMatrix(ArrayModel):
    """rho(x_i, x_j) on a uniform 1-D grid, unit trace with the grid spacing as weight"""

    x_grid: np.ndarray
    values: np.ndarray

    @model_validator(mode="after")
    def _check_matrix(self) -> "DensityMatrix":
        x, rho = self.x_grid, self.values
        if x.ndim != 1 or x.size < 2 or rho.shape != (x.size, x.size):
            raise ValueError("values must be an N x N matrix over an N-point grid")
        steps = np.diff(x)
        if np.any(steps <= 0.0) or not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            raise ValueError("x_grid must be uniform and increasing")
        scale = np.max(np.abs(rho))
        if np.max(np.abs(rho - rho.conj().T)) > 1e-12 * scale:
            raise ValueError("density matrix must be Hermitian")
        if abs(self.trace - 1.0) > 1e-12:
            raise ValueError(f"density matrix must have unit trace, got {self.trace}")
        return self

    @property
    def spacing(self) -> float:
        return float(self.x_grid[1] - self.x_grid[0])

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.values))) * self.spacing

    @classmethod
    def from_wavefunction(cls, x_grid: np.ndarray, psi: np.ndarray) -> "DensityMatrix":
        """Pure state |psi><psi|, normalised on the grid"""
        x = np.asarray(x_grid, dtype=float)
        psi = np.asarray(psi, dtype=complex)
        norm = math.sqrt(float(np.sum(np.abs(psi) ** 2)) * (x[1] - x[0]))
        psi = psi / norm
        rho = np.outer(psi, psi.conj())
        # Pin the diagonal to real values and the trace to one
        rho[np.diag_indices_from(rho)] = np.abs(psi) ** 2
        rho /= np.real(np.trace(rho)) * (x[1] - x[0])
        return cls(x_grid=x, values=rho)

    @classmethod
    def gaussian_superposition(
        cls, x_grid: np.ndarray, centers: List[float], width: float
    ) -> "DensityMatrix":
        """Equal-weight coherent superposition of Gaussian wavepackets"""
        x = np.asarray(x_grid, dtype=float)
        psi = sum(np.exp(-((x - c) ** 2) / (4.0 * width * width)) for c in centers)
        return cls.from_wavefunction(x, psi)


class ScanConfig(PhysicsModel):
    """Inputs of a visibility-versus-pressure scan; pressures in Pa"""

    gas: GasState
    beam: BeamState
    cross_section: PowerLawCrossSection
    flight_time: float = Field(gt=0, allow_inf_nan=False)
    v0_reference_visibility: float = Field(gt=0, le=1)
    pressure_min: float = Field(gt=0, allow_inf_nan=False)
    pressure_max: float = Field(gt=0, allow_inf_nan=False)
    points: int = Field(ge=2)
    rate_convention: RateConvention = RateConvention.LOSS_TERM
    specfun: SpecfunConfig = DEFAULT_CONFIG

    @model_validator(mode="after")
    def _check_range(self) -> "ScanConfig":
        if not self.pressure_min < self.pressure_max:
            raise ValueError("pressure_min must be below pressure_max")
        return self


class ScanRow(PhysicsModel):
    pressure: float
    number_density: float
    rate: float
    visibility: float


class VisibilityScan(PhysicsModel):
    """Scan rows plus the pressure at which the visibility halves"""

    rows: List[ScanRow]
    sigma_macro: float
    p_half: float


def decoherence_rate(
    gas: GasState,
    beam: BeamState,
    sigma: float,
    convention: RateConvention = RateConvention.LOSS_TERM,
) -> float:
    """Gamma = n v0 sigma [1/s]; the Gallis-Fleming convention multiplies by 2 pi"""
    return convention.factor * gas.number_density * beam.speed_v0 * sigma


def visibility(v0_ref: float, rate: float, time: float) -> float:
    """V = V0 exp(-Gamma t)"""
    return v0_ref * math.exp(-rate * time)


def visibility_pressure_scan(cfg: ScanConfig) -> VisibilityScan:
    """Visibility at log-spaced pressures between pressure_min and pressure_max"""
    gas, beam = cfg.gas, cfg.beam
    sigma = sigma_macro_exact(cfg.cross_section, beam.speed_v0, most_probable_speed(gas), cfg.specfun)
    logger.info("scan: sigma_macro = %.6g m^2 over %d pressures", sigma, cfg.points)

    rows = []
    for pressure in np.geomspace(cfg.pressure_min, cfg.pressure_max, cfg.points):
        pressure = float(pressure)
        state = gas.with_density(density_from_pressure(pressure, gas.temperature, gas.constants))
        rate = decoherence_rate(state, beam, sigma, cfg.rate_convention)
        rows.append(ScanRow(
            pressure=pressure,
            number_density=state.number_density,
            rate=rate,
            visibility=visibility(cfg.v0_reference_visibility, rate, cfg.flight_time),
        ))

    # V = V0 / 2 solved exactly for p through n = p / (k_B T)
    p_half = (
        math.log(2.0) * gas.constants.boltzmann_constant * gas.temperature
        / (cfg.rate_convention.factor * beam.speed_v0 * sigma * cfg.flight_time)
    )
    return VisibilityScan(rows=rows, sigma_macro=sigma, p_half=p_half)


def _shell_integral(q: np.ndarray, values: np.ndarray) -> float:
    """Trapezoid rule for int values(q) 4 pi q^2 dq"""
    return float(np.trapezoid(values * 4.0 * math.pi * q * q, q))


def kernel_gaussian(gamma_total: float, q_width: float, q_points: int) -> MomentumKernel:
    """
    Radial Gaussian kernel G(q) ~ exp(-q^2 / (2 q_width^2)) on [0, 8 q_width]

    Args:
        gamma_total: Total rate the kernel integrates to [1/s]
        q_width: Per-axis momentum width [kg m/s]
        q_points: Grid size, >= 64
    """
    if not gamma_total > 0.0:
        raise KernelError(f"gamma_total must be positive, got {gamma_total}")
    if not q_width > 0.0:
        raise KernelError(f"q_width must be positive, got {q_width}")
    if q_points < 64:
        raise KernelError(f"a Gaussian kernel needs at least 64 points, got {q_points}")
    q = np.linspace(0.0, GAUSSIAN_KERNEL_REACH * q_width, q_points)
    shape = np.exp(-0.5 * (q / q_width) ** 2)
    weights = gamma_total * shape / _shell_integral(q, shape)
    return MomentumKernel(q_grid=q, weights=weights, gamma_total=gamma_total)


def kernel_from_table(q_grid, weights, renormalize_to: float) -> MomentumKernel:
    """Kernel from tabulated G(q), rescaled to integrate to `renormalize_to`"""
    q = np.array(q_grid, dtype=float)
    w = np.array(weights, dtype=float)
    if q.ndim != 1 or w.shape != q.shape or q.size < 2:
        raise KernelError("q_grid and weights must be 1-D arrays of the same length >= 2")
    if not (np.all(np.isfinite(q)) and np.all(np.isfinite(w))):
        raise KernelError("kernel tables must be finite")
    if q[0] < 0.0 or np.any(np.diff(q) <= 0.0):
        raise KernelError("q_grid must be non-negative and strictly increasing")
    if np.any(w < 0.0):
        raise KernelError("kernel weights must be non-negative")
    if not renormalize_to > 0.0:
        raise KernelError(f"renormalize_to must be positive, got {renormalize_to}")
    norm = _shell_integral(q, w)
    if not norm > 0.0:
        raise KernelError("kernel weights integrate to zero")
    return MomentumKernel(q_grid=q, weights=w * (renormalize_to / norm), gamma_total=renormalize_to)


def sinc(y: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """sin(y) / y with sinc(0) = 1"""
    y = np.asarray(y, dtype=float)
    y_sq = y * y
    small = np.abs(y) < _SINC_SERIES_CUTOFF
    safe = np.where(small, 1.0, y)
    out = np.where(small, 1.0 - y_sq / 6.0 + y_sq * y_sq / 120.0, np.sin(safe) / safe)
    return float(out) if out.ndim == 0 else out


def one_minus_sinc(y: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """1 - sin(y) / y without cancellation near y = 0"""
    y = np.asarray(y, dtype=float)
    y_sq = y * y
    small = np.abs(y) < _ONE_MINUS_SINC_CUTOFF
    series = y_sq / 6.0 * (1.0 - y_sq / 20.0 * (1.0 - y_sq / 42.0 * (1.0 - y_sq / 72.0 * (1.0 - y_sq / 110.0))))
    out = np.where(small, series, 1.0 - sinc(np.where(small, 1.0, y)))
    return float(out) if out.ndim == 0 else out


def decoherence_function(
    kernel: MomentumKernel,
    delta_x: Union[float, np.ndarray],
    constants: PhysicalConstants = CONSTANTS,
) -> Union[float, np.ndarray]:
    """
    Decay rate F(D) of the off-diagonal element rho(x, x + D) [1/s]

    Accepts one separation or an array of them. F(0) = 0 and F -> gamma_total
    as D grows, with 0 <= F <= 2 gamma_total throughout.
    """
    separations = np.abs(np.asarray(delta_x, dtype=float))
    q = kernel.q_grid
    shell = kernel.weights * 4.0 * math.pi * q * q
    phase = np.multiply.outer(separations, q) / constants.reduced_planck
    rates = np.trapezoid(shell * one_minus_sinc(phase), q, axis=-1)
    return float(rates) if np.ndim(rates) == 0 else rates


def evolve_density_matrix(
    rho0: DensityMatrix,
    kernel: MomentumKernel,
    time: float,
    constants: PhysicalConstants = CONSTANTS,
) -> DensityMatrix:
    """
    Collisions-only evolution rho(x, x', t) = rho(x, x', 0) exp(-F(x - x') t)

    The free Hamiltonian is left out; the diagonal never changes.
    """
    if not time >= 0.0:
        raise DomainError(f"time must be >= 0, got {time}")
    if time == 0.0:
        return rho0
    n = rho0.x_grid.size
    # F depends on |i - j| only on a uniform grid
    rates = decoherence_function(kernel, rho0.spacing * np.arange(n), constants)
    offsets = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    damping = np.exp(-rates[offsets] * time)
    return DensityMatrix(x_grid=rho0.x_grid, values=rho0.values * damping)


def offdiagonal_lobe_norm(rho: DensityMatrix, left: tuple, right: tuple) -> float:
    """Sum of |rho(x_i, x_j)| with x_i in the `left` window and x_j in the `right` one"""
    x = rho.x_grid
    rows = (x >= left[0]) & (x <= left[1])
    cols = (x >= right[0]) & (x <= right[1])
    return float(np.sum(np.abs(rho.values[np.ix_(rows, cols)])))
