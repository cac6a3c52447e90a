"""
Background-gas model: thermodynamic state, Maxwell-Boltzmann velocities and
seeded velocity sampling
"""

import logging
import math
from typing import Union

import numpy as np
from pydantic import Field

from decokit.errors import DomainError
from decokit.physics.base import PhysicsModel
from decokit.physics.constants import CONSTANTS, PhysicalConstants

logger = logging.getLogger(__name__)

# Draws are generated in fixed blocks; block k always holds indices [k*B, (k+1)*B)
SAMPLE_BLOCK = 65536

_erf = np.vectorize(math.erf, otypes=[float])


class GasState(PhysicsModel):
    """Thermal background gas: temperature [K], particle mass m [kg], density n [1/m^3]"""

    temperature: float = Field(gt=0, allow_inf_nan=False)
    particle_mass: float = Field(gt=0, allow_inf_nan=False)
    number_density: float = Field(default=0.0, ge=0, allow_inf_nan=False)
    constants: PhysicalConstants = CONSTANTS

    @property
    def beta(self) -> float:
        """Inverse thermal energy 1 / (k_B T) [1/J]"""
        return 1.0 / (self.constants.boltzmann_constant * self.temperature)

    def with_density(self, number_density: float) -> "GasState":
        return GasState(
            temperature=self.temperature,
            particle_mass=self.particle_mass,
            number_density=number_density,
            constants=self.constants,
        )


def most_probable_speed(gas: GasState) -> float:
    """v_mp = sqrt(2 k_B T / m), the mode of the MB speed distribution [m/s]"""
    return math.sqrt(2.0 * gas.constants.boltzmann_constant * gas.temperature / gas.particle_mass)


def thermal_momentum(gas: GasState) -> float:
    """m v_mp, the typical momentum a gas particle brings into a collision [kg m/s]"""
    return gas.particle_mass * most_probable_speed(gas)


def density_from_pressure(
    pressure: float, temperature: float, constants: PhysicalConstants = CONSTANTS
) -> float:
    """
    Ideal-gas number density n = p / (k_B T)

    Args:
        pressure: Pressure in pascal, >= 0
        temperature: Temperature in kelvin, > 0

    Returns:
        float: Number density in 1/m^3
    """
    if not pressure >= 0.0:
        raise DomainError(f"pressure must be >= 0 Pa, got {pressure}")
    if not temperature > 0.0:
        raise DomainError(f"temperature must be > 0 K, got {temperature}")
    return pressure / (constants.boltzmann_constant * temperature)


def mb_pdf(u: Union[np.ndarray, list], gas: GasState) -> Union[float, np.ndarray]:
    """
    Maxwell-Boltzmann velocity density (pi v_mp^2)^(-3/2) exp(-|u|^2 / v_mp^2)

    `u` is one velocity vector (shape (3,)) or a stack of them (shape (..., 3)).
    """
    vectors = np.asarray(u, dtype=float)
    if vectors.shape[-1] != 3:
        raise DomainError(f"velocities must have 3 components, got shape {vectors.shape}")
    vmp = most_probable_speed(gas)
    speed_sq = np.sum(vectors**2, axis=-1) / (vmp * vmp)
    density = (math.pi * vmp * vmp) ** -1.5 * np.exp(-speed_sq)
    return float(density) if density.ndim == 0 else density


def mb_speed_cdf(speed: Union[float, np.ndarray], gas: GasState) -> Union[float, np.ndarray]:
    """Probability that a gas particle is slower than `speed`: erf(y) - 2 y exp(-y^2) / sqrt(pi)"""
    y = np.asarray(speed, dtype=float) / most_probable_speed(gas)
    cdf = _erf(y) - 2.0 / math.sqrt(math.pi) * y * np.exp(-y * y)
    return float(cdf) if cdf.ndim == 0 else cdf


def _block_generator(seed: int, block: int) -> np.random.Generator:
    # Philox is counter based: the key alone fixes the stream of a block
    return np.random.Generator(np.random.Philox(key=(block << 64) | seed))


def _polar_normals(rng: np.random.Generator, count: int) -> np.ndarray:
    """Standard normals by the Marsaglia polar method"""
    out = np.empty(count)
    filled = 0
    while filled < count:
        pairs = (count - filled + 1) // 2
        # Acceptance rate is pi/4; oversample a little so one round usually suffices
        u = rng.uniform(-1.0, 1.0, size=(int(pairs * 1.3) + 16, 2))
        s = np.einsum("ij,ij->i", u, u)
        keep = (s > 0.0) & (s < 1.0)
        u, s = u[keep], s[keep]
        normals = (u * np.sqrt(-2.0 * np.log(s) / s)[:, None]).ravel()
        take = min(count - filled, normals.size)
        out[filled:filled + take] = normals[:take]
        filled += take
    return out


def _sample_block(seed: int, block: int) -> np.ndarray:
    """SAMPLE_BLOCK standard-normal 3-vectors for one block of indices"""
    rng = _block_generator(seed, block)
    return _polar_normals(rng, 3 * SAMPLE_BLOCK).reshape(SAMPLE_BLOCK, 3)


def mb_sample_range(gas: GasState, seed: int, start: int, stop: int) -> np.ndarray:
    """
    Velocity draws with global indices [start, stop)

    Any split of an index range into sub-ranges reproduces the same draws,
    which lets callers generate samples in parallel.
    """
    if not 0 <= seed < 2**64:
        raise DomainError(f"seed must fit in 64 unsigned bits, got {seed}")
    if not 0 <= start < stop:
        raise DomainError(f"need 0 <= start < stop, got [{start}, {stop})")

    sigma = most_probable_speed(gas) / math.sqrt(2.0)
    first, last = start // SAMPLE_BLOCK, (stop - 1) // SAMPLE_BLOCK
    blocks = [_sample_block(seed, block) for block in range(first, last + 1)]
    offset = start - first * SAMPLE_BLOCK
    draws = np.concatenate(blocks)[offset:offset + (stop - start)]
    return sigma * draws


def mb_sample(gas: GasState, seed: int, count: int) -> np.ndarray:
    """
    `count` i.i.d. Maxwell-Boltzmann velocities, shape (count, 3)

    Each component is normal with mean 0 and standard deviation v_mp / sqrt(2).
    The same (seed, count) always gives the same array.
    """
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    logger.debug("sampling %d MB velocities with seed %d", count, seed)
    return mb_sample_range(gas, seed, 0, count)
