"""
Physical constants (SI) and the unit conversions done at the CLI boundary
"""

from pydantic import Field

from decokit.physics.base import PhysicsModel

# Exact by definition of the millibar
PASCAL_PER_MBAR = 100.0


class PhysicalConstants(PhysicsModel):
    """CODATA 2018 values used throughout the package"""

    # Boltzmann constant [J/K]
    boltzmann_constant: float = Field(default=1.380649e-23, gt=0)
    # Reduced Planck constant [J s]
    reduced_planck: float = Field(default=1.054571817e-34, gt=0)
    # Atomic mass unit [kg]
    atomic_mass_unit: float = Field(default=1.66053906660e-27, gt=0)


CONSTANTS = PhysicalConstants()


def mbar_to_pascal(pressure_mbar: float) -> float:
    return pressure_mbar * PASCAL_PER_MBAR


def amu_to_kg(mass_amu: float, constants: PhysicalConstants = CONSTANTS) -> float:
    return mass_amu * constants.atomic_mass_unit
