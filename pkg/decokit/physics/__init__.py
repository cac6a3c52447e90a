"""
Physics modules for decoherence-kit
"""

from decokit.physics.constants import CONSTANTS, PhysicalConstants
from decokit.physics.decoherence import (
    DensityMatrix,
    MomentumKernel,
    RateConvention,
    ScanConfig,
    decoherence_function,
    decoherence_rate,
    evolve_density_matrix,
    kernel_from_table,
    kernel_gaussian,
    visibility,
    visibility_pressure_scan,
)
from decokit.physics.gas import GasState, density_from_pressure, mb_pdf, mb_sample, most_probable_speed
from decokit.physics.specfun import SpecfunConfig, gamma, gr_integral_closed_form, kummer_m
from decokit.physics.xsection import (
    BeamState,
    PowerLawCrossSection,
    k_from_c6,
    sigma_macro_exact,
    sigma_macro_montecarlo,
    sigma_macro_quadrature,
    sigma_macro_series,
    sigma_micro,
)

__all__ = [
    "CONSTANTS",
    "PhysicalConstants",
    "SpecfunConfig",
    "gamma",
    "kummer_m",
    "gr_integral_closed_form",
    "GasState",
    "most_probable_speed",
    "density_from_pressure",
    "mb_pdf",
    "mb_sample",
    "PowerLawCrossSection",
    "BeamState",
    "k_from_c6",
    "sigma_micro",
    "sigma_macro_exact",
    "sigma_macro_series",
    "sigma_macro_quadrature",
    "sigma_macro_montecarlo",
    "RateConvention",
    "MomentumKernel",
    "DensityMatrix",
    "ScanConfig",
    "decoherence_rate",
    "visibility",
    "visibility_pressure_scan",
    "kernel_gaussian",
    "kernel_from_table",
    "decoherence_function",
    "evolve_density_matrix",
]
