"""
Command-line front end: JSON run configuration in, CSV tables out
"""

import argparse
import logging
import sys
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from decokit import __version__
from decokit.config import SCHEMA_VERSION, get_samples, get_seed, load_environment, setup_logging
from decokit.errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    PoleError,
    RangeOverflowError,
)
from decokit.physics.constants import CONSTANTS, amu_to_kg, mbar_to_pascal
from decokit.physics.decoherence import (
    RateConvention,
    ScanConfig,
    decoherence_function,
    decoherence_rate,
    kernel_gaussian,
    visibility_pressure_scan,
)
from decokit.physics.gas import GasState, density_from_pressure, most_probable_speed, thermal_momentum
from decokit.physics.xsection import (
    BeamState,
    PowerLawCrossSection,
    k_from_c6,
    sigma_macro_exact,
    sigma_macro_quadrature,
    sigma_macro_series,
)
from decokit.utils.csv_output import CsvTable, write_text
from decokit.utils.validators import MASS_UNITS, PRESSURE_UNITS, all_positive_finite, is_known_unit
from decokit.validation import ValidationSuite, render_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION_FAILED = 1
EXIT_BAD_CONFIG = 2
EXIT_NUMERICAL = 3


class RunConfig(BaseModel):
    """
    Flat JSON run configuration

    Pressures are read in `pressure_unit` and masses in `mass_unit`; every
    other quantity is SI. Give either `c6` or both `prefactor_K` and
    `exponent_alpha`.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    schema_version: int
    gas_species: str = "argon"
    pressure_unit: str = "mbar"
    mass_unit: str = "amu"

    temperature: float
    gas_mass: float
    test_mass: float
    speed_v0: float

    c6: Optional[float] = None
    prefactor_K: Optional[float] = None
    exponent_alpha: Optional[float] = None

    flight_time: float = 1e-2
    visibility_reference: float = Field(default=1.0, gt=0, le=1)
    pressure_min: float = 1e-8
    pressure_max: float = 1e-6
    points: int = Field(default=25, ge=2)

    speeds: Optional[List[float]] = None
    q_width: Optional[float] = None
    q_points: int = Field(default=2048, ge=64)
    kernel_pressure: Optional[float] = None
    delta_points: int = Field(default=201, ge=2)
    delta_max: Optional[float] = None

    rate_convention: RateConvention = RateConvention.LOSS_TERM
    output_path: Optional[str] = None

    @field_validator("schema_version")
    @classmethod
    def _supported_schema(cls, value: int) -> int:
        if value != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {value}, expected {SCHEMA_VERSION}")
        return value

    @field_validator("pressure_unit")
    @classmethod
    def _pressure_unit(cls, value: str) -> str:
        if not is_known_unit(value, PRESSURE_UNITS):
            raise ValueError(f"pressure_unit must be one of {PRESSURE_UNITS}, got {value!r}")
        return value

    @field_validator("mass_unit")
    @classmethod
    def _mass_unit(cls, value: str) -> str:
        if not is_known_unit(value, MASS_UNITS):
            raise ValueError(f"mass_unit must be one of {MASS_UNITS}, got {value!r}")
        return value

    @field_validator(
        "temperature", "gas_mass", "test_mass", "speed_v0", "flight_time",
        "pressure_min", "pressure_max",
    )
    @classmethod
    def _positive(cls, value: float) -> float:
        if not all_positive_finite([value]):
            raise ValueError(f"must be positive and finite, got {value}")
        return value

    @field_validator("c6", "prefactor_K", "q_width", "kernel_pressure", "delta_max")
    @classmethod
    def _positive_if_given(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and not all_positive_finite([value]):
            raise ValueError(f"must be positive and finite, got {value}")
        return value

    @field_validator("speeds")
    @classmethod
    def _positive_speeds(cls, value: Optional[List[float]]) -> Optional[List[float]]:
        if value is not None and not (value and all_positive_finite(value)):
            raise ValueError("speeds must be a non-empty list of positive numbers")
        return value

    @model_validator(mode="after")
    def _check_consistency(self) -> "RunConfig":
        explicit = (self.prefactor_K, self.exponent_alpha)
        if self.c6 is not None and any(v is not None for v in explicit):
            raise ValueError("give either c6 or (prefactor_K, exponent_alpha), not both")
        if self.c6 is None and any(v is None for v in explicit):
            raise ValueError("give c6 or both prefactor_K and exponent_alpha")
        if not self.pressure_min < self.pressure_max:
            raise ValueError("pressure_min must be below pressure_max")
        return self

    def _pascal(self, pressure: float) -> float:
        return mbar_to_pascal(pressure) if self.pressure_unit == "mbar" else pressure

    def _kilogram(self, mass: float) -> float:
        return amu_to_kg(mass, CONSTANTS) if self.mass_unit == "amu" else mass

    def gas_state(self) -> GasState:
        return GasState(temperature=self.temperature, particle_mass=self._kilogram(self.gas_mass))

    def beam_state(self) -> BeamState:
        return BeamState(test_mass=self._kilogram(self.test_mass), speed_v0=self.speed_v0)

    def cross_section(self) -> PowerLawCrossSection:
        if self.c6 is not None:
            return k_from_c6(self.c6, CONSTANTS)
        return PowerLawCrossSection(prefactor_K=self.prefactor_K, exponent_alpha=self.exponent_alpha)

    def scan_config(self) -> ScanConfig:
        return ScanConfig(
            gas=self.gas_state(),
            beam=self.beam_state(),
            cross_section=self.cross_section(),
            flight_time=self.flight_time,
            v0_reference_visibility=self.visibility_reference,
            pressure_min=self._pascal(self.pressure_min),
            pressure_max=self._pascal(self.pressure_max),
            points=self.points,
            rate_convention=self.rate_convention,
        )

    def kernel_pressure_pa(self) -> float:
        """Pressure used for the decoherence-function kernel; pressure_max when unset"""
        return self._pascal(self.kernel_pressure if self.kernel_pressure is not None else self.pressure_max)


def load_run_config(path: str) -> RunConfig:
    """
    Read and validate a JSON run configuration

    Raises:
        ConfigError: the file cannot be read
        pydantic.ValidationError: the JSON is malformed or inconsistent
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    return RunConfig.model_validate_json(text)


def _header_comments(cfg: RunConfig) -> List[str]:
    pl = cfg.cross_section()
    return [
        f"gas_species={cfg.gas_species} temperature_K={cfg.temperature:.17g}",
        f"K={pl.prefactor_K:.17g} alpha={pl.exponent_alpha:.17g}",
    ]


def cmd_xsection(cfg: RunConfig) -> CsvTable:
    """sigma_macro sweep over the configured speeds, three ways"""
    gas = cfg.gas_state()
    vmp = most_probable_speed(gas)
    pl = cfg.cross_section()
    speeds = cfg.speeds or [cfg.speed_v0]
    logger.info("xsection: %d speeds, v_mp = %.6g m/s", len(speeds), vmp)

    table = CsvTable(
        columns=["v0", "x", "sigma_exact", "sigma_series1", "sigma_quadrature"],
        comments=_header_comments(cfg) + [f"v_mp={vmp:.17g}"],
    )
    for v0 in speeds:
        table.rows.append([
            v0,
            v0 / vmp,
            sigma_macro_exact(pl, v0, vmp),
            sigma_macro_series(pl, v0, vmp, 1),
            sigma_macro_quadrature(pl, v0, vmp),
        ])
    return table


def cmd_visibility(cfg: RunConfig) -> CsvTable:
    """Visibility against log-spaced pressure, with p_half in the footer"""
    scan = visibility_pressure_scan(cfg.scan_config())
    table = CsvTable(
        columns=["pressure_Pa", "n", "Gamma", "V"],
        comments=_header_comments(cfg) + [
            f"sigma_macro={scan.sigma_macro:.17g} rate_convention={cfg.rate_convention.value}",
        ],
        footer=[f"p_half_Pa={scan.p_half:.17g}"],
    )
    for row in scan.rows:
        table.rows.append([row.pressure, row.number_density, row.rate, row.visibility])
    return table


def cmd_decoherence_function(cfg: RunConfig) -> CsvTable:
    """F(delta_x) for a Gaussian kernel normalised to the rate at kernel_pressure"""
    gas = cfg.gas_state()
    beam = cfg.beam_state()
    sigma = sigma_macro_exact(cfg.cross_section(), beam.speed_v0, most_probable_speed(gas))
    pressure = cfg.kernel_pressure_pa()
    state = gas.with_density(density_from_pressure(pressure, gas.temperature, gas.constants))
    rate = decoherence_rate(state, beam, sigma, cfg.rate_convention)
    if not rate > 0.0:
        raise DomainError("the kernel needs a positive decoherence rate")

    q_width = cfg.q_width if cfg.q_width is not None else thermal_momentum(gas)
    delta_max = cfg.delta_max if cfg.delta_max is not None else 1e3 * CONSTANTS.reduced_planck / q_width
    kernel = kernel_gaussian(rate, q_width, cfg.q_points)
    deltas = np.linspace(0.0, delta_max, cfg.delta_points)
    values = decoherence_function(kernel, deltas, CONSTANTS)
    logger.info("decoherence-function: Gamma = %.6g 1/s, q_width = %.6g", rate, q_width)

    table = CsvTable(
        columns=["delta_x", "F", "F_over_Gamma"],
        comments=_header_comments(cfg) + [
            f"pressure_Pa={pressure:.17g} Gamma={rate:.17g} q_width={q_width:.17g}",
        ],
    )
    for delta, value in zip(deltas, values):
        table.rows.append([float(delta), float(value), float(value) / rate])
    return table


def cmd_validate(seed: int, samples: int, perturb_k: float = 0.0) -> Tuple[str, int]:
    """
    Run the cross-check suite

    Returns:
        tuple: (report text, exit code 0 when every check passed, else 1)
    """
    suite = ValidationSuite(seed=seed, samples=samples, perturb_k=perturb_k)
    results = suite.run()
    report = render_report(results, __version__, seed, samples)
    code = EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION_FAILED
    return report, code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decoherence-kit",
        description="Collisional decoherence of matter waves: cross-sections, visibility, decoherence function",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("xsection", "thermally averaged cross-section sweep"),
        ("visibility", "visibility against background pressure"),
        ("decoherence-function", "off-diagonal decay rate F(delta_x)"),
    ):
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("--config", required=True, help="JSON run configuration")
        sub.add_argument("--out", help="CSV output path (default: output_path, else stdout)")

    validate = subparsers.add_parser("validate", help="run the oracle cross-check suite")
    validate.add_argument("--out", help="report path (default: stdout)")
    validate.add_argument("--seed", type=int, help="Monte-Carlo seed (or set DECOKIT_SEED)")
    validate.add_argument("--samples", type=int, help="Monte-Carlo draws (or set DECOKIT_SAMPLES)")
    validate.add_argument("--perturb-k", type=float, default=0.0,
                          help="debug: scale K on the closed-form side by 1 + value")
    return parser


COMMANDS = {
    "xsection": cmd_xsection,
    "visibility": cmd_visibility,
    "decoherence-function": cmd_decoherence_function,
}


def run(args: argparse.Namespace) -> int:
    if args.command == "validate":
        report, code = cmd_validate(get_seed(args.seed), get_samples(args.samples), args.perturb_k)
        write_text(report, args.out)
        return code

    cfg = load_run_config(args.config)
    table = COMMANDS[args.command](cfg)
    write_text(table.render(__version__), args.out or cfg.output_path)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI function; returns the process exit code"""
    load_environment()
    setup_logging()

    args = build_parser().parse_args(argv)
    logger.info("command %s", args.command)
    try:
        return run(args)
    except (PoleError, RangeOverflowError, ConvergenceError) as e:
        logger.error("numerical failure: %s", e)
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, ValidationError, ValueError, OSError) as e:
        logger.error("bad configuration: %s", e)
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_BAD_CONFIG


if __name__ == "__main__":
    sys.exit(main())
