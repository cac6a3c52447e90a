import json
import math

import numpy as np
import pytest

from decokit import __version__
from decokit.cli import (
    RunConfig,
    cmd_decoherence_function,
    cmd_validate,
    cmd_visibility,
    cmd_xsection,
    main,
)
from decokit.physics.constants import CONSTANTS
from decokit.physics.decoherence import decoherence_rate
from decokit.physics.gas import GasState, density_from_pressure, most_probable_speed
from decokit.physics.xsection import BeamState, k_from_c6, sigma_macro_exact
from decokit.utils.csv_output import read_table

BASE = {
    "schema_version": 1,
    "gas_species": "argon",
    "pressure_unit": "mbar",
    "mass_unit": "amu",
    "temperature": 300.0,
    "gas_mass": 39.948,
    "test_mass": 840.77,
    "speed_v0": 100.0,
    "c6": 1.0e-76,
    "flight_time": 0.01,
    "visibility_reference": 0.9,
    "pressure_min": 1e-8,
    "pressure_max": 1e-5,
    "points": 13,
    "speeds": [0.35, 10.0, 100.0, 400.0],
    "delta_points": 41,
}


def make_config(**overrides):
    data = dict(BASE)
    data.update(overrides)
    return RunConfig.model_validate_json(json.dumps(data))


@pytest.fixture
def config_file(tmp_path):
    def write(**overrides):
        data = dict(BASE)
        data.update(overrides)
        data = {k: v for k, v in data.items() if v is not None}
        path = tmp_path / "run.json"
        path.write_text(json.dumps(data))
        return str(path)

    return write


def test_run_config_requires_one_cross_section_source():
    with pytest.raises(ValueError):
        make_config(prefactor_K=1.0, exponent_alpha=1.0)
    with pytest.raises(ValueError):
        make_config(c6=None, prefactor_K=1.0)
    config = make_config(c6=None, prefactor_K=2.0, exponent_alpha=1.0)
    assert config.cross_section().prefactor_K == 2.0


def test_run_config_beam_state_in_si_units():
    beam = make_config().beam_state()
    assert beam == BeamState(test_mass=840.77 * CONSTANTS.atomic_mass_unit, speed_v0=100.0)


@pytest.mark.parametrize(
    "overrides",
    [
        {"schema_version": 2},
        {"pressure_unit": "torr"},
        {"mass_unit": "g"},
        {"temperature": -1.0},
        {"pressure_min": 1e-5, "pressure_max": 1e-8},
        {"speeds": []},
        {"unknown_field": 1},
        {"q_points": 10},
    ],
)
def test_run_config_rejects(overrides):
    with pytest.raises(ValueError):
        make_config(**overrides)


def test_units_are_converted_at_the_boundary():
    config = make_config()
    assert config.scan_config().pressure_min == pytest.approx(1e-6)
    assert config.gas_state().particle_mass == pytest.approx(39.948 * 1.66053906660e-27)
    si = make_config(pressure_unit="Pa", mass_unit="kg", gas_mass=6.6e-26, test_mass=1.4e-24)
    assert si.scan_config().pressure_max == 1e-5
    assert si.gas_state().particle_mass == 6.6e-26
    assert config.kernel_pressure_pa() == pytest.approx(1e-3)


def test_xsection_table_polynomial_case():
    config = make_config(c6=None, prefactor_K=2.0, exponent_alpha=1.0)
    table = cmd_xsection(config)
    vmp = most_probable_speed(config.gas_state())
    for v0, x, exact in zip(table.column("v0"), table.column("x"), table.column("sigma_exact")):
        assert x == pytest.approx(v0 / vmp, rel=1e-15)
        assert exact == pytest.approx(2.0 * (v0 * v0 + 1.5 * vmp * vmp) / v0, rel=1e-12)
    for exact, quadrature in zip(table.column("sigma_exact"), table.column("sigma_quadrature")):
        assert quadrature == pytest.approx(exact, rel=1e-8)


def test_xsection_series_ratio_at_small_x():
    table = cmd_xsection(make_config())
    x = table.column("x")[0]
    assert x < 2e-3
    ratio = table.column("sigma_series1")[0] / table.column("sigma_exact")[0]
    assert ratio == pytest.approx(1.0, abs=1e-6)


def test_visibility_table():
    config = make_config()
    table = cmd_visibility(config)
    pressures = np.array(table.column("pressure_Pa"))
    visibilities = np.array(table.column("V"))
    log_ratio = np.log(visibilities / 0.9)
    scaled = pressures / pressures[-1]
    slope, intercept = np.polyfit(scaled, log_ratio, 1)
    assert np.max(np.abs(log_ratio - (slope * scaled + intercept))) < 1e-12 * np.max(np.abs(log_ratio))

    p_half = float(table.footer[0].split("=")[1])
    assert np.all(visibilities[pressures < p_half] > 0.45)
    assert np.all(visibilities[pressures > p_half] < 0.45)


def test_visibility_table_reproduces_library_chain():
    config = make_config()
    table = cmd_visibility(config)
    gas = GasState(temperature=300.0, particle_mass=39.948 * CONSTANTS.atomic_mass_unit)
    beam = BeamState(test_mass=840.77 * CONSTANTS.atomic_mass_unit, speed_v0=100.0)
    sigma = sigma_macro_exact(k_from_c6(1e-76), 100.0, most_probable_speed(gas))
    pressure = table.column("pressure_Pa")[-1]
    rate = decoherence_rate(gas.with_density(density_from_pressure(pressure, 300.0)), beam, sigma)
    assert table.column("Gamma")[-1] == pytest.approx(rate, rel=1e-14)


def test_decoherence_function_table():
    table = cmd_decoherence_function(make_config())
    ratios = table.column("F_over_Gamma")
    assert table.column("delta_x")[0] == 0.0
    assert table.column("F")[0] == 0.0
    assert 0.999 <= ratios[-1] <= 1.001


def test_decoherence_function_table_matches_gaussian_oracle():
    q_width = 2e-24
    table = cmd_decoherence_function(make_config(q_width=q_width, delta_max=5.0 * CONSTANTS.reduced_planck / q_width))
    for delta, ratio in zip(table.column("delta_x"), table.column("F_over_Gamma")):
        expected = -math.expm1(-0.5 * (q_width * delta / CONSTANTS.reduced_planck) ** 2)
        assert ratio == pytest.approx(expected, abs=1e-6)


def test_main_writes_identical_csv(tmp_path, config_file):
    path = config_file()
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["visibility", "--config", path, "--out", str(first)]) == 0
    assert main(["visibility", "--config", path, "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    text = first.read_text()
    assert text.startswith(f"# decoherence-kit v{__version__} schema=1\n")
    assert read_table(text).columns == ["pressure_Pa", "n", "Gamma", "V"]


def test_main_bad_config_exit_code(tmp_path, config_file):
    assert main(["xsection", "--config", config_file(schema_version=3)]) == 2
    assert main(["xsection", "--config", str(tmp_path / "missing.json")]) == 2
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert main(["xsection", "--config", str(broken)]) == 2


def test_main_numerical_failure_exit_code(tmp_path, config_file):
    # Gamma(alpha/2 + 2) overflows for alpha this large
    path = config_file(c6=None, prefactor_K=1.0, exponent_alpha=400.0)
    assert main(["xsection", "--config", path, "--out", str(tmp_path / "x.csv")]) == 3


def test_cmd_validate_passes_and_is_deterministic():
    report, code = cmd_validate(seed=20050617, samples=200_000)
    again, _ = cmd_validate(seed=20050617, samples=200_000)
    assert code == 0, report
    assert report == again
    assert "FAIL" not in report


def test_cmd_validate_detects_perturbed_k():
    report, code = cmd_validate(seed=20050617, samples=200_000, perturb_k=1e-3)
    assert code == 1
    assert "FAIL  closed_vs_quadrature" in report


def test_main_validate_writes_report(tmp_path, monkeypatch):
    monkeypatch.setenv("DECOKIT_SAMPLES", "100000")
    out = tmp_path / "report.txt"
    assert main(["validate", "--out", str(out)]) == 0
    assert "checks passed" in out.read_text()
