import pytest

from decokit.physics.constants import amu_to_kg
from decokit.physics.gas import GasState, most_probable_speed

ARGON_MASS_AMU = 39.948


@pytest.fixture
def argon():
    """Argon at 300 K, no density set"""
    return GasState(temperature=300.0, particle_mass=amu_to_kg(ARGON_MASS_AMU))


@pytest.fixture
def argon_vmp(argon):
    return most_probable_speed(argon)


@pytest.fixture(autouse=True)
def _isolated_environment(monkeypatch, tmp_path):
    for name in ("DECOKIT_SEED", "DECOKIT_SAMPLES", "DECOKIT_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv("DECOKIT_LOG_FILE", str(tmp_path / "decokit.log"))
