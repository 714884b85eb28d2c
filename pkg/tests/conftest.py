"""Test configuration and fixtures."""

import pytest
from click.testing import CliRunner

from unitary_dual_lab.config.manager import LabConfig
from unitary_dual_lab.logging.metrics import get_metrics_collector
from unitary_dual_lab.moments.free_engine import FreeMomentEngine, reset_default_engine
from unitary_dual_lab.simulation.unitary_sim import SimConfig

ENV_VARS = [
    "UDL_PATHS",
    "UDL_DT",
    "UDL_SEED",
    "UDL_SCHEME",
    "UDL_WORKERS",
    "UDL_CHUNK_SIZE",
    "UDL_MAX_STATES",
    "UDL_RTOL",
    "UDL_DENSE_CROSSOVER",
    "UDL_LOG_LEVEL",
]


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    """Keep UDL_* variables of the calling shell and cached moments out of the tests."""
    for name in ENV_VARS:
        monkeypatch.delenv(name, raising=False)
    get_metrics_collector().reset()
    reset_default_engine()
    yield


@pytest.fixture
def engine():
    """A fresh free engine with its own memo."""
    return FreeMomentEngine()


@pytest.fixture
def small_sim_config():
    """A cheap Monte Carlo configuration."""
    return SimConfig(n=2, d=2, dt=0.05, paths=64, seed=7, chunk_size=16)


@pytest.fixture
def lab_config():
    """Default run configuration."""
    return LabConfig()


@pytest.fixture
def temp_config_dir(tmp_path):
    """Create a temporary configuration directory."""
    config_dir = tmp_path / "config"
    config_dir.mkdir()
    return config_dir


@pytest.fixture
def runner():
    """Click test runner."""
    return CliRunner()


@pytest.fixture
def cli_args(temp_config_dir):
    """Global options isolating a CLI run from the saved user configuration."""
    return ["--config-dir", str(temp_config_dir)]
