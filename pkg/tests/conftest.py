"""
spinbath Test Configuration

Pytest configuration and fixtures for the spinbath test suite.
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from spinbath.physics import SpinBosonModel, pure_state, thermal_env_state  # noqa: E402


# ============================================================================
# Fixtures
# ============================================================================

@pytest.fixture(scope="session")
def project_root() -> Path:
    """Return the project root directory."""
    return Path(__file__).parent.parent


@pytest.fixture(scope="session")
def reference_model() -> SpinBosonModel:
    """g = 4, omega = 10, t = 0.1, cutoff 10, one qubit."""
    return SpinBosonModel.with_scalar_coupling(g=4.0, omega=10.0, cutoff=10, dt=0.1)


@pytest.fixture(scope="session")
def small_model() -> SpinBosonModel:
    """Reference couplings at cutoff 8, the size used for the trajectory oracle."""
    return SpinBosonModel.with_scalar_coupling(g=4.0, omega=10.0, cutoff=8, dt=0.1)


@pytest.fixture(scope="session")
def commuting_model() -> SpinBosonModel:
    """omega = 0: all block Hamiltonians commute."""
    return SpinBosonModel.with_scalar_coupling(g=4.0, omega=0.0, cutoff=10, dt=0.1)


@pytest.fixture(scope="session")
def free_model() -> SpinBosonModel:
    """No coupling."""
    return SpinBosonModel.with_scalar_coupling(g=0.0, omega=10.0, cutoff=6, dt=0.1)


@pytest.fixture(scope="session")
def two_qubit_model() -> SpinBosonModel:
    return SpinBosonModel.with_scalar_coupling(g=4.0, omega=10.0, cutoff=6, dt=0.1, n_qubits=2)


def ground_bath(model: SpinBosonModel) -> np.ndarray:
    return thermal_env_state(model.env, math.inf).matrix


@pytest.fixture
def bath():
    """Callable returning the ground-state bath of a model."""
    return ground_bath


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def ket0() -> np.ndarray:
    return pure_state([1.0, 0.0])


# ============================================================================
# Configuration
# ============================================================================

def pytest_collection_modifyitems(config, items):
    """Modify test collection based on markers."""
    if not config.getoption("--run-slow"):
        skip_slow = pytest.mark.skip(reason="need --run-slow option to run")
        for item in items:
            if "slow" in item.keywords:
                item.add_marker(skip_slow)


def pytest_addoption(parser):
    """Add custom command line options."""
    parser.addoption(
        "--run-slow",
        action="store_true",
        default=False,
        help="run slow tests"
    )
