"""
Pytest configuration and fixtures for the causal Green's function toolkit tests
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to Python path for all tests
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from core.grid import make_grid
from core.operator import DifferentialOperator
from services import reference_kernels


@pytest.fixture(scope="session")
def project_root_path():
    """Return the project root path"""
    return project_root


@pytest.fixture(scope="session")
def unit_grid():
    """[0, 1] with the default 400 intervals"""
    return make_grid(0.0, 1.0, 400)


@pytest.fixture(scope="session")
def coarse_grid():
    """[0, 1] with 64 intervals, for quick structural checks"""
    return make_grid(0.0, 1.0, 64)


@pytest.fixture(scope="session")
def cosh_operator():
    """d^2 - 1"""
    return DifferentialOperator.from_constants([-1.0, 0.0])


@pytest.fixture(scope="session")
def airy_operator():
    """d^2 - x"""
    return DifferentialOperator((lambda x: -x, lambda x: 0.0), ('-x', '0'))


@pytest.fixture(scope="session")
def erfi_operator():
    """d^2 + 3x d + 2x^2 + 2 = (d + x)(d + 2x)"""
    return DifferentialOperator((lambda x: 2.0 * x * x + 2.0, lambda x: 3.0 * x), ('2*x^2+2', '3*x'))


@pytest.fixture(scope="session")
def references():
    """Closed-form and integrator oracles"""
    return reference_kernels


@pytest.fixture
def rng():
    """Seeded generator so randomized tests are reproducible"""
    return np.random.default_rng(20240611)


def pytest_configure(config):
    """Configure pytest with custom markers"""
    config.addinivalue_line(
        "markers", "slow: marks tests as slow (deselect with '-m \"not slow\"')"
    )
    config.addinivalue_line(
        "markers", "integration: marks tests as integration tests"
    )
    config.addinivalue_line(
        "markers", "unit: marks tests as unit tests"
    )
    config.addinivalue_line(
        "markers", "acceptance: marks tests reproducing the closed-form acceptance cases"
    )
    config.addinivalue_line(
        "markers", "property: marks randomized invariant tests"
    )


def pytest_collection_modifyitems(config, items):
    """Add markers based on the test module"""
    for item in items:
        if "test_acceptance" in item.nodeid:
            item.add_marker(pytest.mark.acceptance)
            item.add_marker(pytest.mark.slow)
        elif "test_properties" in item.nodeid:
            item.add_marker(pytest.mark.property)
        elif "test_cli" in item.nodeid:
            item.add_marker(pytest.mark.integration)
        else:
            item.add_marker(pytest.mark.unit)
