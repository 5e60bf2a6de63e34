import numpy as np
import pytest

from pilotopt import (
    GridConfig,
    ScatteringSpec,
    build_statistics,
    make_design_problem,
)


@pytest.fixture(scope="session")
def grid_4x4():
    return GridConfig(4, 4)


@pytest.fixture(scope="session")
def spec_4x4():
    # Uniform profiles keep the tiny-grid oracle arithmetic transparent.
    return ScatteringSpec(
        spreading_factor=0.09,
        normalized_delay_spread=0.3,
        normalized_doppler_spread=0.3,
        delay_profile="uniform",
        doppler_spectrum="uniform",
    )


@pytest.fixture(scope="session")
def stats_4x4(grid_4x4, spec_4x4):
    return build_statistics(grid_4x4, spec_4x4)


@pytest.fixture(scope="session")
def problem_4x4(stats_4x4):
    return make_design_problem(stats_4x4, K=3, snr_db=10.0)


@pytest.fixture(scope="session")
def grid_rb():
    """A 5G-style resource block grid."""
    return GridConfig(12, 14)


@pytest.fixture(scope="session")
def stats_rb(grid_rb):
    return build_statistics(grid_rb, ScatteringSpec(spreading_factor=0.001))


@pytest.fixture(scope="session")
def problem_rb(stats_rb):
    return make_design_problem(stats_rb, K=14, snr_db=10.0)


@pytest.fixture
def rng():
    return np.random.default_rng(42)
