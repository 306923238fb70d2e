import numpy as np
import pytest

from hartree4d import RadialField, RadialGrid, solve_ground_state


@pytest.fixture(scope="session")
def grid_small():
    return RadialGrid(512, 16.0)


@pytest.fixture(scope="session")
def grid_mid():
    return RadialGrid(1024, 32.0)


@pytest.fixture(scope="session")
def ground_state_mid(grid_mid):
    """Shared n=1024 ground state; unit tests assert against this one."""
    return solve_ground_state(grid_mid, tol=1e-6)


@pytest.fixture()
def gaussian_small(grid_small):
    return RadialField(grid_small, np.exp(-grid_small.r**2 / 2.0))
