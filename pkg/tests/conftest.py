import numpy as np
import pytest

from detnodes import Domain, ScalarField, eigen_laplacian, make_grid


@pytest.fixture(scope="session")
def unit_grid_128():
    """Unit square, 128 intervals per side (lattice contains (0.5, 0.5))."""
    return make_grid(Domain(1.0, 1.0), 127, 127)


@pytest.fixture(scope="session")
def unit_grid_64():
    return make_grid(Domain(1.0, 1.0), 63, 63)


@pytest.fixture(scope="session")
def first_eigenfield_128(unit_grid_128):
    _, e1 = eigen_laplacian(unit_grid_128, 1, 1)
    return e1


def random_fields(grid, count, seed=0, scale=1.0):
    """Plain seeded Gaussian nodal fields (rough, for generic-property tests)."""
    rng = np.random.default_rng(seed)
    return [ScalarField(grid, scale * rng.standard_normal(grid.shape)) for _ in range(count)]
