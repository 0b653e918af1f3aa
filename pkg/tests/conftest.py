import numpy as np
import pytest

from resonant_disk.eigen import first_eigenpair
from resonant_disk.grid import make_grid
from resonant_disk.laplacian import assemble_laplacian
from resonant_disk.nonlinear import make_problem

J01 = 2.404825557695773
J02 = 5.520078110286311
LAMBDA1_REF = 5.783185962946785


@pytest.fixture(scope="session")
def grid512():
    return make_grid(512)


@pytest.fixture(scope="session")
def lap512(grid512):
    return assemble_laplacian(grid512)


@pytest.fixture(scope="session")
def eig512(lap512):
    return first_eigenpair(lap512)


@pytest.fixture(scope="session")
def problem512():
    """Problem data at n = 512 with f = 0; attach a forcing with ``with_forcing``."""
    return make_problem(512)


@pytest.fixture(scope="session")
def problem64():
    return make_problem(64)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def random_dirichlet(g, rng, scale=1.0):
    u = scale * rng.normal(size=g.size)
    u[-1] = 0.0
    return u
