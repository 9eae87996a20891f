import numpy as np
import pytest

from collkit import KernelSpec, QuadratureScheme
from collkit.fields import gaussian_field


def b_ones(x):
    return np.ones_like(np.asarray(x, dtype=float))


def b_cos2(x):
    return 1.0 - np.asarray(x, dtype=float) ** 2


@pytest.fixture(scope="session")
def q_fast():
    """Coarse scheme for smoke-level checks."""
    return QuadratureScheme(radial_nodes=8, angular_nodes=8, hyperplane_nodes=10)


@pytest.fixture(scope="session")
def q_default():
    return QuadratureScheme()


@pytest.fixture(scope="session")
def maxwellian():
    return gaussian_field()


@pytest.fixture(scope="session")
def kernel_boltzmann_g0():
    return KernelSpec(dim=3, gamma=0.0, operator="boltzmann", b=b_ones)
