import numpy as np
import pytest

from cgwitness import GaussianTwoPhotonState, OpticalGeometry
from cgwitness.binning import BinGrid, DiscreteDistribution


@pytest.fixture
def geometry():
    return OpticalGeometry()


@pytest.fixture
def entangled_state():
    return GaussianTwoPhotonState(10.0, 2.5)


@pytest.fixture
def separable_state():
    return GaussianTwoPhotonState(1.0, 1.0)


def random_discrete(rng, *, max_bins: int = 40) -> DiscreteDistribution:
    """A random normalized discrete distribution on a random grid."""
    n = int(rng.integers(3, max_bins + 1))
    width = float(10.0 ** rng.uniform(-2.0, 0.5))
    j_min = int(rng.integers(-25, 5))
    masses = rng.gamma(0.7, size=n) + 1e-12
    masses /= masses.sum()
    return DiscreteDistribution(BinGrid(width, j_min, j_min + n - 1), masses)
