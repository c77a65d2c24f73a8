import numpy as np
import pytest

from mixfourier import GaussianMixture


THREE_MEANS = np.array([0.3, 1.0, 1.6]) * np.pi


@pytest.fixture
def three_model():
    return GaussianMixture.from_v(THREE_MEANS, np.full(3, 1 / 3), 0.45)


@pytest.fixture
def two_component():
    return GaussianMixture([-0.5, 0.5], [0.5, 0.5], 1.0)
