import numpy as np
import pytest

from flexloss import SystemParams


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def base_params():
    return SystemParams(1.0, 0.5, 0.45)
