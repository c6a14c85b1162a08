import numpy as np
import pytest

from tendonhand.calibration import calibrated_default_hand
from tendonhand.hand_model import build_default_hand


@pytest.fixture(scope="session")
def default_hand():
    return build_default_hand()


@pytest.fixture(scope="session")
def calibrated_hand():
    return calibrated_default_hand()


@pytest.fixture()
def rng():
    return np.random.default_rng(20260809)
