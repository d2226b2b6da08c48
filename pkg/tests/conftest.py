import numpy as np
import pytest


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260809)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running reproduction checks")
