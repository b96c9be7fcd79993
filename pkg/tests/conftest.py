import numpy as np
import pytest

from swbench.config import ConfigSingleton
from swbench.spectral.grid import PeriodicGrid


@pytest.fixture(autouse=True)
def reset_config():
    ConfigSingleton.reset()
    yield
    ConfigSingleton.reset()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def grid() -> PeriodicGrid:
    return PeriodicGrid(d=2, N=32)


@pytest.fixture
def grid64() -> PeriodicGrid:
    return PeriodicGrid(d=2, N=64)


@pytest.fixture
def line() -> PeriodicGrid:
    return PeriodicGrid(d=1, N=32)
