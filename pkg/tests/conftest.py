"""Shared fixtures: the bundled dataset and a default device table.

Both are expensive enough to build once per session; all consumers
treat them as read-only.
"""

import numpy as np
import pytest

from rramsnn.dataset import load_iris, normalize
from rramsnn.device import default_memristor, default_pulse, table_from_model


@pytest.fixture(scope="session")
def iris():
    return load_iris()


@pytest.fixture(scope="session")
def iris_norm(iris):
    return normalize(iris)


@pytest.fixture(scope="session")
def pulse():
    return default_pulse()


@pytest.fixture(scope="session")
def memristor():
    return default_memristor()


@pytest.fixture(scope="session")
def device_table(memristor, pulse):
    return table_from_model(memristor, pulse, pulse)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
