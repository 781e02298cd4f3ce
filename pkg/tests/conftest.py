import numpy as np
import pytest

from nilgeom import builtin_group, default_norm


@pytest.fixture(scope="session")
def heis():
    return builtin_group("heisenberg")


@pytest.fixture(scope="session")
def engel():
    return builtin_group("engel")


@pytest.fixture(scope="session")
def ab2():
    return builtin_group("abelian2")


@pytest.fixture(scope="session")
def heis_norm(heis):
    return default_norm(heis)


@pytest.fixture(scope="session")
def engel_norm(engel):
    return default_norm(engel)


@pytest.fixture(scope="session")
def ab2_norm(ab2):
    return default_norm(ab2)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
