import numpy as np
import pytest
from hypothesis import settings

from locc_lab.families import gen_example1, gen_example2, gen_theorem3

settings.register_profile("default", deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def example1():
    return gen_example1()


@pytest.fixture(scope="session")
def example2():
    return gen_example2()


@pytest.fixture(scope="session")
def t3_222():
    return gen_theorem3(2, 2, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
