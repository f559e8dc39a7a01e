import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240)


def philox(seed, tag=0):
    return np.random.Generator(np.random.Philox(key=[seed, tag]))
