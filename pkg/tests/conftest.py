import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("kfgm", max_examples=40, deadline=None)
settings.load_profile("kfgm")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_complex_matrix(rng, shape=(2, 2)):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)
