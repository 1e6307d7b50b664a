import functools
import logging

import numpy as np
import pytest
from hypothesis import settings

from colloc_hum.operators1d import build_discretization

settings.register_profile("default", max_examples=25, deadline=None)
settings.load_profile("default")

# the sub-threshold T warnings are expected throughout
logging.getLogger("colloc_hum").setLevel(logging.ERROR)


@functools.lru_cache(maxsize=None)
def disc(order):
    return build_discretization(order)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
