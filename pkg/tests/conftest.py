# tests/conftest.py
import math
from functools import lru_cache

import pytest

from exact import exact_eigensystem
from models import coherent_field, reduced_time_grid

ALPHA_SQ = 10.0


@lru_cache(maxsize=None)
def cached_eigensystem(g, n_cut):
    return exact_eigensystem(g, n_cut)


@pytest.fixture(scope='session')
def field():
    return coherent_field(math.sqrt(ALPHA_SQ))


@pytest.fixture(scope='session')
def small_field():
    return coherent_field(1.0)


@pytest.fixture
def grid_40():
    def make(g, n_points=4001):
        return reduced_time_grid(40.0, n_points, g)
    return make


@pytest.fixture(scope='session')
def eigensystem():
    return cached_eigensystem
