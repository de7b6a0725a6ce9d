import math

import numpy as np
import pytest

from supnorm_lab.field import GridFunction, make_grid


@pytest.fixture
def wide_grid():
    return make_grid(-20.0, 20.0, 4096)


@pytest.fixture
def gaussian(wide_grid):
    return GridFunction.from_callable(wide_grid, lambda x: np.exp(-x * x))


def heat_gaussian(x, t):
    """Exact heat-equation solution started from ``exp(-x^2)``."""
    s = 1.0 + 4.0 * t
    return np.exp(-x * x / s) / math.sqrt(s)
