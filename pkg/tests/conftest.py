import math

import numpy as np
import pytest

from electroconv import spectral as sp


@pytest.fixture
def g16():
    return sp.make_grid(16, math.pi)


@pytest.fixture
def g32():
    return sp.make_grid(32, math.pi)


def physical(grid, fn):
    """Sample ``fn(x1, x2)`` on the grid and return its coefficients."""
    x1, x2 = grid.coords()
    return sp.forward(grid, fn(x1, x2))


def max_abs(a):
    return float(np.max(np.abs(a)))
