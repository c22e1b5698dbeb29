import sys

import numpy as np
import pytest

from maxplus_lab.function_space import Grid, GridFunction


def dyadic_values(rng: np.random.Generator, size, bottom_fraction: float = 0.0) -> np.ndarray:
    """Multiples of 2**-10 in [-8, 8]; sums and differences of these are exact."""
    v = rng.integers(-8 * 1024, 8 * 1024 + 1, size=size) / 1024.0
    if bottom_fraction:
        v = np.where(rng.random(size) < bottom_fraction, -np.inf, v)
    return v


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def grid():
    return Grid(-1.0, 1.0, 64)


@pytest.fixture
def periodic_grid():
    return Grid(-1.0, 1.0, 128, periodic=True)


@pytest.fixture
def dyadic_function(rng, grid):
    def make(bottom_fraction=0.0):
        return GridFunction(grid, dyadic_values(rng, grid.n, bottom_fraction))

    return make


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
