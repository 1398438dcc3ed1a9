import math

import pytest

from grid_calculus import TorusGrid
from output_client import OutputClient
from symbol import laplacian_pow_k


@pytest.fixture
def client(tmp_path):
    return OutputClient(tmp_path / "out", {"test": True}, seed=7)


@pytest.fixture
def line_grid():
    return TorusGrid(1, 64, 2 * math.pi)


@pytest.fixture
def plane_grid():
    return TorusGrid(2, 16, 2 * math.pi)


@pytest.fixture
def laplacian_2d():
    return laplacian_pow_k(2, 1)
