import sys
from pathlib import Path

import numpy as np
import pytest

# Add the project directory to path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from generators import grid_complex, hypothesis_counterexample  # noqa: E402
from planar_complex import build_complex  # noqa: E402
from settings import Settings  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-size acceptance suites")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def settings():
    return Settings()


@pytest.fixture
def random_x0_settings(tmp_path):
    config = tmp_path / "config.json"
    config.write_text('{"removal": {"x0_selection": "random", "seed": 7}}')
    return Settings(config_path=str(config))


@pytest.fixture
def unit_square():
    """One square face, vertices counterclockwise from the origin"""
    coords = {0: (0.0, 0.0), 1: (1.0, 0.0), 2: (1.0, 1.0), 3: (0.0, 1.0)}
    return build_complex(coords, [(0, 1), (1, 2), (2, 3), (3, 0)])


@pytest.fixture
def grid_2x2():
    """3 × 3 vertices; vertex (ix, iy) has id 3 * ix + iy"""
    return grid_complex(None, 2, 2)


@pytest.fixture(params=[1, 2, 3])
def counterexample(request):
    return request.param, hypothesis_counterexample(request.param, 0.1)
