import sys

import numpy as np
import pytest

from vml.fields import PhysParams
from vml.grid import make_grid

TWO_PI = 2 * np.pi


@pytest.fixture
def params():
    return PhysParams()


@pytest.fixture
def grid2pi():
    """l_q = 2 pi, p_max = 8, fd4."""
    return make_grid(64, 128, TWO_PI, 8.0)


@pytest.fixture
def grid2pi_spectral():
    return make_grid(64, 128, TWO_PI, 8.0, "spectral")


@pytest.fixture
def landau_grid():
    """The Landau box at a size cheap enough for unit tests."""
    return make_grid(64, 128, 4 * np.pi, 8.0)


def gaussian_modes(grid, rng, n_modes=3, decay=0.5):
    """Random smooth field: q-band-limited, Gaussian in p."""
    k0 = TWO_PI / grid.l_q
    out = np.zeros(grid.shape)
    for j in range(n_modes + 1):
        for power in range(3):
            a, b = rng.normal(size=2)
            out += (a * np.cos(j * k0 * grid.Q) + b * np.sin(j * k0 * grid.Q)) * grid.P**power
    return out * np.exp(-decay * grid.P**2) / 4


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        passed, detail = results[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
