"""Built-in initial conditions."""
from __future__ import annotations

import numpy as np

from .grid import Grid

PLASMA_SCENARIOS = ("uniform", "landau", "two_stream", "gauge_demo")
FLUID_SCENARIOS = ("taylor_green",)
SCENARIOS = PLASMA_SCENARIOS + FLUID_SCENARIOS


def maxwellian(p, vt=1.0, drift=0.0):
    return np.exp(-0.5 * ((p - drift) / vt) ** 2) / (np.sqrt(2 * np.pi) * vt)


def uniform(grid: Grid, n0=1.0, vt=1.0):
    return n0 * maxwellian(grid.P, vt) + 0.0 * grid.Q


def landau(grid: Grid, epsilon=0.05, k=0.5, n0=1.0, vt=1.0):
    return n0 * (1 + epsilon * np.cos(k * grid.Q)) * maxwellian(grid.P, vt)


def two_stream(grid: Grid, v0=2.0, epsilon=1e-3, k=0.25, n0=1.0, vt=1.0):
    beams = 0.5 * (maxwellian(grid.P, vt, v0) + maxwellian(grid.P, vt, -v0))
    return n0 * (1 + epsilon * np.cos(k * grid.Q)) * beams


def gauge_function(grid: Grid, amplitude=0.1, k=0.5):
    """chi = A sin(kq) exp(-p^2): the exact one-form d(chi) added by gauge_demo."""
    return amplitude * np.sin(k * grid.Q) * np.exp(-grid.P**2)


def check_wavenumber(grid: Grid, k):
    """k must fit the periodic box."""
    n = k * grid.l_q / (2 * np.pi)
    if abs(n - round(n)) > 1e-9 or round(n) == 0:
        raise ValueError(f"wavenumber {k} is not a nonzero multiple of 2*pi/l_q = {2 * np.pi / grid.l_q:.6g}")
