"""Vlasov equation for the phase-space density f."""
from __future__ import annotations

import numpy as np

from . import _accel
from .fields import PhysParams, particle_flow
from .grid import Grid
from .poisson import solve_poisson_spectral
from .timestep import check_dt, guarded_rk4


def potential_from_density(grid: Grid, f, params: PhysParams):
    return solve_poisson_spectral(grid, grid.integrate_p(f), params)


def vlasov_rhs(grid: Grid, f, params: PhysParams, phi=None):
    """df/dt = -(p/m) f_q + e phi' f_p with the self-consistent phi."""
    if phi is None:
        phi = potential_from_density(grid, f, params)
    u, v = particle_flow(grid, phi, params)
    rate = _accel.advect(-u, grid.ddq(f), -v, grid.ddp(f))
    return grid.dealias_q(rate)


def apply_jlp_f(grid: Grid, f, g):
    """Lie-Poisson operator of the density acting on g: f_p g_q - f_q g_p."""
    return _accel.cross(grid.ddp(f), grid.ddq(g), grid.ddq(f), grid.ddp(g))


def step_rk4_density(grid: Grid, f, dt, params: PhysParams, step=None):
    """One RK4 step; warns above the advisory dt bound, raises on NaN/inf."""
    if dt > 0:
        check_dt(grid, potential_from_density(grid, f, params), dt, params)
    (out,) = guarded_rk4(lambda y: (vlasov_rhs(grid, y[0], params),), (np.asarray(f, dtype=np.float64),), dt, step)
    return out
