"""Periodic Poisson problem for the electrostatic potential.

The potential solves ``phi'' = -e (rho - mean(rho))``: a uniform
neutralising background makes the periodic problem solvable, and the
potential is fixed to have zero mean.  With ``neutralize=False`` the charge
must already be mean-free.
"""
from __future__ import annotations

import numpy as np
import scipy.fft as sfft

from . import _accel
from .fields import MomentumField, PhysParams
from .grid import Grid


class NonFiniteError(FloatingPointError):
    """Raised when a solver or integrator meets NaN or infinite values."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


def _mean_free(grid: Grid, rho, params: PhysParams):
    rho = np.asarray(rho, dtype=np.float64)
    if rho.shape != (grid.n_q,):
        raise ValueError(f"charge density must have shape ({grid.n_q},), got {rho.shape}")
    if not np.isfinite(rho).all():
        raise NonFiniteError("charge density contains non-finite values")
    mean = rho.mean()
    if params.neutralize:
        return rho - mean
    if abs(mean) > 1e-12 * max(1.0, np.abs(rho).max()):
        raise ValueError(f"charge density has mean {mean:.3e}; enable neutralize or supply mean-free charge")
    return rho


def solve_poisson_spectral(grid: Grid, rho, params: PhysParams):
    if grid.n_q < 4:
        raise ValueError("need at least 4 points in q")
    src = _mean_free(grid, rho, params)
    sh = sfft.rfft(src, workers=_accel.FFT_WORKERS)
    k2 = grid.kq**2
    k2[0] = 1.0
    sh = params.e * sh / k2
    sh[0] = 0.0
    return sfft.irfft(sh, n=grid.n_q, workers=_accel.FFT_WORKERS)


def greens_kernel(grid: Grid):
    """Matrix K with phi = e * K @ (rho - mean) * dq.

    K is the inverse of the spectral minus-Laplacian on mean-free functions,
    divided by dq; it is symmetric and translation invariant.
    """
    n = grid.n_q
    k2 = grid.kq**2
    inv = np.zeros_like(k2)
    inv[1:] = 1.0 / k2[1:]
    # response to a unit spike at q=0; the operator is circulant
    col = sfft.irfft(inv, n=n) / grid.dq
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    K = col[idx]
    return 0.5 * (K + K.T)


def kernel_solve(grid: Grid, K, rho, params: PhysParams):
    src = _mean_free(grid, rho, params)
    return params.e * (K @ src) * grid.dq


def constraint_residual(grid: Grid, phi, f, params: PhysParams):
    """phi'' + e (int f dp - background); zero on the constraint surface."""
    rho = grid.integrate_p(f)
    background = rho.mean() if params.neutralize else 0.0
    return grid.d2dq(phi) + params.e * (rho - background)


def momentum_charge(grid: Grid, pi: MomentumField):
    """Charge density carried by pi_p alone: -int d(pi_p)/dq dp."""
    return -grid.integrate_p(grid.ddq(pi.pi_p))


def potential_from_momentum(grid: Grid, pi: MomentumField, params: PhysParams):
    """phi with phi'' = e * int d(pi_p)/dq dp (neutralised, zero mean)."""
    return solve_poisson_spectral(grid, momentum_charge(grid, pi), params)
