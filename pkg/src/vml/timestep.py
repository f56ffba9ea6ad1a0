"""Classical RK4 shared by every formulation.

States are tuples of equally shaped 2D arrays; the rate function maps a
state tuple to a rate tuple.
"""
from __future__ import annotations

import warnings

import numpy as np

from . import _accel
from .poisson import NonFiniteError


class StabilityWarning(RuntimeWarning):
    """dt exceeds the advisory advection bound."""


def rk4_step(rate, y, dt):
    if dt < 0 or not np.isfinite(dt):
        raise ValueError(f"time step must be finite and >= 0, got {dt!r}")
    if dt == 0:
        return tuple(a.copy() for a in y)
    h = 0.5 * dt
    k1 = rate(y)
    k2 = rate(tuple(_accel.axpy(a, k, h) for a, k in zip(y, k1)))
    k3 = rate(tuple(_accel.axpy(a, k, h) for a, k in zip(y, k2)))
    k4 = rate(tuple(_accel.axpy(a, k, dt) for a, k in zip(y, k3)))
    return tuple(_accel.rk4_combine(a, b1, b2, b3, b4, dt) for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4))


def stable_dt(grid, dphi_max, params) -> float:
    """Advisory bound 0.5*min(dq*m/p_max, dp/(|e|*max|phi'|))."""
    bound = grid.dq * params.m / grid.p_max
    force = abs(params.e) * dphi_max
    if force > 0:
        bound = min(bound, grid.dp / force)
    return 0.5 * bound


def check_dt(grid, phi, dt, params, stacklevel=3):
    bound = stable_dt(grid, float(np.abs(grid.ddq(phi)).max()), params)
    if dt > bound:
        warnings.warn(f"dt={dt:g} exceeds the advisory stability bound {bound:.3g}", StabilityWarning, stacklevel=stacklevel)
    return bound


def guarded_rk4(rate, y, dt, step=None):
    """rk4_step that reports any non-finite value, even one met inside a stage, at ``step``."""
    try:
        out = rk4_step(rate, y, dt)
    except NonFiniteError as exc:
        where = "" if step is None else f" at step {step}"
        raise NonFiniteError(f"non-finite state{where}", step) from exc
    ensure_finite(out, step)
    return out


def ensure_finite(arrays, step=None):
    for a in arrays:
        if not np.isfinite(a).all():
            where = "" if step is None else f" at step {step}"
            raise NonFiniteError(f"non-finite state{where}", step)
