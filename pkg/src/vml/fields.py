"""Momentum one-forms on phase space and the operations that act on them.

A momentum field is the one-form ``Pi = pi_q dq + pi_p dp``.  Its density
is ``f = d(pi_q)/dp - d(pi_p)/dq``; adding an exact form ``d(chi)`` leaves
``f`` unchanged.

Bracket convention: ``{a, b} = a_q b_p - a_p b_q``.  With it the density of
the Clebsch form ``alpha d(beta)`` is ``{beta, alpha}``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _accel
from .grid import Grid


@dataclass(frozen=True)
class PhysParams:
    e: float = 1.0
    m: float = 1.0
    neutralize: bool = True

    def __post_init__(self):
        if not np.isfinite(self.e):
            raise ValueError(f"charge must be finite, got {self.e!r}")
        if not (np.isfinite(self.m) and self.m > 0):
            raise ValueError(f"mass must be positive, got {self.m!r}")


@dataclass(frozen=True)
class MomentumField:
    """Components of the one-form: ``pi_q`` (dq part), ``pi_p`` (dp part)."""

    pi_q: np.ndarray
    pi_p: np.ndarray

    def __post_init__(self):
        if np.shape(self.pi_q) != np.shape(self.pi_p):
            raise ValueError(f"component shapes differ: {np.shape(self.pi_q)} vs {np.shape(self.pi_p)}")

    def __add__(self, other):
        return MomentumField(self.pi_q + other.pi_q, self.pi_p + other.pi_p)

    def __sub__(self, other):
        return MomentumField(self.pi_q - other.pi_q, self.pi_p - other.pi_p)

    def __mul__(self, c):
        return MomentumField(c * self.pi_q, c * self.pi_p)

    __rmul__ = __mul__

    def __neg__(self):
        return MomentumField(-self.pi_q, -self.pi_p)

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.pi_q).all() and np.isfinite(self.pi_p).all())

    def max_abs(self) -> float:
        return float(max(np.abs(self.pi_q).max(), np.abs(self.pi_p).max()))

    @classmethod
    def zeros(cls, grid: Grid):
        return cls(grid.zeros(), grid.zeros())


@dataclass(frozen=True)
class ClebschPair:
    alpha: np.ndarray
    beta: np.ndarray


def extract_density(grid: Grid, pi: MomentumField):
    """f = d(pi_q)/dp - d(pi_p)/dq."""
    return grid.ddp(pi.pi_q) - grid.ddq(pi.pi_p)


def clebsch_momentum(grid: Grid, pair: ClebschPair) -> MomentumField:
    """The one-form alpha d(beta)."""
    return MomentumField(pair.alpha * grid.ddq(pair.beta), pair.alpha * grid.ddp(pair.beta))


def canonical_bracket(grid: Grid, a, b):
    a_q, a_p = grid.ddq(a), grid.ddp(a)
    b_q, b_p = grid.ddq(b), grid.ddp(b)
    return _accel.cross(a_q, b_p, a_p, b_q)


def gauge_shift(grid: Grid, pi: MomentumField, chi) -> MomentumField:
    """Add the exact one-form d(chi)."""
    return MomentumField(pi.pi_q + grid.ddq(chi), pi.pi_p + grid.ddp(chi))


def hamiltonian_vector_field(grid: Grid, h):
    """Components (u, v) = (dh/dp, -dh/dq); X_h acts as u d/dq + v d/dp."""
    return grid.ddp(h), -grid.ddq(h)


def particle_flow(grid: Grid, phi, params: PhysParams):
    """X_h for h = p^2/2m + e*phi(q), with the p-derivative taken exactly.

    Returned as broadcast-ready arrays: u has shape (1, n_p), v (n_q, 1).
    """
    u = grid.P / params.m
    v = -params.e * grid.ddq(phi)[:, None]
    return u, v


def apply_vector_field(grid: Grid, u, v, x, x_q=None, x_p=None):
    """(u d/dq + v d/dp) x; precomputed derivatives of x may be passed in."""
    if x_q is None:
        x_q = grid.ddq(x)
    if x_p is None:
        x_p = grid.ddp(x)
    return _accel.advect(u, x_q, v, x_p)


def min_density(f) -> float:
    """Smallest value of f on the grid; a positivity diagnostic only."""
    return float(np.min(f))
