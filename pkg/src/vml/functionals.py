"""Energy functionals, Lie-Poisson operators and Casimirs.

The plasma energy is ``H(f) = int f (p^2/2m + (e/2) phi_f) dmu``.  Because
``phi_f`` is linear in f and the Green's function is symmetric, its
variational derivative carries the full single-particle Hamiltonian
``p^2/2m + e phi_f``: the half in the integrand is doubled.  Both constants
appear below on purpose.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import _accel
from .density import apply_jlp_f, potential_from_density
from .fields import MomentumField, PhysParams, extract_density, hamiltonian_vector_field, particle_flow
from .grid import Grid
from .momentum import phi_gradient_term, potential_of, h0_functional

FUNCTIONALS = ("h_lp_f", "h_lp_pi", "h0")


class Casimirs(NamedTuple):
    mass: float
    l2: float


def energy_hamiltonian(grid: Grid, phi, params: PhysParams):
    """h_f = p^2/2m + (e/2) phi: the integrand weight of the energy."""
    return grid.P**2 / (2 * params.m) + 0.5 * params.e * phi[:, None]


def h_lp_f(grid: Grid, f, params: PhysParams) -> float:
    phi = potential_from_density(grid, f, params)
    return grid.integrate_qp(f * energy_hamiltonian(grid, phi, params))


def h_lp_pi(grid: Grid, pi: MomentumField, params: PhysParams) -> float:
    """int( -dh_f/dp pi_q + dh_f/dq pi_p ) dmu with phi from the extracted density."""
    phi = potential_of(grid, pi, params)
    dh_dp = grid.P / params.m
    dh_dq = 0.5 * params.e * grid.ddq(phi)[:, None]
    return grid.integrate_qp(-dh_dp * pi.pi_q + dh_dq * pi.pi_p)


def energy_boundary_correction(grid: Grid, pi: MomentumField, params: PhysParams) -> float:
    """p-boundary flux of h_f * pi_q; h_lp_f(f) = h_lp_pi(pi) + this."""
    phi = potential_of(grid, pi, params)
    return grid.boundary_flux(energy_hamiltonian(grid, phi, params), pi.pi_q)


def apply_jlp_pi(grid: Grid, pi: MomentumField, X, form="advective") -> MomentumField:
    """Minus the Lie derivative of the one-form pi along the vector field X = (u, v).

    ``form`` picks the same discretisations as the momentum flow; the
    ``cartan`` form uses i_X(dpi) + d(pi.X) and is exact for any X.
    """
    u = np.broadcast_to(np.asarray(X[0], dtype=np.float64), grid.shape)
    v = np.broadcast_to(np.asarray(X[1], dtype=np.float64), grid.shape)
    if form == "cartan":
        f = extract_density(grid, pi)
        s = _accel.advect(u, pi.pi_q, v, pi.pi_p)
        return MomentumField(-(f * v) - grid.ddq(s), f * u - grid.ddp(s))
    u_q, u_p = grid.ddq(u), grid.ddp(u)
    v_q, v_p = grid.ddq(v), grid.ddp(v)
    rate_q = -_accel.advect(u, grid.ddq(pi.pi_q), v, grid.ddp(pi.pi_q)) - _accel.advect(pi.pi_q, u_q, pi.pi_p, v_q)
    rate_p = -_accel.advect(u, grid.ddq(pi.pi_p), v, grid.ddp(pi.pi_p)) - _accel.advect(pi.pi_q, u_p, pi.pi_p, v_p)
    return MomentumField(rate_q, rate_p)


def jacobi_lie_bracket(grid: Grid, X, Y):
    """[X, Y] = (X.grad) Y - (Y.grad) X for vector fields given as (u, v)."""
    out = []
    for a, b in zip(Y, X):
        xa = _accel.advect(X[0], grid.ddq(a), X[1], grid.ddp(a))
        yb = _accel.advect(Y[0], grid.ddq(b), Y[1], grid.ddp(b))
        out.append(xa - yb)
    return tuple(out)


def lie_poisson_bracket(grid: Grid, pi: MomentumField, h, k) -> float:
    """int pi . [X_h, X_k] dmu."""
    w = jacobi_lie_bracket(grid, hamiltonian_vector_field(grid, h), hamiltonian_vector_field(grid, k))
    return grid.integrate_qp(pi.pi_q * w[0] + pi.pi_p * w[1])


def transform_check(grid: Grid, pi: MomentumField, k, form="advective") -> float:
    """Max difference between J(f) k and D_f J(pi) D_f* k."""
    f = extract_density(grid, pi)
    direct = apply_jlp_f(grid, f, k)
    rate = apply_jlp_pi(grid, pi, hamiltonian_vector_field(grid, k), form)
    via = extract_density(grid, rate)
    return float(np.abs(direct - via).max())


def casimirs(grid: Grid, f) -> Casimirs:
    return Casimirs(grid.integrate_qp(f), grid.integrate_qp(np.asarray(f) ** 2))


# -------------------------------------------------------------- derivatives


def variational_derivative(grid: Grid, functional: str, state, params: PhysParams):
    """Analytic variational derivative; a field for h_lp_f, a MomentumField otherwise."""
    if functional == "h_lp_f":
        phi = potential_from_density(grid, state, params)
        return grid.P**2 / (2 * params.m) + params.e * phi[:, None] + 0.0 * grid.Q
    if functional == "h_lp_pi":
        phi = potential_of(grid, state, params)
        d_q = np.broadcast_to(-grid.P / params.m, grid.shape).copy()
        d_p = grid.broadcast_q(params.e * grid.ddq(phi))
        return MomentumField(d_q, d_p)
    if functional == "h0":
        pi = state
        phi = potential_of(grid, pi, params)
        u, v = particle_flow(grid, phi, params)
        x_pp = _accel.advect(u, grid.ddq(pi.pi_p), v, grid.ddp(pi.pi_p))
        x_pq = _accel.advect(u, grid.ddq(pi.pi_q), v, grid.ddp(pi.pi_q))
        phi_qq = grid.ddq(grid.ddq(phi))[:, None]
        d_Phi = grid.ddq(phi_gradient_term(grid, pi, params))[:, None]
        return MomentumField(x_pp + pi.pi_q / params.m, -x_pq + params.e * phi_qq * pi.pi_p + d_Phi)
    raise ValueError(f"unknown functional {functional!r}; expected one of {FUNCTIONALS}")


def _evaluate(grid, functional, state, params):
    if functional == "h_lp_f":
        return h_lp_f(grid, state, params)
    if functional == "h_lp_pi":
        return h_lp_pi(grid, state, params)
    if functional == "h0":
        return h0_functional(grid, state, params)
    raise ValueError(f"unknown functional {functional!r}; expected one of {FUNCTIONALS}")


def variational_check(grid: Grid, functional: str, state, direction, eps: float, params: PhysParams) -> float:
    """Relative error of the analytic directional derivative against a central difference."""
    if not 1e-7 <= eps <= 1e-3:
        raise ValueError(f"eps must lie in [1e-7, 1e-3], got {eps!r}")
    plus = state + direction * eps if isinstance(state, MomentumField) else state + eps * direction
    minus = state - direction * eps if isinstance(state, MomentumField) else state - eps * direction
    fd = (_evaluate(grid, functional, plus, params) - _evaluate(grid, functional, minus, params)) / (2 * eps)
    d = variational_derivative(grid, functional, state, params)
    if isinstance(d, MomentumField):
        exact = grid.inner(d.pi_q, direction.pi_q) + grid.inner(d.pi_p, direction.pi_p)
    else:
        exact = grid.inner(d, direction)
    scale = abs(exact)
    if scale == 0.0:
        return abs(fd)
    return abs(fd - exact) / scale
