import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from vml.fields import MomentumField, PhysParams, extract_density
from vml.grid import make_grid
from vml.poisson import (NonFiniteError, constraint_residual, greens_kernel, kernel_solve, momentum_charge,
                         potential_from_momentum, solve_poisson_spectral)

TWO_PI = 2 * np.pi


def test_spectral_examples(params):
    g = make_grid(64, 16, 4 * np.pi, 4.0)
    phi = solve_poisson_spectral(g, 1 + 0.1 * np.cos(0.5 * g.q), params)
    np.testing.assert_allclose(phi, 0.4 * np.cos(0.5 * g.q), atol=1e-12)
    assert np.abs(solve_poisson_spectral(g, np.full(g.n_q, 3.0), params)).max() < 1e-14
    g2 = make_grid(32, 16, TWO_PI, 4.0)
    np.testing.assert_allclose(solve_poisson_spectral(g2, np.sin(g2.q), params), np.sin(g2.q), atol=1e-13)


def test_charge_sign_and_mass_scaling():
    g = make_grid(32, 16, TWO_PI, 4.0)
    phi = solve_poisson_spectral(g, np.cos(2 * g.q), PhysParams(e=-3.0))
    np.testing.assert_allclose(phi, -0.75 * np.cos(2 * g.q), atol=1e-13)


def test_rejects_bad_input(params):
    g = make_grid(32, 16, TWO_PI, 4.0)
    with pytest.raises(NonFiniteError):
        solve_poisson_spectral(g, np.full(g.n_q, np.nan), params)
    with pytest.raises(ValueError):
        solve_poisson_spectral(g, np.ones(5), params)
    with pytest.raises(ValueError):
        solve_poisson_spectral(g, 1 + np.cos(g.q), PhysParams(neutralize=False))
    g2 = make_grid(2, 16, TWO_PI, 4.0)
    with pytest.raises(ValueError):
        solve_poisson_spectral(g2, np.zeros(2), params)


def test_no_background_accepts_mean_free():
    g = make_grid(32, 16, TWO_PI, 4.0)
    phi = solve_poisson_spectral(g, np.cos(g.q), PhysParams(neutralize=False))
    np.testing.assert_allclose(phi, np.cos(g.q), atol=1e-13)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), e=st.floats(-2, 2))
def test_solver_exact_and_zero_mean(seed, e):
    g = make_grid(32, 16, 5.0, 4.0)
    rng = np.random.default_rng(seed)
    k = 2 * np.pi / g.l_q
    rho = sum(rng.normal() * np.cos(j * k * g.q + rng.uniform(0, 6)) for j in range(6))
    p = PhysParams(e=e)
    phi = solve_poisson_spectral(g, rho, p)
    assert np.abs(g.d2dq(phi) + e * (rho - rho.mean())).max() <= 1e-10
    assert abs(phi.mean()) <= 1e-13


# ------------------------------------------------------------------ kernel


def test_kernel_examples(params):
    g = make_grid(48, 16, 4 * np.pi, 4.0)
    K = greens_kernel(g)
    assert np.abs(K - K.T).max() <= 1e-12
    assert np.abs(kernel_solve(g, K, np.full(g.n_q, 2.0), params)).max() < 1e-13
    rho = np.random.default_rng(0).normal(size=g.n_q)
    rho -= rho.mean()
    np.testing.assert_allclose(kernel_solve(g, K, rho, params), solve_poisson_spectral(g, rho, params), atol=1e-10)


def test_kernel_is_translation_invariant():
    g = make_grid(16, 16, TWO_PI, 4.0)
    K = greens_kernel(g)
    np.testing.assert_allclose(np.roll(np.roll(K, 1, 0), 1, 1), K, atol=1e-14)


# -------------------------------------------------------------- residual


def test_constraint_residual_examples(params):
    g = make_grid(32, 128, TWO_PI, 8.0)
    f = (1 + 0.2 * np.cos(g.Q)) * np.exp(-0.5 * g.P**2)
    rho = g.integrate_p(f)
    phi = solve_poisson_spectral(g, rho, params)
    assert np.abs(constraint_residual(g, phi, f, params)).max() <= 1e-10
    fz = np.cos(g.Q) * np.exp(-g.P**2)
    np.testing.assert_allclose(constraint_residual(g, np.zeros(g.n_q), fz, params), g.integrate_p(fz), atol=1e-14)
    phi2 = np.sin(3 * g.q)
    np.testing.assert_allclose(constraint_residual(g, phi2, g.zeros(), params), -9 * phi2, atol=1e-11)


# ----------------------------------------------------- momentum potential


def test_potential_from_momentum_zero(params):
    g = make_grid(32, 64, TWO_PI, 8.0)
    pi = MomentumField(np.random.default_rng(1).normal(size=g.shape), g.zeros())
    assert np.abs(potential_from_momentum(g, pi, params)).max() < 1e-12


def test_potential_from_momentum_analytic(params):
    """Oracle: phi'' = e int d(pi_p)/dq dp solved symbolically."""
    q, p, e = sp.symbols("q p e", real=True)
    pi_p = -sp.sin(q) * sp.exp(-p**2)
    rhs = e * sp.integrate(sp.diff(pi_p, q), (p, -sp.oo, sp.oo))
    phi = sp.Function("phi")
    sol = sp.dsolve(sp.Eq(phi(q).diff(q, 2), rhs)).rhs
    sol = sol.subs({s: 0 for s in sol.free_symbols if s.name.startswith("C")})
    for e_val in (1.0, -2.0):
        g = make_grid(32, 128, TWO_PI, 8.0)
        expected = sp.lambdify(q, sol.subs(e, e_val), "numpy")(g.q)
        pi = MomentumField(g.zeros(), -np.sin(g.Q) * np.exp(-g.P**2))
        got = potential_from_momentum(g, pi, PhysParams(e=e_val))
        np.testing.assert_allclose(got, expected, atol=1e-12)
        assert got[0] == pytest.approx(e_val * np.sqrt(np.pi))


def test_potential_from_momentum_matches_extracted(params):
    """Consistent when the p-boundary values of pi_q do not depend on q."""
    g = make_grid(32, 128, 4 * np.pi, 8.0)
    rng = np.random.default_rng(2)
    bump = np.exp(-0.5 * g.P**2)
    pi_q = np.tanh(g.P) + np.cos(0.5 * g.Q) * bump * g.P
    pi_p = (rng.normal() * np.sin(0.5 * g.Q) + rng.normal() * np.cos(g.Q)) * bump
    pi = MomentumField(pi_q, pi_p)
    direct = solve_poisson_spectral(g, g.integrate_p(extract_density(g, pi)), params)
    np.testing.assert_allclose(potential_from_momentum(g, pi, params), direct, atol=1e-8)
    assert np.abs(momentum_charge(g, pi) + g.integrate_p(g.ddq(pi_p))).max() < 1e-15
