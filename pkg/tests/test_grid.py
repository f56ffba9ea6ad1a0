import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from vml.grid import GridSpec, fd_tables, fd_weights, make_grid

TWO_PI = 2 * np.pi


def test_fd_weights_match_sympy():
    for offsets in ([-2, -1, 0, 1, 2], [0, 1, 2, 3, 4], [-1, 0, 1, 2, 3], list(range(-3, 4)), list(range(7))):
        ref = sympy.finite_diff_weights(1, offsets, 0)[1][-1]
        assert [sympy.Rational(w.numerator, w.denominator) for w in fd_weights(offsets)] == list(ref)


def test_fd4_interior_weights():
    interior, left, right = fd_tables(4)
    np.testing.assert_allclose(interior, [1 / 12, -2 / 3, 0, 2 / 3, -1 / 12], rtol=0, atol=1e-16)
    assert left.shape == right.shape == (2, 5)
    # the right closure mirrors the left one
    np.testing.assert_allclose(right, -left[::-1, ::-1], atol=1e-15)


def test_unsupported_fd_order():
    with pytest.raises(ValueError):
        fd_tables(8)


@pytest.mark.parametrize("kw", [dict(n_q=63), dict(n_p=0), dict(l_q=-1.0), dict(p_max=0.0),
                                dict(p_deriv_order="fd2"), dict(n_p=8)])
def test_gridspec_rejects_invalid(kw):
    base = dict(n_q=16, n_p=32, l_q=TWO_PI, p_max=4.0, p_deriv_order="fd4")
    base.update(kw)
    with pytest.raises(ValueError):
        GridSpec(**base)


def test_spacings():
    g = make_grid(16, 32, TWO_PI, 4.0)
    assert g.dq == pytest.approx(TWO_PI / 16) and g.dp == pytest.approx(0.25)
    assert g.q[0] == 0.0 and g.p[0] == -4.0 and g.p[-1] == pytest.approx(4.0 - 0.25)


# ---------------------------------------------------------------- ddq


def test_ddq_examples(grid2pi):
    g = grid2pi
    np.testing.assert_allclose(g.ddq(np.sin(g.q)), np.cos(g.q), atol=1e-13)
    np.testing.assert_allclose(g.ddq(np.sin(2 * g.Q) + 0 * g.P), 2 * np.cos(2 * g.Q) + 0 * g.P, atol=1e-13)
    assert np.abs(g.ddq(np.ones(g.shape))).max() < 1e-14


def test_d2dq(grid2pi):
    g = grid2pi
    np.testing.assert_allclose(g.d2dq(np.cos(3 * g.q)), -9 * np.cos(3 * g.q), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_ddq_antisymmetric(seed):
    g = make_grid(32, 16, 3.0, 2.0)
    rng = np.random.default_rng(seed)
    a, b = rng.normal(size=(2,) + g.shape)
    lhs = g.inner(a, g.ddq(b)) + g.inner(b, g.ddq(a))
    assert abs(lhs) <= 1e-12 * np.sqrt(g.inner(a, a) * g.inner(b, b))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), scheme=st.sampled_from(["spectral", "fd4", "fd6"]))
def test_ddq_ddp_commute_and_mean_free(seed, scheme):
    g = make_grid(16, 32, TWO_PI, 3.0, scheme)
    x = np.random.default_rng(seed).normal(size=g.shape)
    scale = np.abs(x).max() / (g.dq * g.dp)
    assert np.abs(g.ddq(g.ddp(x)) - g.ddp(g.ddq(x))).max() <= 1e-12 * scale
    assert abs(g.integrate_qp(g.ddq(x))) <= 1e-12 * np.abs(x).sum() * g.dp


# ---------------------------------------------------------------- ddp


@pytest.mark.parametrize("scheme", ["fd4", "fd6"])
def test_ddp_exact_on_polynomials(scheme):
    order = int(scheme[2:])
    g = make_grid(8, 32, TWO_PI, 2.0, scheme)
    for deg in range(order + 1):
        x = g.P**deg + 0 * g.Q
        exact = deg * g.P ** max(deg - 1, 0) + 0 * g.Q
        np.testing.assert_allclose(g.ddp(x), exact, atol=1e-10)


def test_ddp_constant_is_zero():
    for scheme in ("spectral", "fd4", "fd6"):
        g = make_grid(8, 32, TWO_PI, 4.0, scheme)
        assert np.abs(g.ddp(np.full(g.shape, 3.0))).max() < 1e-12


@pytest.mark.parametrize("scheme,order", [("fd4", 4), ("fd6", 6)])
def test_ddp_convergence_order(scheme, order):
    errs = []
    for n in (64, 128):
        g = make_grid(4, n, TWO_PI, 4.0, scheme)
        x = np.exp(-g.P**2) + 0 * g.Q
        errs.append(np.abs(g.ddp(x) + 2 * g.P * np.exp(-g.P**2)).max())
    assert np.log2(errs[0] / errs[1]) >= order - 0.2


def test_ddp_spectral_on_decaying(grid2pi_spectral):
    g = grid2pi_spectral
    x = np.exp(-g.P**2) + 0 * g.Q
    np.testing.assert_allclose(g.ddp(x), -2 * g.P * np.exp(-g.P**2) + 0 * g.Q, atol=1e-12)


def test_dp_matrix_matches_operator(grid2pi):
    g = grid2pi
    x = np.random.default_rng(0).normal(size=g.shape)
    np.testing.assert_allclose(x @ g.dp_matrix.T, g.ddp(x), atol=1e-12)


@pytest.mark.parametrize("scheme", ["fd4", "fd6"])
def test_boundary_flux_is_integration_by_parts(scheme):
    g = make_grid(8, 64, TWO_PI, 3.0, scheme)
    rng = np.random.default_rng(1)
    x, y = rng.normal(size=(2,) + g.shape)
    lhs = g.integrate_qp(y * g.ddp(x) + x * g.ddp(y))
    assert g.boundary_flux(y, x) == pytest.approx(lhs, abs=1e-11)
    # fields vanishing near both ends carry no flux
    bump = np.exp(-8 * g.P**2) + 0 * g.Q
    assert abs(g.boundary_flux(bump, x)) < 1e-12


# ------------------------------------------------------------ quadrature


def test_integrate_examples():
    g = make_grid(32, 32, TWO_PI, np.pi, "spectral")
    assert g.integrate_qp(np.ones(g.shape)) == pytest.approx(4 * np.pi**2, rel=1e-14)
    rng = np.random.default_rng(2)
    assert abs(g.integrate_qp(np.sin(g.Q) * rng.uniform(-1, 1, size=(1, g.n_p)))) < 1e-13
    g8 = make_grid(32, 256, TWO_PI, 8.0)
    m = np.exp(-0.5 * g8.P**2) / np.sqrt(TWO_PI) + 0 * g8.Q
    assert g8.integrate_qp(m) == pytest.approx(TWO_PI, abs=1e-10)
    np.testing.assert_allclose(g8.integrate_p(m), 1.0, atol=1e-10)
    assert np.all(g8.integrate_p(np.zeros(g8.shape)) == 0)
    sep = np.cos(g8.Q) * np.exp(-g8.P**2)
    np.testing.assert_allclose(g8.integrate_p(sep), np.cos(g8.q) * np.sqrt(np.pi), atol=1e-10)


def test_check_rejects_wrong_shape(grid2pi):
    with pytest.raises(ValueError):
        grid2pi.check(np.zeros((3, 3)))


def test_dealias_is_opt_in():
    g = make_grid(32, 16, TWO_PI, 2.0)
    x = np.cos(15 * g.Q) + 0 * g.P
    assert g.dealias_q(x) is x
    gd = make_grid(32, 16, TWO_PI, 2.0, dealias=True)
    assert np.abs(gd.dealias_q(x)).max() < 1e-14
    low = np.cos(3 * gd.Q) + 0 * gd.P
    np.testing.assert_allclose(gd.dealias_q(low), low, atol=1e-14)
