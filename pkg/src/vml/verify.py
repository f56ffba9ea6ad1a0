"""End-to-end identity checks between the density and momentum descriptions.

Each check returns a scalar discrepancy compared against a tolerance.  Checks
whose identities rely on integration by parts in p use a spectral p-axis and
states that decay well inside the box; the rest run on the finite-difference
grid.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .density import vlasov_rhs
from .fields import MomentumField, PhysParams, extract_density
from .functionals import energy_boundary_correction, h_lp_f, h_lp_pi, transform_check, variational_check
from .grid import Grid, make_grid
from .momentum import canonical_h0_rhs, init_momentum_from_density, momentum_vlasov_rhs
from .scenarios import landau


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value <= self.tol)


def _modes(grid: Grid, rng, n_modes=3):
    k0 = 2 * np.pi / grid.l_q
    out = np.zeros((grid.n_q, 1))
    for j in range(n_modes + 1):
        a, b = rng.normal(size=2)
        out = out + a * np.cos(j * k0 * grid.Q) + b * np.sin(j * k0 * grid.Q)
    return out


def synthetic_momentum(grid: Grid, seed=0, width=1.0) -> MomentumField:
    """Band-limited in q, Gaussian-localised in p; deterministic in ``seed``."""
    rng = np.random.default_rng(seed)
    s = grid.P / width
    g = np.exp(-0.5 * s**2)
    pi_q = (_modes(grid, rng) + _modes(grid, rng) * s) * g
    pi_p = (_modes(grid, rng) + _modes(grid, rng) * s**2) * g
    return MomentumField(0.1 * pi_q, 0.1 * pi_p)


def synthetic_function(grid: Grid, seed=1):
    rng = np.random.default_rng(seed)
    s = grid.P
    return (_modes(grid, rng) + _modes(grid, rng) * s) * np.exp(-0.5 * s**2)


def landau_momentum(grid: Grid):
    f0 = landau(grid)
    return f0, init_momentum_from_density(grid, f0)


# ------------------------------------------------------------------ checks


def check_energy_derivative_density(grid, params):
    f0, _ = landau_momentum(grid)
    return variational_check(grid, "h_lp_f", f0, 0.05 * synthetic_function(grid), 1e-4, params)


def check_energy_derivative_momentum(grid, params):
    _, pi = landau_momentum(grid)
    return variational_check(grid, "h_lp_pi", pi, synthetic_momentum(grid, 3), 1e-4, params)


def check_h0_derivative(grid, params):
    _, pi = landau_momentum(grid)
    return variational_check(grid, "h0", pi, synthetic_momentum(grid, 4), 1e-5, params)


def check_density_consistency(grid, params):
    sg = grid.with_scheme("spectral")
    pi = synthetic_momentum(sg, 5)
    f = extract_density(sg, pi)
    return float(np.abs(extract_density(sg, momentum_vlasov_rhs(sg, pi, params)) - vlasov_rhs(sg, f, params)).max())


def check_operator_transform(grid, params):
    sg = grid.with_scheme("spectral")
    return transform_check(sg, synthetic_momentum(sg, 6), synthetic_function(sg, 7))


def check_energy_identity_compact(grid, params):
    pi = synthetic_momentum(grid, 8)
    return abs(h_lp_pi(grid, pi, params) - h_lp_f(grid, extract_density(grid, pi), params))


def check_energy_identity_boundary(grid, params):
    f0, pi = landau_momentum(grid)
    corrected = h_lp_pi(grid, pi, params) + energy_boundary_correction(grid, pi, params)
    return abs(corrected - h_lp_f(grid, extract_density(grid, pi), params))


def check_canonical_agreement(grid, params):
    _, pi = landau_momentum(grid)
    a = extract_density(grid, canonical_h0_rhs(grid, pi, params))
    b = extract_density(grid, momentum_vlasov_rhs(grid, pi, params))
    return float(np.abs(a - b).max())


CHECKS = {
    "energy-derivative-density": (check_energy_derivative_density, 1e-6),
    "energy-derivative-momentum": (check_energy_derivative_momentum, 1e-6),
    "h0-derivative": (check_h0_derivative, 1e-6),
    "density-consistency": (check_density_consistency, 1e-8),
    "operator-transform": (check_operator_transform, 1e-8),
    "energy-identity-compact": (check_energy_identity_compact, 1e-8),
    "energy-identity-boundary": (check_energy_identity_boundary, 1e-8),
    "canonical-agreement": (check_canonical_agreement, 1e-10),
}

SUBSETS = {
    "all": tuple(CHECKS),
    "momentum": ("density-consistency", "energy-identity-compact", "energy-identity-boundary",
                 "canonical-agreement"),
    "derivatives": ("energy-derivative-density", "energy-derivative-momentum", "h0-derivative"),
    "transform": ("operator-transform",),
}


def run_checks(n_q=64, n_p=128, subset="all", tol=None, l_q=4 * np.pi, p_max=8.0, params=None):
    if subset not in SUBSETS:
        raise ValueError(f"unknown subset {subset!r}; expected one of {', '.join(SUBSETS)}")
    grid = make_grid(n_q, n_p, l_q, p_max, "fd4")
    params = params or PhysParams()
    results = []
    for name in SUBSETS[subset]:
        fn, default_tol = CHECKS[name]
        results.append(CheckResult(name, float(fn(grid, params)), default_tol if tol is None else tol))
    return results


def format_results(results) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check'.ljust(width)}  {'value':>10}  {'tol':>8}  result"]
    for r in results:
        lines.append(f"{r.name.ljust(width)}  {r.value:10.3e}  {r.tol:8.1e}  {'PASS' if r.passed else 'FAIL'}")
    failed = [r.name for r in results if not r.passed]
    lines.append(f"{len(results) - len(failed)}/{len(results)} passed")
    if failed:
        lines.append("failing: " + ", ".join(failed))
    return "\n".join(lines) + "\n"
