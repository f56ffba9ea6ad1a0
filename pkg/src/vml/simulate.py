"""Run orchestration: initial data, time loop, diagnostics and snapshots."""
from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import __version__, scenarios
from ._accel import backend
from .config import FORMULATIONS, ConfigError, RunConfig
from .density import potential_from_density, step_rk4_density
from .euler2d import RunSummary, euler_energy, euler_rhs, stream_from_vorticity, taylor_green
from .fields import MomentumField, PhysParams, canonical_bracket, extract_density, gauge_shift, min_density
from .functionals import casimirs, h_lp_f
from .grid import Grid, make_grid
from .momentum import h0_functional, init_momentum_from_density, step_rk4_momentum
from .poisson import constraint_residual
from .timestep import guarded_rk4

COLUMNS = ("t", "H_lp", "mass", "l2_casimir", "min_f", "constraint_residual_max",
           "cross_formulation_linf", "h0")


@dataclass
class RunResult:
    config: RunConfig
    formulation: str
    rows: list = field(default_factory=list)
    initial: np.ndarray | None = None
    final: np.ndarray | None = None
    bracket_antisymmetry: float = 0.0

    def column(self, name):
        i = COLUMNS.index(name)
        return np.array([r[i] for r in self.rows], dtype=np.float64)

    def summary(self, label=None) -> RunSummary:
        if self.config.is_fluid:
            label = label or "2D fluid"
        else:
            label = label or "1D plasma"
        change = float(np.abs(self.final - self.initial).max()) if self.final is not None else 0.0
        mass = self.column("mass")
        if self.config.is_fluid:
            mass_drift = _drift(mass, relative=False)
        else:
            mass_drift = _drift(mass)
        return RunSummary(label, _drift(self.column("H_lp")), _drift(self.column("l2_casimir")), mass_drift,
                          float(self.column("constraint_residual_max").max()), self.bracket_antisymmetry, change)


def _drift(series, relative=True) -> float:
    if series.size == 0:
        return 0.0
    dev = float(np.abs(series - series[0]).max())
    ref = abs(series[0])
    return dev / ref if relative and ref > 0 else dev


def build_grid(cfg: RunConfig) -> Grid:
    try:
        grid = make_grid(cfg.n_q, cfg.n_p, cfg.l_q, cfg.p_max, cfg.p_deriv_order, cfg.dealias and not cfg.is_fluid)
        if cfg.scenario in ("landau", "two_stream", "gauge_demo"):
            scenarios.check_wavenumber(grid, cfg.k)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return grid


def params_of(cfg: RunConfig) -> PhysParams:
    return PhysParams(e=cfg.e, m=cfg.m, neutralize=cfg.neutralize)


def initial_density(cfg: RunConfig, grid: Grid):
    if cfg.scenario == "uniform":
        return scenarios.uniform(grid, cfg.n0, cfg.vt)
    if cfg.scenario in ("landau", "gauge_demo"):
        return scenarios.landau(grid, cfg.epsilon, cfg.k, cfg.n0, cfg.vt)
    if cfg.scenario == "two_stream":
        return scenarios.two_stream(grid, cfg.v0, cfg.epsilon, cfg.k, cfg.n0, cfg.vt)
    raise ConfigError(f"scenario {cfg.scenario!r} has no phase-space density")


def initial_momentum(cfg: RunConfig, grid: Grid, f0) -> MomentumField:
    pi = init_momentum_from_density(grid, f0)
    if cfg.scenario == "gauge_demo":
        pi = gauge_shift(grid, pi, scenarios.gauge_function(grid, cfg.gauge_amplitude, cfg.k))
    return pi


def _plasma_row(grid, params, t, f, pi=None, cross=None):
    # f is the evolved or extracted density, whose potential drives the dynamics
    phi = potential_from_density(grid, f, params)
    cas = casimirs(grid, f)
    res = float(np.abs(constraint_residual(grid, phi, f, params)).max())
    h0 = h0_functional(grid, pi, params) if pi is not None else None
    return (t, h_lp_f(grid, f, params), cas.mass, cas.l2, min_density(f), res, cross, h0)


def _fluid_row(grid, t, w):
    psi = stream_from_vorticity(grid, w)
    lap = grid.d2dq(psi) + grid.ddp(grid.ddp(psi))
    return (t, euler_energy(grid, w), grid.integrate_qp(w), grid.integrate_qp(w**2), float(w.min()),
            float(np.abs(lap - w).max()), None, None)


def _schedule(cfg: RunConfig):
    n_steps = int(math.ceil(cfg.t_end / cfg.dt - 1e-9))
    every = int(round(cfg.interval / cfg.dt))
    return n_steps, every


def _time_of(cfg, step, n_steps):
    return cfg.t_end if step == n_steps else step * cfg.dt


def run(cfg: RunConfig, formulation="density", out_dir=None, write=True) -> RunResult:
    """Evolve the configured scenario, writing outputs when ``write`` is set.

    Raises NonFiniteError (with ``.step``) on blow-up and ConfigError for
    inconsistent settings.
    """
    if formulation not in FORMULATIONS:
        raise ConfigError(f"unknown formulation {formulation!r}; expected one of {', '.join(FORMULATIONS)}")
    out_dir = out_dir or cfg.out_dir
    grid = build_grid(cfg)
    writer = _Writer(cfg, grid, formulation, out_dir) if write else None
    result = RunResult(cfg, "vorticity" if cfg.is_fluid else formulation)
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            if cfg.is_fluid:
                _run_fluid(cfg, grid, writer, result)
            else:
                _run_plasma(cfg, grid, writer, result)
    finally:
        # rows recorded before a blow-up are still written
        if writer is not None:
            writer.finish(result)
    return result


def _run_fluid(cfg, grid, writer, result):
    w = taylor_green(grid, cfg.amplitude)
    result.initial = w.copy()
    n_steps, every = _schedule(cfg)

    def emit(step):
        t = _time_of(cfg, step, n_steps)
        result.rows.append(_fluid_row(grid, t, w))
        if writer:
            writer.snapshot(len(result.rows) - 1, t, {"omega": w})

    emit(0)
    for i in range(n_steps):
        h = min(cfg.dt, cfg.t_end - i * cfg.dt)
        (w,) = guarded_rk4(lambda y: (euler_rhs(grid, y[0], cfg.dealias),), (w,), h, i + 1)
        if (i + 1) % every == 0 or i + 1 == n_steps:
            emit(i + 1)
    result.final = w
    psi = stream_from_vorticity(grid, w)
    result.bracket_antisymmetry = float(np.abs(canonical_bracket(grid, w, psi) + canonical_bracket(grid, psi, w)).max())


def _run_plasma(cfg, grid, writer, result):
    params = params_of(cfg)
    formulation = result.formulation
    f0 = initial_density(cfg, grid)
    use_pi = formulation != "density"
    try:
        pi = initial_momentum(cfg, grid, f0) if (use_pi or cfg.paired) else None
    except ValueError as exc:
        raise ConfigError(f"cannot initialise the momentum field: {exc}") from None
    f = f0.copy() if (not use_pi or cfg.paired) else None
    flow = "canonical_h0" if formulation == "canonical" else "momentum_vlasov"
    result.initial = f0
    n_steps, every = _schedule(cfg)

    def emit(step):
        t = _time_of(cfg, step, n_steps)
        fe = extract_density(grid, pi) if pi is not None else None
        cross = float(np.abs(f - fe).max()) if cfg.paired else None
        if use_pi:
            row = _plasma_row(grid, params, t, fe, pi, cross)
            fields = {"f": fe, "pi_q": pi.pi_q, "pi_p": pi.pi_p}
        else:
            row = _plasma_row(grid, params, t, f, None, cross)
            fields = {"f": f}
        result.rows.append(row)
        if writer:
            writer.snapshot(len(result.rows) - 1, t, fields)

    emit(0)
    for i in range(n_steps):
        h = min(cfg.dt, cfg.t_end - i * cfg.dt)
        if f is not None:
            f = step_rk4_density(grid, f, h, params, step=i + 1)
        if pi is not None:
            pi = step_rk4_momentum(grid, pi, h, params, flow, cfg.momentum_form, step=i + 1)
        if (i + 1) % every == 0 or i + 1 == n_steps:
            emit(i + 1)
    final = extract_density(grid, pi) if use_pi else f
    result.final = final
    phi = potential_from_density(grid, final, params)
    h = grid.P**2 / (2 * params.m) + params.e * phi[:, None]
    result.bracket_antisymmetry = float(np.abs(canonical_bracket(grid, final, h) + canonical_bracket(grid, h, final)).max())


# ------------------------------------------------------------------- output


def format_value(x) -> str:
    return "" if x is None else repr(float(x))


def diagnostics_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([format_value(x) for x in r])
    return buf.getvalue()


def write_field(path, array):
    """Raw little-endian float64, row-major with q as the slow index."""
    np.ascontiguousarray(array, dtype="<f8").tofile(path)


def read_field(path, shape):
    return np.fromfile(path, dtype="<f8").reshape(shape)


class _Writer:
    def __init__(self, cfg, grid, formulation, out_dir):
        self.cfg, self.grid, self.out_dir = cfg, grid, out_dir
        os.makedirs(out_dir, exist_ok=True)
        manifest = cfg.manifest_text()
        manifest += (f"[run]\nformulation = {formulation}\npackage_version = {__version__}\n"
                     f"kernel_backend = {backend()}\n\n")
        with open(os.path.join(out_dir, "run_manifest.ini"), "w", encoding="utf-8") as fh:
            fh.write(manifest)

    def snapshot(self, index, t, fields):
        if not self.cfg.snapshots:
            return
        g = self.grid
        axes = ("x", "y") if self.cfg.is_fluid else ("q", "p")
        lo = -g.p_max
        for name, arr in fields.items():
            stem = os.path.join(self.out_dir, f"{name}_{index:05d}")
            write_field(stem + ".bin", arr)
            with open(stem + ".txt", "w", encoding="utf-8") as fh:
                fh.write(f"field = {name}\ntime = {t!r}\nshape = {g.n_q} {g.n_p}\n"
                         f"axes = {axes[0]} {axes[1]}\n"
                         f"{axes[0]}_extent = 0.0 {g.l_q!r}\n{axes[1]}_extent = {lo!r} {g.p_max!r}\n"
                         "dtype = float64\nbyte_order = little\norder = row-major, first axis slowest\n")

    def finish(self, result):
        with open(os.path.join(self.out_dir, "diagnostics.csv"), "w", encoding="utf-8", newline="") as fh:
            fh.write(diagnostics_csv(result.rows))
