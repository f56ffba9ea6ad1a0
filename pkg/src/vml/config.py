"""INI run configuration with documented defaults.

Every key has a default; a scenario may change the defaults of the grid and
time sections (the fluid scenario lives on a 2*pi square, the two-stream box
holds one wavelength of its mode).  Values given in the file always win.
Lengths accept a multiple of pi, as in ``l_q = 4*pi``.
"""
from __future__ import annotations

import configparser
import io
import math
import re
from dataclasses import dataclass

from .scenarios import SCENARIOS

# section -> key -> (default, description)
DEFAULTS = {
    "grid": {
        "n_q": ("128", "points along q (or x)"),
        "n_p": ("256", "points along p (or y)"),
        "l_q": ("4*pi", "period in q"),
        "p_max": ("8", "p runs over [-p_max, p_max)"),
        "p_deriv_order": ("fd4", "p-derivative: spectral, fd4 or fd6"),
        "dealias": ("false", "2/3 truncation in q (2D truncation for the fluid)"),
        "momentum_form": ("advective", "momentum-rate discretisation: advective or cartan"),
    },
    "physics": {
        "e": ("1", "particle charge"),
        "m": ("1", "particle mass"),
        "neutralize": ("true", "uniform neutralising background"),
    },
    "time": {
        "dt": ("0.00390625", "time step"),
        "t_end": ("10", "final time"),
    },
    "scenario": {
        "name": ("landau", "one of " + ", ".join(SCENARIOS)),
        "n0": ("1", "mean density (uniform, landau, two_stream)"),
        "vt": ("1", "thermal speed"),
        "epsilon": ("0.05", "perturbation amplitude (landau, two_stream, gauge_demo)"),
        "k": ("0.5", "perturbation wavenumber"),
        "v0": ("2", "beam drift (two_stream)"),
        "gauge_amplitude": ("0.1", "amplitude of the added exact one-form (gauge_demo)"),
        "amplitude": ("1", "Taylor-Green amplitude"),
    },
    "output": {
        "dir": ("output", "output directory"),
        "interval": ("1", "time between diagnostics rows and snapshots"),
        "snapshots": ("true", "write binary field snapshots"),
        "paired": ("false", "evolve the density alongside a momentum run (or vice versa)"),
    },
}

SCENARIO_DEFAULTS = {
    "two_stream": {"grid": {"l_q": "8*pi"}, "time": {"dt": "0.0078125", "t_end": "40"},
                   "scenario": {"epsilon": "0.001", "k": "0.25"}},
    "taylor_green": {"grid": {"n_q": "128", "n_p": "128", "l_q": "2*pi", "p_max": "pi",
                              "p_deriv_order": "spectral", "dealias": "true"},
                     "time": {"dt": "0.01"}},
}

FORMULATIONS = ("density", "momentum", "canonical")


class ConfigError(ValueError):
    """Invalid or unreadable configuration."""


_PI = re.compile(r"^\s*(?:([-+0-9.eE]+)\s*\*?\s*)?pi\s*(?:/\s*([0-9.eE+-]+))?\s*$")


def parse_length(text: str) -> float:
    text = text.strip()
    m = _PI.match(text)
    if m:
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * math.pi / den
    return float(text)


@dataclass(frozen=True)
class RunConfig:
    n_q: int
    n_p: int
    l_q: float
    p_max: float
    p_deriv_order: str
    dealias: bool
    momentum_form: str
    e: float
    m: float
    neutralize: bool
    dt: float
    t_end: float
    scenario: str
    n0: float
    vt: float
    epsilon: float
    k: float
    v0: float
    gauge_amplitude: float
    amplitude: float
    out_dir: str
    interval: float
    snapshots: bool
    paired: bool
    resolved: configparser.ConfigParser

    @property
    def is_fluid(self) -> bool:
        return self.scenario == "taylor_green"

    def manifest_text(self) -> str:
        buf = io.StringIO()
        self.resolved.write(buf)
        return buf.getvalue()


def _parser():
    return configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))


def resolve(user: configparser.ConfigParser) -> RunConfig:
    for section in user.sections():
        if section not in DEFAULTS:
            raise ConfigError(f"unknown section [{section}]; expected one of {', '.join(DEFAULTS)}")
        for key in user[section]:
            if key not in DEFAULTS[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
    name = user.get("scenario", "name", fallback=DEFAULTS["scenario"]["name"][0]).strip()
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; valid scenarios: {', '.join(SCENARIOS)}")

    merged = _parser()
    for section, keys in DEFAULTS.items():
        merged[section] = {k: v[0] for k, v in keys.items()}
    for section, keys in SCENARIO_DEFAULTS.get(name, {}).items():
        for k, v in keys.items():
            merged[section][k] = v
    for section in user.sections():
        for k, v in user[section].items():
            merged[section][k] = v.strip()

    try:
        g, ph, t, sc, out = (merged[s] for s in ("grid", "physics", "time", "scenario", "output"))
        cfg = RunConfig(
            n_q=g.getint("n_q"), n_p=g.getint("n_p"), l_q=parse_length(g["l_q"]),
            p_max=parse_length(g["p_max"]), p_deriv_order=g["p_deriv_order"],
            dealias=g.getboolean("dealias"), momentum_form=g["momentum_form"],
            e=ph.getfloat("e"), m=ph.getfloat("m"), neutralize=ph.getboolean("neutralize"),
            dt=parse_length(t["dt"]), t_end=parse_length(t["t_end"]),
            scenario=name, n0=sc.getfloat("n0"), vt=sc.getfloat("vt"), epsilon=sc.getfloat("epsilon"),
            k=sc.getfloat("k"), v0=sc.getfloat("v0"), gauge_amplitude=sc.getfloat("gauge_amplitude"),
            amplitude=sc.getfloat("amplitude"), out_dir=out["dir"], interval=parse_length(out["interval"]),
            snapshots=out.getboolean("snapshots"), paired=out.getboolean("paired"), resolved=merged,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    if cfg.p_deriv_order not in ("spectral", "fd4", "fd6"):
        raise ConfigError(f"p_deriv_order must be spectral, fd4 or fd6, got {cfg.p_deriv_order!r}")
    if cfg.momentum_form not in ("advective", "cartan"):
        raise ConfigError(f"momentum_form must be advective or cartan, got {cfg.momentum_form!r}")
    if not (cfg.dt > 0 and math.isfinite(cfg.dt)):
        raise ConfigError(f"dt must be positive, got {cfg.dt}")
    if not (cfg.t_end >= 0 and math.isfinite(cfg.t_end)):
        raise ConfigError(f"t_end must be non-negative, got {cfg.t_end}")
    if not cfg.interval > 0:
        raise ConfigError(f"output interval must be positive, got {cfg.interval}")
    ratio = cfg.interval / cfg.dt
    if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
        raise ConfigError(f"output interval {cfg.interval} is not a multiple of dt {cfg.dt}")
    if cfg.m <= 0:
        raise ConfigError(f"mass must be positive, got {cfg.m}")
    if cfg.is_fluid and cfg.p_deriv_order != "spectral":
        raise ConfigError("the fluid scenario needs p_deriv_order = spectral")


def load_config(path=None, text=None) -> RunConfig:
    """Read a config from a file path or a string; missing keys take defaults."""
    user = _parser()
    try:
        if text is not None:
            user.read_string(text)
        elif path is not None:
            with open(path, encoding="utf-8") as fh:
                user.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return resolve(user)


def describe_defaults() -> str:
    """Commented INI listing every key with its default."""
    lines = []
    for section, keys in DEFAULTS.items():
        lines.append(f"[{section}]")
        for k, (v, doc) in keys.items():
            lines.append(f"# {doc}")
            lines.append(f"{k} = {v}")
        lines.append("")
    return "\n".join(lines)
