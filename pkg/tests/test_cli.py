import configparser
import os
import subprocess
import sys

import numpy as np
import pytest

from vml.cli import EXIT_BLOWUP, EXIT_CONFIG, EXIT_OK, EXIT_VERIFY_FAILED, main
from vml.config import DEFAULTS, ConfigError, describe_defaults, load_config, parse_length
from vml.simulate import COLUMNS, read_field, run
from vml.verify import CHECKS, SUBSETS, run_checks

SMALL = """
[grid]
n_q = 32
n_p = 64
[time]
dt = 0.015625
t_end = {t_end}
[output]
interval = {interval}
"""


def _write(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


# -------------------------------------------------------------------- config


def test_parse_length():
    assert parse_length("4*pi") == pytest.approx(4 * np.pi)
    assert parse_length("pi") == pytest.approx(np.pi)
    assert parse_length("pi/2") == pytest.approx(np.pi / 2)
    assert parse_length("2.5") == 2.5
    with pytest.raises(ValueError):
        parse_length("four")


def test_defaults_and_scenario_overrides():
    cfg = load_config(text="")
    assert (cfg.scenario, cfg.n_q, cfg.n_p, cfg.p_max, cfg.p_deriv_order) == ("landau", 128, 256, 8.0, "fd4")
    assert cfg.l_q == pytest.approx(4 * np.pi) and cfg.dt == 1 / 256
    assert (cfg.e, cfg.m, cfg.epsilon, cfg.k) == (1.0, 1.0, 0.05, 0.5)
    ts = load_config(text="[scenario]\nname = two_stream\n")
    assert ts.l_q == pytest.approx(8 * np.pi) and ts.v0 == 2.0 and ts.k == 0.25
    tg = load_config(text="[scenario]\nname = taylor_green\n[grid]\nn_q = 64\n")
    assert tg.is_fluid and tg.n_q == 64 and tg.p_deriv_order == "spectral"


@pytest.mark.parametrize("text", [
    "[scenario]\nname = bogus\n",
    "[grid]\nn_q = many\n",
    "[grid]\ncolour = red\n",
    "[extra]\na = 1\n",
    "[grid]\np_deriv_order = fd3\n",
    "[time]\ndt = -1\n",
    "[output]\ninterval = 0.3\n",
    "[physics]\nm = 0\n",
    "[scenario]\nname = taylor_green\n[grid]\np_deriv_order = fd4\n",
    "not an ini file",
])
def test_invalid_configs(text):
    with pytest.raises(ConfigError):
        load_config(text=text)


def test_describe_defaults_lists_every_key():
    parsed = configparser.ConfigParser()
    parsed.read_string(describe_defaults())
    for section, keys in DEFAULTS.items():
        assert set(parsed[section]) == set(keys)


# ------------------------------------------------------------------ simulate


def test_simulate_row_count_and_outputs(tmp_path, capsys):
    cfg_path = _write(tmp_path, SMALL.format(t_end=10, interval=1))
    out = tmp_path / "out"
    assert main(["simulate", cfg_path, "--out", str(out)]) == EXIT_OK
    lines = (out / "diagnostics.csv").read_text().splitlines()
    assert lines[0] == ",".join(COLUMNS)
    assert len(lines) - 1 == int(np.ceil(10 / 1)) + 1
    first = lines[1].split(",")
    assert first[6] == "" and first[7] == ""
    manifest = configparser.ConfigParser()
    manifest.read(out / "run_manifest.ini")
    for section, keys in DEFAULTS.items():
        assert set(keys) <= set(manifest[section])
    assert manifest["grid"]["n_q"] == "32" and manifest["run"]["formulation"] == "density"
    side = (out / "f_00010.txt").read_text()
    assert "time = 10.0" in side and "shape = 32 64" in side and "byte_order = little" in side
    f = read_field(out / "f_00010.bin", (32, 64))
    assert f.dtype == np.dtype("<f8") and np.isfinite(f).all()
    assert os.path.getsize(out / "f_00010.bin") == 32 * 64 * 8


def test_rows_for_non_divisible_end(tmp_path):
    cfg = load_config(text=SMALL.format(t_end=2.5, interval=1))
    res = run(cfg, write=False)
    assert len(res.rows) == int(np.ceil(2.5 / 1)) + 1
    assert [r[0] for r in res.rows] == [0.0, 1.0, 2.0, 2.5]


def test_simulate_is_deterministic(tmp_path):
    text = SMALL.format(t_end=1, interval=0.25) + "[scenario]\nname = two_stream\n"
    cfg_path = _write(tmp_path, text.replace("n_q = 32", "n_q = 32\nl_q = 8*pi"))
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", cfg_path, "--out", str(a), "--formulation", "momentum"]) == EXIT_OK
    assert main(["simulate", cfg_path, "--out", str(b), "--formulation", "momentum"]) == EXIT_OK
    assert (a / "diagnostics.csv").read_bytes() == (b / "diagnostics.csv").read_bytes()
    for name in ("pi_q_00004.bin", "pi_p_00004.bin", "f_00004.bin"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_paired_momentum_run_reports_cross_difference(tmp_path):
    cfg = load_config(text=SMALL.format(t_end=1, interval=0.5).replace("interval = 0.5", "interval = 0.5\npaired = true"))
    res = run(cfg, "momentum", write=False)
    cross = res.column("cross_formulation_linf")
    assert cross[0] < 1e-8 and np.all(cross < 1e-4)
    assert np.all(np.isfinite(res.column("h0")))


@pytest.mark.parametrize("formulation", ["density", "momentum", "canonical"])
def test_uniform_scenario_is_steady(formulation):
    cfg = load_config(text=SMALL.format(t_end=1, interval=0.5) + "[scenario]\nname = uniform\n")
    res = run(cfg, formulation, write=False)
    assert np.abs(res.final - res.initial).max() <= 1e-12


def test_gauge_demo_matches_landau():
    # the cartan form keeps the added exact one-form exact on the grid
    text = SMALL.format(t_end=0.5, interval=0.5).replace("n_p = 64", "n_p = 64\nmomentum_form = cartan")
    text += "[scenario]\nname = {}\n"
    a = run(load_config(text=text.format("landau")), "momentum", write=False)
    b = run(load_config(text=text.format("gauge_demo")), "momentum", write=False)
    assert np.abs(a.final - b.final).max() <= 1e-10


def test_fluid_simulation(tmp_path):
    cfg_path = _write(tmp_path, "[scenario]\nname = taylor_green\n[grid]\nn_q = 32\nn_p = 32\n"
                                "[time]\nt_end = 0.5\n[output]\ninterval = 0.25\n")
    out = tmp_path / "fluid"
    assert main(["simulate", cfg_path, "--out", str(out)]) == EXIT_OK
    assert len((out / "diagnostics.csv").read_text().splitlines()) == 4
    assert "axes = x y" in (out / "omega_00002.txt").read_text()
    assert main(["simulate", cfg_path, "--formulation", "momentum", "--out", str(out)]) == EXIT_CONFIG


def test_unknown_scenario_exit_code(tmp_path, capsys):
    cfg_path = _write(tmp_path, "[scenario]\nname = bogus\n")
    assert main(["simulate", cfg_path]) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "bogus" in err and "landau" in err and "taylor_green" in err


def test_missing_config_file(tmp_path):
    assert main(["simulate", str(tmp_path / "nope.ini")]) == EXIT_CONFIG


def test_bad_wavenumber_is_config_error(tmp_path):
    cfg_path = _write(tmp_path, SMALL.format(t_end=1, interval=1) + "[scenario]\nk = 0.3\n")
    assert main(["simulate", cfg_path, "--out", str(tmp_path / "o")]) == EXIT_CONFIG


def test_blowup_exit_code(tmp_path, capsys):
    cfg_path = _write(tmp_path, "[time]\ndt = 10\nt_end = 1000\n[output]\ninterval = 10\n")
    out = tmp_path / "blow"
    assert main(["simulate", cfg_path, "--out", str(out)]) == EXIT_BLOWUP
    err = capsys.readouterr().err
    assert "numerical blow-up" in err and "at step" in err
    step = int(err.split("at step")[1].split()[0])
    assert step >= 1
    rows = (out / "diagnostics.csv").read_text().splitlines()
    assert len(rows) - 1 == step  # every completed step was recorded


# -------------------------------------------------------------------- verify


def test_verify_default_passes(capsys):
    assert main(["verify"]) == EXIT_OK
    out = capsys.readouterr().out
    for name in CHECKS:
        assert name in out
    assert f"{len(CHECKS)}/{len(CHECKS)} passed" in out


def test_verify_zero_tolerance_fails(capsys):
    assert main(["verify", "--tol", "0"]) == EXIT_VERIFY_FAILED
    out = capsys.readouterr().out
    assert "failing:" in out and "density-consistency" in out.split("failing:")[1]


def test_verify_subset_filter():
    results = run_checks(32, 64, "momentum")
    assert [r.name for r in results] == list(SUBSETS["momentum"])
    assert main(["verify", "--subset", "nope"]) == EXIT_CONFIG
    assert main(["verify", "--grid", "3x5"]) == EXIT_CONFIG


# ------------------------------------------------------------------- compare


def test_compare_is_deterministic(tmp_path, capsys):
    plasma = _write(tmp_path, SMALL.format(t_end=1, interval=0.5) + "[scenario]\nname = uniform\n", "p.ini")
    fluid = _write(tmp_path, "[scenario]\nname = taylor_green\n[grid]\nn_q = 32\nn_p = 32\n[time]\nt_end = 1\n",
                   "f.ini")
    assert main(["compare", plasma, fluid]) == EXIT_OK
    first = capsys.readouterr().out
    assert main(["compare", plasma, fluid]) == EXIT_OK
    assert capsys.readouterr().out == first
    assert "vorticity omega" in first and "density f" in first
    assert main(["compare", fluid, plasma]) == EXIT_CONFIG


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "vml.cli", "defaults"], capture_output=True, text=True, check=True)
    assert "[grid]" in proc.stdout and "momentum_form" in proc.stdout
