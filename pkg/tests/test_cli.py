import json
import subprocess
import sys

import numpy as np
import pytest

from bandpert import io
from bandpert.cli import main, parse_t_grid, UsageError
from bandpert.correction import closed_form_F


def run(*args):
    return main([str(a) for a in args])


def test_theory_uniform_band(tmp_path):
    assert run("theory", "--example", "uniform-band", "--ell", 0.2, "--out", tmp_path) == 0
    table = io.read_correction(tmp_path / "correction.csv")
    ok = table.flags == "ok"
    keep = ok & (np.abs(table.grid - 0.2) > 0.01) & (np.abs(table.grid - 0.8) > 0.01)
    np.testing.assert_allclose(table.F[keep], closed_form_F("uniform-band", table.grid[keep], ell=0.2),
                               atol=1e-3)
    meta = io.read_metadata(tmp_path / "metadata.json")
    assert meta["command"] == "theory" and len(meta["model_hash"]) == 64


def test_theory_triangular(tmp_path):
    assert run("theory", "--example", "triangular-goe", "--grid-points", 101, "--out", tmp_path) == 0
    table = io.read_correction(tmp_path / "correction.csv")
    np.testing.assert_allclose(table.F, closed_form_F("triangular-goe", table.grid), atol=1e-5)


def test_invalid_ell_is_usage_error(tmp_path):
    out = tmp_path / "o"
    assert run("theory", "--example", "uniform-band", "--ell", 1.5, "--out", out) == 1
    assert not out.exists()


@pytest.mark.parametrize("argv", [
    ["simulate", "--example", "uniform-band", "--n", "0", "--eps", "0.01"],
    ["simulate", "--example", "uniform-band", "--eps", "0.01"],
    ["burgers", "--t-grid", "0:0.2:0.05"],
    ["burgers", "--c", "1", "--t-grid", "0:0.2"],
    ["solve", "--example", "nope"],
    ["solve"],
    ["frobnicate"],
    [],
    ["theory", "--example", "triangular-goe", "--grid-points", "-3"],
])
def test_usage_errors(argv, tmp_path, capsys):
    assert main(argv + ["--out", str(tmp_path / "o")] if argv else argv) == 1
    assert capsys.readouterr().err


def test_solve_eps_zero_uniform(tmp_path):
    assert run("solve", "--eps", 0, "--example", "uniform-band", "--grid-points", 121, "--out", tmp_path) == 0
    tab = io.read_density(tmp_path / "density.csv")
    mid = (tab.s > 0.05) & (tab.s < 0.95)
    assert np.max(np.abs(tab.density[mid] - 1.0)) < 0.05


def test_solve_semicircle_semigroup(tmp_path):
    assert run("solve", "--eps", 0.25, "--semicircle-c", 1, "--grid-points", 81, "--out", tmp_path) == 0
    tab = io.read_density(tmp_path / "density.csv")
    exact = np.sqrt(np.clip(5 - tab.s ** 2, 0, None)) / (2 * np.pi * 1.25)
    assert np.max(np.abs(tab.density - exact)) < 0.02


def test_solve_nonconvergence_exit_code(tmp_path, capsys):
    code = run("solve", "--eps", 0.5, "--example", "uniform-band", "--smoothing-eta", 1e-4,
               "--grid-points", 3, "--max-iter", 5, "--out", tmp_path)
    assert code == 2
    assert "residual" in capsys.readouterr().err


def test_simulate_determinism(tmp_path):
    args = ["simulate", "--example", "triangular-goe", "--n", 120, "--eps", 0.01, "--replicates", 3,
            "--seed", 7]
    assert run(*args, "--out", tmp_path / "a", "--threads", 1) == 0
    assert run(*args, "--out", tmp_path / "b", "--threads", 2) == 0
    for name in ("eigenvalues.csv", "shift.csv", "metadata.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    meta = io.read_metadata(tmp_path / "a" / "metadata.json")
    assert (meta["n"], meta["eps"], meta["seed"]) == (120, 0.01, 7)
    eig = io.read_eigenvalues(tmp_path / "a" / "eigenvalues.csv")
    assert sorted(eig) == [0, 1, 2] and all(len(v) == 120 for v in eig.values())


def test_burgers_residual_command(tmp_path, capsys):
    assert run("burgers", "--c", 1, "--t-grid", "0:0.2:0.05", "--out", tmp_path) == 0
    cols = io.read_residual(tmp_path / "residual.csv")
    assert np.max(np.abs(cols["residual"])) <= 0.05
    assert "max interior residual" in capsys.readouterr().out


def test_burgers_semigroup_command(tmp_path):
    assert run("burgers", "--semigroup", "--c", 1, "--t", 0.25, "--out", tmp_path) == 0
    cols = io.read_semigroup(tmp_path / "semigroup.csv")
    assert np.max(cols["abs_error"]) <= 0.02


def test_validate_command(tmp_path, capsys):
    assert run("validate", "--example", "semicircle", "--out", tmp_path) == 0
    assert "holder" in capsys.readouterr().out
    report = json.loads((tmp_path / "validation.json").read_text())["report"]
    assert report["passed"]


def test_hypothesis_failure_exit_code(tmp_path):
    # rho is Lipschitz with constant 1, so a Hoelder constant of 1e-3 is false
    cfg = {"density": {"kind": "triangular"}, "profile": {"kind": "constant"},
           "kernel": {"alpha": 1.0, "C": 1e-3}}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    assert run("validate", "--config", path, "--out", tmp_path) == 3
    assert run("theory", "--config", path, "--out", tmp_path / "t") == 3


def test_config_precedence(tmp_path):
    cfg = {"density.kind": "uniform", "profile": {"kind": "band", "params": {"width": 0.3}},
           "run": {"grid_points": 31}}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    assert run("theory", "--config", path, "--out", tmp_path / "a") == 0
    assert len(io.read_correction(tmp_path / "a" / "correction.csv").grid) == 31
    assert run("theory", "--config", path, "--grid-points", 41, "--out", tmp_path / "b") == 0
    assert len(io.read_correction(tmp_path / "b" / "correction.csv").grid) == 41
    # rerunning the same config gives identical bytes
    assert run("theory", "--config", path, "--out", tmp_path / "c") == 0
    assert (tmp_path / "a" / "correction.csv").read_bytes() == (tmp_path / "c" / "correction.csv").read_bytes()


def test_config_unknown_run_key(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"density.kind": "uniform", "profile.kind": "constant",
                                "run": {"replicates": 3}}))
    assert run("theory", "--config", path, "--out", tmp_path) == 1


def test_parse_t_grid():
    np.testing.assert_allclose(parse_t_grid("0:0.2:0.05"), [0, 0.05, 0.1, 0.15, 0.2])
    for bad in ("0:0.2", "0.2:0:0.05", "0:0.2:0.03", "0:0.05:0.05", "a:b:c"):
        with pytest.raises(UsageError):
            parse_t_grid(bad)


def test_console_entry_point_help():
    res = subprocess.run([sys.executable, "-m", "bandpert.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for cmd in ("theory", "solve", "simulate", "burgers", "validate"):
        assert cmd in res.stdout
