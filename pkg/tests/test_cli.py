import json

import numpy as np
import pytest

from oracles import rescaled_airy
from dispersionlab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def read_csv(path):
    rows = [line for line in path.read_text().splitlines() if not line.startswith("#")]
    return np.genfromtxt(rows, delimiter=",", names=True)


def test_kernel_csv_matches_airy(tmp_path, capsys):
    out = tmp_path / "k.csv"
    code, _, _ = run(capsys, "kernel", "--k", "1", "--mode", "integral", "--out", str(out))
    assert code == 0
    text = out.read_text()
    assert text.startswith("# dispersionlab") and "k=1" in text.splitlines()[0]
    data = read_csv(out)
    sel = (data["y"] >= -8) & (data["y"] <= 15)
    y = data["y"][sel][::50]
    assert np.max(np.abs(data["F"][sel][::50] - rescaled_airy(y))) < 1e-5


def test_csv_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        run(capsys, "evolve", "--data", "gaussian:0.5", "--t", "2", "--n", "21", "--out", str(p))
    assert a.read_bytes() == b.read_bytes()


def test_stability_json(capsys):
    code, out, _ = run(capsys, "stability", "--k", "1", "--p", "5")
    assert code == 0 and json.loads(out)["verdict"] == "stable"


@pytest.mark.parametrize("argv", [
    ["kernel", "--bogus"],
    ["frobnicate"],
    ["vss", "--k", "1", "--p", "0.5"],
    ["branch", "--k", "1", "--from", "3", "--to", "4.5"],
    ["evolve", "--data", "no_such_file.csv", "--t", "1"],
    ["kernel", "--k", "0"],
])
def test_usage_errors_write_nothing(tmp_path, capsys, argv):
    out = tmp_path / "x.csv"
    code, _, err = run(capsys, *argv, "--out", str(out))
    assert code == 2
    assert json.loads(err.splitlines()[-1])["error"] == "UsageError"
    assert not out.exists()


def test_numerical_failure_exit_1(tmp_path, capsys):
    flat = tmp_path / "flat.csv"
    np.savetxt(flat, np.column_stack([np.linspace(-1, 1, 11), np.zeros(11)]), delimiter=",")
    code, _, err = run(capsys, "classify", "--data", str(flat))
    assert code == 1 and json.loads(err)["error"] == "AllMomentsVanish"


def test_plot_script(tmp_path, capsys):
    out, script = tmp_path / "v.csv", tmp_path / "v_plot.py"
    code, _, _ = run(capsys, "vss", "--k", "1", "--p", "3.5", "--out", str(out), "--plot-script", str(script))
    assert code == 0 and str(out) in script.read_text()
    compile(script.read_text(), str(script), "exec")


@pytest.mark.parametrize("argv,key", [
    (["radiation", "--k", "3"], "sides"),
    (["adjoint-poly", "--k", "1", "--l", "3"], "coefficients"),
    (["classify", "--data", "hermite3:0.5"], "l_star"),
    (["gamma", "--k", "1"], "gamma"),
    (["spectrum", "--k", "1", "--L", "3"], "biorthonormality"),
])
def test_json_commands(capsys, argv, key):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and key in json.loads(out)


def test_majorant_command(tmp_path, capsys):
    code, out, _ = run(capsys, "majorant", "--out", str(tmp_path / "m.csv"), "--check-evolution", "gaussian:0.5")
    report = json.loads(out)
    assert code == 0 and report["pass"] and report["checks"]["domination"]


def test_branch_command(tmp_path, capsys):
    out = tmp_path / "b.csv"
    code, _, _ = run(capsys, "branch", "--k", "1", "--from", "3.6", "--to", "3.8", "--step", "0.1", "--out", str(out))
    data = read_csv(out)
    assert code == 0 and data.size == 3 and np.all(np.diff(data["sup_norm"]) < 0)


def test_threads_env(monkeypatch, capsys):
    monkeypatch.setenv("DISPERSIONLAB_THREADS", "2")
    code, out, _ = run(capsys, "kernel", "--k", "1", "--oracle", "fourier", "--orders", "0")
    assert code == 0 and "threads=2" in out and "fourier_max_deviation" in out
