from __future__ import annotations

import json
import subprocess
import sys

import pytest

from torusvisc.cli import EXIT_FAIL, EXIT_PASS, EXIT_USAGE, dispatch, main
from torusvisc.problem import parse_config

LINEAR = "m = 1\nb = 1\nc = 2\nf = sin(x1)\neps = 0.4, 0.2, 0.1, 0.05\n"
EXAMPLE1 = """m = 1
param.K = 10
param.B = 0.1
param.A = 0.5
b = 1 + B*(1 + A*cos(x1))*lam
c = K + K*B*(1 + A*cos(x1))*lam/2 - B*A*lam*sin(x1)/2
f = 2 + sin(x1)
n = 128
eps = 0.2, 0.1
"""


@pytest.fixture
def linear_cfg(tmp_path):
    path = tmp_path / "linear.cfg"
    path.write_text(LINEAR)
    return path


def test_check(linear_cfg, tmp_path, capsys):
    code = main(["check", "--problem", str(linear_cfg), "--out", str(tmp_path / "o")])
    assert code == EXIT_PASS
    doc = json.loads((tmp_path / "o" / "constants.json").read_text())
    assert doc["cond1"] and doc["cond2"] and doc["eps_bar"] == "unbounded"
    assert "PASS cond2" in capsys.readouterr().out


def test_check_failing_gate(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("m = 1\nb = 3*sin(x1)\nc = 1\nf = 1\n")
    assert main(["check", "--problem", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_FAIL
    assert "FAIL cond1" in (tmp_path / "o" / "verdict.txt").read_text()


def test_sweep_csv(linear_cfg, tmp_path):
    assert main(["sweep", "--problem", str(linear_cfg), "--out", str(tmp_path / "s"),
                 "--n", "256"]) == EXIT_PASS
    lines = (tmp_path / "s" / "sweep.csv").read_text().splitlines()
    assert lines[0] == "eps,sup_error,iterations,residual"
    errs = [float(l.split(",")[1]) for l in lines[1:]]
    assert errs == sorted(errs, reverse=True)


def test_solve_linear_and_characteristics(linear_cfg, tmp_path):
    out = tmp_path / "l"
    assert main(["solve-linear", "--problem", str(linear_cfg), "--out", str(out),
                 "--eps", "0.2,0.1", "--n", "64"]) == EXIT_PASS
    assert (out / "u_eps_0p1.csv").exists() and (out / "solution.png").exists()
    out2 = tmp_path / "c"
    assert main(["characteristics", "--problem", str(linear_cfg), "--out", str(out2),
                 "--n", "32"]) == EXIT_PASS
    assert (out2 / "characteristics.csv").read_text().startswith("x1,value\n")


def test_solve_nonlinear(tmp_path):
    cfg = tmp_path / "ex1.cfg"
    cfg.write_text(EXAMPLE1)
    out = tmp_path / "nl"
    assert main(["solve-nonlinear", "--problem", str(cfg), "--out", str(out)]) == EXIT_PASS
    header = (out / "picard.csv").read_text().splitlines()[0]
    assert header == "k,w_norm,ratio,rho_star"


def test_linear_command_refuses_nonlinear_problem(tmp_path):
    cfg = tmp_path / "ex1.cfg"
    cfg.write_text(EXAMPLE1)
    assert main(["sweep", "--problem", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_USAGE


def test_deterministic_outputs(linear_cfg, tmp_path):
    for run in ("a", "b"):
        main(["sweep", "--problem", str(linear_cfg), "--out", str(tmp_path / run), "--n", "64"])
        main(["check", "--problem", str(linear_cfg), "--out", str(tmp_path / run)])
    for name in ("sweep.csv", "constants.json", "problem.json", "verdict.txt"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_csv_has_17_significant_digits(linear_cfg, tmp_path):
    main(["sweep", "--problem", str(linear_cfg), "--out", str(tmp_path / "s"), "--n", "64"])
    row = (tmp_path / "s" / "sweep.csv").read_text().splitlines()[1]
    assert row.split(",")[0] == "0.40000000000000002"


@pytest.mark.parametrize("argv", [
    ["check", "--out", "{out}"],
    ["check", "--problem", "{missing}", "--out", "{out}"],
    ["sweep", "--problem", "{cfg}", "--out", "{out}", "--eps", "0.1,0.2"],
    ["sweep", "--problem", "{cfg}", "--out", "{out}", "--n", "4"],
    ["experiment", "nosuch", "--out", "{out}"],
    ["frobnicate", "--out", "{out}"],
])
def test_usage_errors(argv, linear_cfg, tmp_path):
    fill = {"out": str(tmp_path / "o"), "cfg": str(linear_cfg), "missing": str(tmp_path / "no.cfg")}
    assert main([a.format(**fill) for a in argv]) == EXIT_USAGE


def test_missing_field_error_report(tmp_path):
    cfg = tmp_path / "p.cfg"
    cfg.write_text("m = 1\nb = 1\nf = 1\n")
    assert main(["check", "--problem", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_USAGE
    err = json.loads((tmp_path / "o" / "error.json").read_text())
    assert "'c'" in err["message"]


def test_dispatch_experiment(tmp_path):
    assert dispatch("experiment", None, tmp_path / "g", "gradient") == EXIT_PASS
    assert (tmp_path / "g" / "verdict.txt").read_text().endswith("VERDICT PASS\n")


def test_dispatch_runtime_failure_is_exit_one(tmp_path):
    spec = parse_config("m = 1\nb = 1\nc = cos(x1)\nf = 1\nn = 16\n")
    assert dispatch("characteristics", spec, tmp_path / "o") == EXIT_FAIL
    assert (tmp_path / "o" / "error.json").exists()


def test_console_entry_point(linear_cfg, tmp_path):
    proc = subprocess.run([sys.executable, "-m", "torusvisc.cli", "check", "--problem",
                           str(linear_cfg), "--out", str(tmp_path / "o")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "PASS cond1" in proc.stdout
