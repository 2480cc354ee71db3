import io
import subprocess
import sys

import numpy as np

from psifb.cli import main
from psifb.envs import gen_experiment, load_instance
from psifb.harness import COLUMNS


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_gaps_exp8():
    code, text = run("gaps", "--instance", "exp:8")
    assert code == 0
    assert "pareto_set: {5}" in text
    assert "H = 237957.54" in text and "H2 = 233016.8" in text


def test_gaps_relaxed():
    code, text = run("gaps", "--instance", "exp:6", "--k", "3")
    assert code == 0 and "H2^(k) = " in text


def test_schedule_sr():
    code, text = run("schedule", "--algo", "ege-sr", "--K", "4", "--T", "100")
    assert code == 0
    assert "lambda = (4, 3, 2, 1)" in text and "t = (16, 5, 10)" in text
    assert "valid" in text


def test_gen_round_trip(tmp_path):
    path = tmp_path / "e2.csv"
    assert run("gen", "--exp", "2", "--header", "--out", str(path))[0] == 0
    inst = load_instance(path, header=True)
    assert np.array_equal(inst.means, gen_experiment(2).means)
    code, text = run("gen", "--exp", "8")
    rows = [ln for ln in text.splitlines() if ln and not ln.startswith(("#", "sigma"))]
    assert code == 0 and rows[0] == "0.5,0.5" and len(rows) == 5
    assert "sigma,0.25,0.25" in text


def test_lb_staircase_and_i3(tmp_path):
    code, text = run("lb", "--T", "16", "--sigma", "1")
    assert code == 0 and "member" in text and "not a member" not in text
    assert text.count("True") == 4
    assert "0.033833820809153" in text
    path = tmp_path / "i3.csv"
    path.write_text("1.0,0.2\n0.2,1.0\n0.5,0.1\n")
    code, text = run("lb", "--instance", str(path))
    assert code == 0 and "not a member" in text and "violated" in text


def test_run_writes_csv(tmp_path):
    path = tmp_path / "out.csv"
    code, _ = run("run", "--instance", "exp:8", "--algo", "ege-sr,uniform", "--budgets", "200,800",
                  "--trials", "20", "--out", str(path))
    assert code == 0
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(COLUMNS) and len(lines) == 5
    code, text = run("run", "--instance", "exp:8", "--algo", "ege-sr", "--algo", "uniform",
                     "--budgets", "200,800", "--trials", "20")
    assert code == 0 and text == path.read_text()


def test_exit_codes(tmp_path):
    assert run("gaps", "--bogus")[0] == 2
    assert run("schedule", "--algo", "nope", "--K", "4", "--T", "100")[0] == 2
    assert run("run", "--instance", "exp:8", "--algo", "ege-sr", "--budgets", "a,b")[0] == 2
    assert run("gaps", "--instance", str(tmp_path / "missing.csv"))[0] == 1
    assert run("schedule", "--algo", "ege-sr", "--K", "5", "--T", "4")[0] == 1
    assert run("run", "--instance", "exp:8", "--algo", "ege-sr", "--budgets", "100",
               "--out", str(tmp_path / "no" / "x.csv"))[0] == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "psifb", "schedule", "--algo", "ege-sh", "--K", "8",
                           "--T", "120"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "t = (5, 10, 20)" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "psifb"], capture_output=True, text=True, check=False)
    assert proc.returncode == 2
