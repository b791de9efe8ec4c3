import json
import subprocess
import sys

import pytest

from gaussextremal.cli import main, parse_grid
from gaussextremal.errors import DomainError


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_grid():
    assert parse_grid("lin:0:1:3") == [0.0, 0.5, 1.0]
    assert parse_grid("log:1:100:3") == pytest.approx([1.0, 10.0, 100.0])
    assert parse_grid("0.5,2") == [0.5, 2.0]
    for bad in ("lin:0:1", "log:-1:1:3", "a,b"):
        with pytest.raises(DomainError):
            parse_grid(bad)


def test_value_command(capsys):
    code, out, _ = run(["value", "--nu", "-0.5", "--lambda", "1", "--delta", "2", "--dim", "1",
                        "--side", "plus"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["value"] == pytest.approx(2.1415927, abs=1e-6)
    for key in ("inputs", "terms_used", "tail_bound", "elapsed"):
        assert key in rep


def test_idempotent_output(capsys):
    args = ["value", "--nu", "0", "--lambda", "0.7", "--side", "minus"]
    _, a, _ = run(args, capsys)
    _, b, _ = run(args, capsys)
    da, db = json.loads(a), json.loads(b)
    da.pop("elapsed"), db.pop("elapsed")
    assert json.dumps(da, sort_keys=True) == json.dumps(db, sort_keys=True)


def test_verify_quadrature(capsys):
    code, out, _ = run(["verify", "quadrature", "--nu", "0", "--lambda", "1", "--side", "minus",
                        "--rtol", "1e-5"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["status"] == "PASS"
    assert "closed_form" in rep and "quadrature" in rep and "error_estimate" in rep


@pytest.mark.parametrize("check", ["onesided", "interpolation"])
def test_verify_other_checks(check, capsys):
    code, out, _ = run(["verify", check, "--nu", "0.5", "--lambda", "2", "--side", "plus",
                        "--rtol", "1e-8"], capsys)
    assert code == 0 and json.loads(out)["status"] == "PASS"


def test_periodic_command(capsys):
    code, out, _ = run(["periodic", "--measure", "lebesgue", "--degree", "1", "--lambda", "1",
                        "--side", "minus"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["integral"] == pytest.approx(0.999993025, abs=1e-8)
    assert rep["error_estimate"] < 1e-12


def test_eval_and_csv_sweep(capsys, tmp_path):
    code, out, _ = run(["eval", "--nu", "0", "--lambda", "1", "--side", "minus", "--points", "lin:0:3:4"], capsys)
    rep = json.loads(out)
    assert code == 0 and len(rep["values"]) == 4 and rep["error_estimate"] < 1e-9
    target = tmp_path / "s.csv"
    code, _, _ = run(["--format", "csv", "--output", str(target), "sweep", "--nu=-0.5,0",
                      "--lambda", "log:0.5:2:2", "--side", "both"], capsys)
    lines = target.read_text().strip().splitlines()
    assert code == 0 and len(lines) == 1 + 8
    assert lines[0].split(",")[-1] == "value"


def test_hilbert_command(capsys, tmp_path):
    f = tmp_path / "p.csv"
    f.write_text("0\n1\n2.5\n")
    code, out, _ = run(["hilbert", "--points", str(f), "--delta", "1"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["margin_lower"] >= 0 and rep["margin_upper"] >= 0


def test_invalid_arguments_exit_two(capsys):
    code, _, err = run(["value", "--nu", "-1.5", "--lambda", "1"], capsys)
    assert code == 2 and json.loads(err)["error"] == "invalid_argument"
    code, _, _ = run(["value", "--nu", "0", "--lambda", "1", "--side", "up"], capsys)
    assert code == 2
    with pytest.raises(SystemExit) as exc:
        main(["value", "--bogus"])
    assert exc.value.code == 2


def test_numeric_failure_exit_three(capsys):
    code, _, err = run(["verify", "quadrature", "--nu", "0", "--lambda", "1", "--rtol", "1e-16"], capsys)
    diag = json.loads(err)
    assert code == 3 and diag["error"] == "ConvergenceError"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "gaussextremal", "value", "--nu", "0", "--lambda", "1"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["command"] == "value"
