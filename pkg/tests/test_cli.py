import json
import shutil
import subprocess
from importlib import resources

import jsonschema
import pytest

from qaw.cli import decimal_string, main, parse_n_range
from qaw.errors import InvalidArgumentError
from mpmath import mp

SCHEMA = json.loads(resources.files("qaw").joinpath("report_schema.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv, "--format", "json")
    report = json.loads(out)
    jsonschema.validate(report, SCHEMA)
    return code, report


@pytest.mark.parametrize(
    "v, digits, expected",
    [
        (mp.mpf(1), 50, "1"),
        (7, 10, "7"),
        (mp.mpf("0.125"), 10, "0.125"),
        (mp.mpc(1, -2), 10, "1-2j"),
        (mp.mpc("0.5", 0), 10, "0.5"),
        (True, 5, "true"),
    ],
)
def test_decimal_string(v, digits, expected):
    assert decimal_string(v, digits) == expected


def test_n_range_parsing():
    assert parse_n_range("2..5") == (2, 5)
    for bad in ("5..2", "1-3", "a..b"):
        with pytest.raises(InvalidArgumentError):
            parse_n_range(bad)


def test_eval_trivial_values(capsys):
    code, rep = run_json(capsys, "eval", "V", "0", "--x", "0.37")
    assert code == 0 and rep["values"][0]["value"] == "1"
    code, rep = run_json(capsys, "eval", "Aq", "0")
    assert code == 0 and rep["values"][0]["value"] == "1"


def test_eval_digits_and_self_consistency(capsys):
    _, a = run_json(capsys, "eval", "p", "3", "--x", "0.25", "--digits", "30", "--no-timestamp")
    _, b = run_json(capsys, "eval", "p", "3", "--x", "0.25", "--digits", "30", "--no-timestamp")
    assert a == b
    assert a["values"][0]["value"] == "3333.05621505666662145543981481"


def test_eval_complex_point_and_csv(capsys):
    code, out = run(capsys, "eval", "p", "--n-range", "0..2", "--x", "0.3+0.5j", "--digits", "20", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "target,n,point,value" and len(lines) == 4
    assert lines[3].endswith("j")


def test_eval_theta_weight_pretty(capsys):
    code, out = run(capsys, "eval", "theta4", "0.7", "--digits", "20", "--format", "pretty")
    assert code == 0 and "0.087593175503646886387" in out
    code, rep = run_json(capsys, "eval", "weight", "--x", "0.5", "--digits", "20")
    assert code == 0 and rep["values"][0]["value"].startswith("0.51477991688730333612")


def test_config_file_and_flags(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"q": "0.3", "t": ["1", "2", "3"], "x": ["0.4"], "digits": 20}))
    code, rep = run_json(capsys, "eval", "V", "2", "--config", str(cfg), "--digits", "25")
    assert code == 0 and rep["config"]["q"] == "0.3" and rep["config"]["digits"] == 25


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "p", "2", "--t", "1,2", "--x", "0.1"],
        ["eval", "V", "2", "--x", "0.1", "--q", "1.5"],
        ["eval", "V", "2", "--x", "0.1", "--digits", "10"],
        ["eval", "V", "--x", "0.1"],
        ["eval", "V", "2", "--x", "zz"],
        ["eval", "V", "--n", "1", "--n-range", "0..2", "--x", "0.1"],
        ["eval", "weight", "--t", "2,2,2,2", "--x", "0.1"],
    ],
)
def test_invalid_configuration_exits_2(capsys, argv):
    code, _ = run(capsys, *argv)
    assert code == 2


def test_bad_config_file(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"unknown": 1}))
    assert main(["eval", "Aq", "1", "--config", str(cfg)]) == 2


def test_numeric_failure_exits_3(capsys):
    # 1 + q^2 / t1 t2 = 0 makes the leading recurrence coefficient vanish
    code, _ = run(capsys, "eval", "V", "2", "--t=-0.25,1,3", "--x", "0.1")
    assert code == 3


def test_verify_orthogonality_degree_range(capsys):
    code, rep = run_json(capsys, "verify", "orthogonality", "--n", "5", "--digits", "20")
    assert code == 2
    assert rep["error"]["type"] == "DegreeRangeError"


def test_verify_identities_report(capsys):
    code, rep = run_json(capsys, "verify", "identities", "--digits", "30")
    assert code == 0 and rep["suite"] == "identities" and "timestamp" in rep
    assert all(c["pass"] for c in rep["checks"])


def test_verify_asymptotics_emits_rates(capsys):
    code, rep = run_json(capsys, "verify", "asymptotics", "--regime", "soft-edge", "--digits", "30")
    assert code == 0
    (check,) = rep["checks"]
    assert float(check["details"]["rate"]) > 0


def test_verify_asymptotics_exit_1_on_failed_check(capsys):
    code, rep = run_json(capsys, "verify", "asymptotics", "--regime", "theta-degenerate", "--digits", "30")
    assert code == 1 and rep["checks"][0]["pass"] is False


def test_zeros_single_and_growth(capsys):
    code, rep = run_json(capsys, "zeros", "--n", "1", "--digits", "20")
    assert code == 0 and rep["zeros"] == [{"n": 1, "zeros": ["7"]}]
    code, rep = run_json(capsys, "zeros", "--n-range", "1..12", "--digits", "20")
    assert code == 0 and [len(z["zeros"]) for z in rep["zeros"]] == list(range(1, 13))
    assert abs(float(rep["growth"][-1]["ratio_times_q2"]) - 1) < 0.05
    code, out = run(capsys, "zeros", "--n-range", "2..3", "--digits", "20", "--format", "csv")
    assert out.splitlines()[0] == "n,index,zero" and len(out.splitlines()) == 6


def test_out_file_determinism(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["verify", "identities", "--digits", "25", "--no-timestamp", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


@pytest.mark.skipif(shutil.which("qaw") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["qaw", "eval", "Aq", "0", "--format", "csv"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1].endswith(",1")
