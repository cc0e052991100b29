import csv
import io
import json
import subprocess
import sys

import pytest

from qdspec.cli import ParseError, main, parse_args, parse_complex, parse_grid


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def csv_rows(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def test_parse_complex():
    assert parse_complex("0.3") == 0.3
    assert parse_complex("0.3,-1e-2") == complex(0.3, -0.01)
    with pytest.raises(ParseError):
        parse_complex("1,2,3")
    with pytest.raises(ParseError):
        parse_complex("abc")


def test_parse_grid():
    g = parse_grid("-3:3:61")
    assert len(g) == 61 and g[0] == -3 and g[-1] == 3
    for bad in ("1:2", "0:1:0", "a:b:c"):
        with pytest.raises(ParseError):
            parse_grid(bad)


def test_gamma_example(capsys):
    code, out, _ = run_cli(capsys, "gamma", "--b", "1", "--x", "10", "--format", "csv")
    assert code == 0
    rows = csv_rows(out)
    assert len(rows) == 1
    assert abs(complex(float(rows[0]["gamma_re"]), float(rows[0]["gamma_im"])) - 1) < 1e-6


def test_phi_example(capsys):
    code, out, _ = run_cli(capsys, "phi", "--b", "1", "--k", "0.3", "--grid", "-3:3:61")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["rows"]) == 61
    assert all(isinstance(r["phi"], float) for r in doc["rows"])


def test_provenance_header(capsys):
    _, out, _ = run_cli(capsys, "phi", "--k", "0.3", "--x", "0.5")
    head = json.loads(out)["provenance"]
    for key in ("sigma", "delta", "k_exclusion", "quad_abs_tol", "transform", "seed"):
        assert key in head
    assert head["b"] == 1.0


def test_csv_json_identical(capsys):
    args = ["jost", "--b", "1.2", "--k", "0.3", "--grid", "-1:1:5"]
    _, js, _ = run_cli(capsys, *args, "--format", "json")
    _, cs, _ = run_cli(capsys, *args, "--format", "csv")
    jrows = json.loads(js)["rows"]
    crows = csv_rows(cs)
    assert len(jrows) == len(crows) == 5
    for j, c in zip(jrows, crows):
        for col in ("f_plus", "f_minus"):
            assert float(c[f"{col}_re"]) == j[col]["re"]
            assert float(c[f"{col}_im"]) == j[col]["im"]


def test_deterministic(capsys):
    args = ["scattering", "--grid", "0.1:1:4", "--seed", "3"]
    assert run_cli(capsys, *args)[1] == run_cli(capsys, *args)[1]


def test_config_file(tmp_path, capsys):
    conf = tmp_path / "run.conf"
    conf.write_text("b = 1.4\nk = 0.2\nx = 0.5\nformat = csv\n")
    cfg = parse_args(["phi", "--config", str(conf), "--b", "0.9"])
    assert cfg.b == 0.9 and cfg.k == 0.2 and cfg.format == "csv"
    code, out, _ = run_cli(capsys, "phi", "--config", str(conf))
    assert code == 0 and "# b: 1.4" in out


def test_out_file(tmp_path, capsys):
    path = tmp_path / "s.json"
    code, out, _ = run_cli(capsys, "scattering", "--k", "0.4", "--out", str(path))
    assert code == 0 and out == ""
    row = json.loads(path.read_text())["rows"][0]
    assert abs(row["abs_S"] - 1) < 1e-10


def test_resolvent_command(capsys):
    code, out, _ = run_cli(capsys, "resolvent", "--k", "0,0.3", "--x", "0.4", "--y", "-0.7")
    assert code == 0
    assert len(json.loads(out)["rows"]) == 1


@pytest.mark.parametrize("argv", [
    ["nonsense"],
    ["phi", "--k", "1,2,3"],
    ["phi", "--grid", "0:1"],
    ["phi", "--format", "xml"],
    ["phi", "--b", "one"],
])
def test_parse_errors_exit_2(capsys, argv):
    assert run_cli(capsys, *argv)[0] == 2


@pytest.mark.parametrize("argv", [
    ["resolvent", "--k", "0.3", "--x", "0", "--y", "1"],
    ["phi", "--b", "-1", "--k", "0.3", "--x", "0"],
    ["phi", "--x", "0"],
    ["scattering", "--k", "0"],
    ["transform", "--psi", "nope"],
    ["verify", "--suites", "12"],
    ["gamma", "--x", "0", "--tol", "-1"],
])
def test_precondition_errors_exit_3(capsys, argv):
    assert run_cli(capsys, *argv)[0] == 3


def test_verify_quick_suites(capsys):
    code, out, err = run_cli(capsys, "verify", "--b", "1", "--tol", "1e-5", "--suites", "1,2,9")
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] is True
    assert [s["suite"] for s in doc["suites"]] == [1, 2, 9]
    assert err.count("[PASS]") == 3


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qdspec.cli", "gamma", "--x", "0.3", "--format", "csv"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert len(csv_rows(proc.stdout)) == 1
