import json
import subprocess
import sys

import pytest

from cartan.cli import main


def test_eval_exact(capsys):
    assert main(["eval", "--level", "2", "--t", "6/17"]) == 0
    assert capsys.readouterr().out.strip() == "(1/3,0,0,0,1/1728000)"


def test_eval_float(capsys):
    assert main(["eval", "--level", "1", "--t", "1/4", "--backend", "float"]) == 0
    assert capsys.readouterr().out.strip() == "(0.25,0.0,0.0,0.0,0.0)"


@pytest.mark.parametrize("argv", [["eval", "--level", "0", "--t", "1/2"], ["eval", "--level", "2", "--t", "3/2"],
                                  ["eval", "--level", "2", "--t", "abc"],
                                  ["distance", "--p", "1,2", "--q", "0,0,0,0,0"],
                                  ["curve", "--level", "3", "--format", "json"],
                                  ["overlap", "--harness", "lusin"]])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_kappa_must_be_positive():
    with pytest.raises(SystemExit) as exc:
        main(["eval", "--level", "2", "--t", "0", "--kappa", "0"])
    assert exc.value.code == 2


def test_staircase_json_written_under_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("CARTAN_OUTPUT_DIR", str(tmp_path))
    assert main(["curve", "--staircase", "1/2", "--axis", "x5", "--out", "st.json"]) == 0
    data = json.loads((tmp_path / "st.json").read_text())
    assert len(data["segments"]) == 8 and data["segments"][0]["speed"] == "1/2"
    assert not list(tmp_path.glob(".*.tmp"))


def test_modification_csv(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"a": "0", "b": "1", "lambda": "1", "Q": 5, "variant": "beta+"}))
    out = tmp_path / "m.csv"
    assert main(["curve", "--modification", str(spec), "--grid", "3", "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "t,x1,x2,x3,x4,x5" and len(rows) == 4
    assert rows[-1].split(",")[:3] == ["1", "0", "1"]


def test_level_csv(tmp_path):
    out = tmp_path / "g3.csv"
    assert main(["curve", "--level", "3", "--grid", "5", "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert len(rows) == 6 and rows[-1].startswith("1,1,0,")


def test_distance_json(capsys):
    assert main(["distance", "--p", "0,0,0,0,0", "--q", "3/5,4/5,-6/25,6/125,16/125", "--restarts", "1"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["upper"] == pytest.approx(1.0) and data["residual"] <= 1e-9


def test_verify_report(tmp_path):
    out = tmp_path / "report.json"
    assert main(["verify", "--level", "2", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert all(s["passed"] for s in data["suites"])


def test_console_entry_point_module():
    res = subprocess.run([sys.executable, "-m", "cartan.cli", "eval", "--level", "1", "--t", "1"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.strip() == "(1,0,0,0,0)"
