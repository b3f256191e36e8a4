import csv
import io
import json
import subprocess
import sys

import pytest

from srgb.cli import main


def run_cli(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_tables_text_and_json(capsys):
    code, out, _ = run_cli(capsys, "tables", "--space", "affine", "--dist", "h1", "--param", "0", "--L", "4")
    assert code == 0
    report = json.loads(out)
    assert report["connection_discrepancies"] == []
    assert [d["entry"] for d in report["bracket_discrepancies"]] == ["[X1,X3]"]
    assert report["grid"][0]["max_table_difference"] == 0
    code, out, _ = run_cli(capsys, "tables", "--param", "0", "--L", "4", "--format", "text")
    assert code == 0 and "nabla_X3 X3" in out


def test_curve_csv(capsys):
    code, out, _ = run_cli(capsys, "curve", "--fixture", "affine-line", "--param", "0.25", "--L", "1e2,1e4,1e6",
                           "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 3
    assert all(float(r["k_L"]) == pytest.approx(0.75, abs=1e-12) for r in rows)
    assert "\r\n" in out


def test_gauss_bonnet_pass(capsys):
    code, out, _ = run_cli(capsys, "gauss-bonnet", "--fixture", "affine-x3-disk", "--param", "0", "--L", "1,4,100")
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_gate_failure_exit_code(capsys):
    code, _, _ = run_cli(capsys, "gauss-bonnet", "--fixture", "affine-x3-disk", "--param", "0", "--L", "4",
                         "--tol", "1e-20")
    assert code == 1


@pytest.mark.parametrize(
    "args",
    [
        ["gauss-bonnet", "--fixture", "nope"],
        ["gauss-bonnet", "--fixture", "affine-x3-disk", "--L", "-1"],
        ["curve", "--fixture", "affine-line", "--param", ""],
        ["curve"],
        ["curve", "--fixture", "affine-line", "--format", "text"],
    ],
)
def test_config_errors(capsys, args):
    code, _, err = run_cli(capsys, *args)
    assert code == 2
    assert "error" in err


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"command": "curve", "fixture": "affine-line", "param": [0.5], "L": [1, 10]}))
    code, out, _ = run_cli(capsys, "curve", "--config", str(cfg), "--param", "0.25")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert [r["k_L"] for r in rows] == pytest.approx([0.75, 0.75])
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"colour": "red"}))
    assert run_cli(capsys, "curve", "--config", str(bad))[0] == 2


def test_output_file_and_surface(tmp_path, capsys):
    target = tmp_path / "s.csv"
    code, out, _ = run_cli(capsys, "surface", "--fixture", "affine-x3-ellipse", "--L", "1e2,1e4",
                           "--format", "csv", "--output", str(target))
    assert code == 0 and out == ""
    rows = list(csv.DictReader(io.StringIO(target.read_text(encoding="utf-8"))))
    assert len(rows) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "srgb", "curve", "--fixture", "affine-line", "--L", "4"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["rows"][0]["k_L"] == pytest.approx(1.0)
