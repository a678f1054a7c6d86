import json
import subprocess
import sys
from math import sqrt

import pytest

from kstab.cli_reports import main

S6 = sqrt(6)


def _diag(*d):
    return [[[d[i] if i == j else 0 for j in range(len(d))] for i in range(len(d))]]


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_demo(capsys):
    code, out, _ = run_cli(capsys, "validate", "--model", "p3_fixed")
    doc = json.loads(out)
    assert code == 0 and doc["valid"] and doc["diagnostics"] == []


def test_validate_reports_non_hermitian(capsys, tmp_path, demos):
    doc = demos["balanced_p3"].to_dict()
    doc["generators"][1][0][0][1] = [5.0, 0.0]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run_cli(capsys, "validate", "--model", str(path))
    diags = json.loads(out)["diagnostics"]
    assert code == 1
    assert any("generator 1 block 0" in d["message"] for d in diags)


def test_validate_dimension_for_verdict(capsys, tmp_path):
    from kstab.kahler_models import projective_model
    path = tmp_path / "p2.json"
    path.write_text(json.dumps(projective_model([2], [1.0]).to_dict()))
    code, out, _ = run_cli(capsys, "validate", "--model", str(path), "--for-command", "verdict")
    assert code == 1
    assert any(d["code"] == "E_DIMENSION" for d in json.loads(out)["diagnostics"])


def test_verdict_balanced_yes(capsys):
    code, out, _ = run_cli(capsys, "verdict", "--model", "balanced_p3")
    doc = json.loads(out)
    assert code == 0 and doc["result"]["verdict"] == "YES"
    assert doc["convention"]["calibrated"] is True
    assert "tolerances" in doc


def test_deterministic_output(capsys, monkeypatch):
    monkeypatch.setenv("KSTAB_THREADS", "1")
    _, first, _ = run_cli(capsys, "sweep", "--model", "p3_fixed", "--quantity", "sbar")
    monkeypatch.setenv("KSTAB_THREADS", "2")
    _, second, _ = run_cli(capsys, "sweep", "--model", "p3_fixed", "--quantity", "sbar")
    assert first == second


def test_bs_solve_header(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "bs-solve", "--m", "3", "--out", str(tmp_path / "bs"))
    assert code == 0
    head = json.loads((tmp_path / "bs.json").read_text())
    assert head["d0"] == pytest.approx(-0.0506606, rel=1e-3)
    assert (tmp_path / "bs.csv").read_text().startswith("r,psi,dpsi,ddpsi")


def test_sweep_inner_product_csv(capsys, tmp_path):
    out = tmp_path / "ip.csv"
    code, _, _ = run_cli(capsys, "sweep", "--model", "p3_fixed", "--quantity", "inner-product",
                         "--xi", json.dumps(_diag(3, -1 + S6, -1 - S6, -1)),
                         "--eta", json.dumps(_diag(3, -1 - S6, -1 + S6, -1)),
                         "--format", "csv", "--out", str(out))
    assert code == 0
    assert out.read_text().splitlines()[0] == "eps,value"
    summary = json.loads(out.with_suffix(".json").read_text())
    assert summary["result"]["slope"] >= 5.8


def test_invalid_threads(capsys, monkeypatch):
    monkeypatch.setenv("KSTAB_THREADS", "zero")
    code, _, err = run_cli(capsys, "sweep", "--model", "p3_fixed", "--quantity", "sbar")
    assert code == 1 and json.loads(err)["error"]["code"] == "E_USAGE"


def test_missing_model_file(capsys, tmp_path):
    code, _, err = run_cli(capsys, "weight", "--model", str(tmp_path / "none.json"),
                           "--gen", "0")
    assert code == 1 and json.loads(err)["error"]["code"] == "E_IO"


def test_bad_option(capsys):
    code, _, err = run_cli(capsys, "verdict", "--model", "balanced_p3", "--format", "xml")
    assert code == 1 and json.loads(err)["error"]["code"] == "E_USAGE"


def test_bad_delta(capsys):
    code, _, err = run_cli(capsys, "alldelta", "--model", "balanced_p3", "--delta-grid", "0.5")
    assert code == 1 and json.loads(err)["error"]["code"] == "E_USAGE"


def test_orbit_zero_undetermined_exit(capsys):
    code, out, _ = run_cli(capsys, "orbit-zero", "--model", "p1cubed_semistable")
    assert code == 2
    assert json.loads(out)["status"] != "ok"


def test_futaki_command(capsys):
    code, out, _ = run_cli(capsys, "futaki", "--model", "p3_fixed",
                           "--xi", json.dumps(_diag(0, 1, -1, 0)))
    doc = json.loads(out)
    assert code == 0 and doc["result"]["expansion"]["fut_blowup"] == 0.0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kstab", "validate", "--model", "p1p2_demo"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["valid"]
