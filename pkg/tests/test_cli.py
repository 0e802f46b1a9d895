import json
import shutil
import subprocess
from pathlib import Path

import numpy as np
import pytest

from zenolab.cli import main
from zenolab.harness.config import builtin_scenario, matrix_to_json
from zenolab.superop import expm_superop

from conftest import dephasing

FIXTURES = Path(__file__).parent / "fixtures"


def test_run_writes_all_outputs(tmp_path, capsys):
    rc = main(["run", "--scenario", "classic_zeno", "--ns", "4,16,64",
               "--out", str(tmp_path / "r.csv"), "--json", str(tmp_path / "r.json"),
               "--plot", str(tmp_path / "r.svg")])
    assert rc == 0
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == "n,error,norm_kind" and [l.split(",")[0] for l in lines[1:]] == ["4", "16", "64"]
    data = json.loads((tmp_path / "r.json").read_text())
    assert data["scenario"] == "classic_zeno" and len(data["records"]) == 3
    assert (tmp_path / "r.svg").read_text().lstrip().startswith("<?xml")
    assert capsys.readouterr().out == ""


def test_run_prints_csv_without_outputs(capsys):
    assert main(["run", "--scenario", "identity_m", "--ns", "2,4", "--norm", "rank1"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "n,error,norm_kind" and out[1].endswith(",rank1_lower")


def test_run_golden_file(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["run", "--scenario", "classic_zeno", "--seed", "7", "--out", str(out)]) == 0
    assert out.read_bytes() == (FIXTURES / "classic_zeno_seed7.csv").read_bytes()


def test_run_scenario_file_and_seed(tmp_path):
    f = tmp_path / "s.json"
    f.write_text(json.dumps(builtin_scenario("damped_rabi").to_json()))
    out = tmp_path / "j.json"
    assert main(["run", "--scenario", str(f), "--ns", "4,8", "--seed", "3", "--json", str(out)]) == 0
    assert json.loads(out.read_text())["metadata"]["seed"] == 3


def test_validation_failures_exit_2(tmp_path, capsys):
    assert main(["run", "--scenario", str(tmp_path / "missing.json")]) == 2
    data = builtin_scenario("classic_zeno").to_json()
    data["measurement"] = {"superop": matrix_to_json(expm_superop(dephasing(0.001)))}
    data["gap_min"] = 0.1
    f = tmp_path / "gapless.json"
    f.write_text(json.dumps(data))
    assert main(["run", "--scenario", str(f)]) == 2
    assert "delta" in capsys.readouterr().err
    data["generator"]["hamiltonian"] = matrix_to_json(np.array([[0, 1], [0, 0]]))
    f.write_text(json.dumps(data))
    assert main(["run", "--scenario", str(f)]) == 2
    assert "hamiltonian" in capsys.readouterr().err
    assert main(["run", "--scenario", "classic_zeno", "--ns", "8,4"]) == 2


def test_non_convergence_exits_3(tmp_path, monkeypatch):
    import zenolab.timedep as td

    monkeypatch.setattr(td, "MAX_STEPS", 4)
    rc = main(["run", "--scenario", "timedep_drive", "--ns", "8"])
    assert rc == 3


def test_bad_arguments_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["run", "--scenario", "classic_zeno", "--ns", "a,b"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["check", "--suite", "nope"])
    assert exc.value.code == 2


def test_spectrum_prints_report(capsys):
    assert main(["spectrum", "--scenario", "damped_rabi"]) == 0
    out = capsys.readouterr().out
    assert "scenario: damped_rabi" in out and "gap_ok = True" in out and "delta = " in out


def test_check_single_suite(capsys):
    assert main(["check", "--suite", "projectors"]) == 0
    assert capsys.readouterr().out.startswith("[PASS] projectors")


@pytest.mark.skipif(shutil.which("zeno") is None, reason="console script not installed")
def test_console_script_spectrum():
    proc = subprocess.run(["zeno", "spectrum", "--scenario", "classic_zeno"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0 and "peripheral multiplicity = 2" in proc.stdout
