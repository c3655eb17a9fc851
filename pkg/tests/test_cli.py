import json
import sys
from pathlib import Path

from adaptive_bkb.cli import main

ASSETS = Path(__file__).parent / "assets"


def test_list_objectives(capsys):
    assert main(["list-objectives"]) == 0
    out = capsys.readouterr().out
    assert "branin" in out and "hartmann6\tdim=6" in out and "[0, 1]^6" in out


def test_validate_config(tmp_path, capsys):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"objective": "branin", "budget": 5}))
    assert main(["validate-config", str(p)]) == 0
    assert json.loads(capsys.readouterr().out)["budget"] == 5
    p.write_text(json.dumps({"objective": "branin", "bogus": 1}))
    assert main(["validate-config", str(p)]) == 2
    assert "bogus" in capsys.readouterr().err


def test_run_writes_outputs(tmp_path, capsys):
    out = tmp_path / "o"
    code = main(["run", "--objective", "hartmann3", "--budget", "6", "--reps", "2", "--out", str(out)])
    assert code == 0
    assert {p.name for p in out.iterdir()} >= {"summary.json", "adabkb_hartmann3_seed0.jsonl",
                                               "adabkb_hartmann3_seed1.csv"}
    assert "average regret at t=6" in capsys.readouterr().out


def test_flags_override_config(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"external_cmd": "nonexistent", "bounds": [[0, 1]], "budget": 50}))
    out = tmp_path / "o"
    assert main(["run", "--config", str(p), "--objective", "hartmann3", "--budget", "4",
                 "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["config"]["objective"] == "hartmann3" and summary["config"]["budget"] == 4


def test_external_run(tmp_path):
    cmd = f"{sys.executable} {ASSETS / 'misbehaving_child.py'} sum"
    assert main(["run", "--external-cmd", cmd, "--bounds=-1:1,0:1", "--budget", "5",
                 "--lengthscale", "0.5"]) == 0


def test_config_error_exit_code(capsys):
    assert main(["run", "--objective", "nope"]) == 2
    assert "error" in capsys.readouterr().err


def test_all_failed_exit_code():
    cmd = f"{sys.executable} {ASSETS / 'misbehaving_child.py'} exit"
    assert main(["run", "--external-cmd", cmd, "--bounds", "0:1", "--budget", "3"]) == 1
