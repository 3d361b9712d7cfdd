import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from polarhecke.cli import main
from polarhecke.report import EXIT_CAP, EXIT_INPUT, EXIT_MISMATCH, EXIT_OK

ROOT = Path(__file__).resolve().parents[1]
INPUTS = ROOT / "docs" / "inputs"
SCHEMA = json.loads((ROOT / "docs" / "report.schema.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    report = json.loads(out)
    jsonschema.validate(report, SCHEMA)
    assert report["summary"]["exit_code"] == code
    return code, report


@pytest.mark.parametrize(
    "command,name",
    [
        ("group", "group_a2.json"),
        ("group", "group_cyclic5.json"),
        ("algebra", "algebra_evaluation_map.json"),
        ("algebra", "algebra_a2_semisimple.json"),
        ("algebra", "algebra_g412.json"),
        ("rankone", "rankone.json"),
        ("symspace", "symspace_sl3.json"),
        ("track", "model_quadric.json"),
        ("track", "model_normal_crossings.json"),
        ("track", "model_sym3.json"),
    ],
)
def test_sample_inputs_pass(capsys, command, name):
    code, report = run(capsys, command, str(INPUTS / name))
    assert code == EXIT_OK
    assert report["summary"]["pass"]
    assert report["summary"]["checks_passed"] == report["summary"]["checks_total"]


def test_group_results(capsys):
    _, report = run(capsys, "group", '{"family": "A", "rank": 2}')
    assert report["results"]["order"] == 6
    assert report["results"]["degrees"] == [2, 3]


def test_algebra_results(capsys):
    code, report = run(capsys, "algebra", str(INPUTS / "algebra_evaluation_map.json"), "--min-polys", "--semisimple")
    assert code == EXIT_OK
    assert report["results"]["dim"] == 3


def test_symspace_bundled(capsys):
    code, report = run(capsys, "symspace", "bundled")
    assert code == EXIT_OK


def test_catalog_filter(capsys):
    code, report = run(capsys, "catalog", "--filter", "3.1")
    assert code == EXIT_OK
    assert report["results"]["total"] == 2


def test_input_errors(capsys, tmp_path):
    code, report = run(capsys, "group", '{"family": "Q", "rank": 2}')
    assert code == EXIT_INPUT
    bad = tmp_path / "bad.json"
    bad.write_text('{"family": "A",\n "rank": }')
    code, report = run(capsys, "group", str(bad))
    assert code == EXIT_INPUT
    assert "line 2" in report["summary"]["message"]
    code, _ = run(capsys, "track", '{"builtin": "nope"}')
    assert code == EXIT_INPUT


def test_cap_exit(capsys):
    code, report = run(capsys, "algebra", str(INPUTS / "algebra_a2_semisimple.json"), "--dim-cap", "2")
    assert code == EXIT_CAP
    code, _ = run(capsys, "group", '{"family": "A", "rank": 4}', "--order-cap", "10")
    assert code == EXIT_CAP
    code, _ = run(capsys, "track", str(INPUTS / "model_sym3.json"), "--loop", "walls", "--max-steps", "5")
    assert code == EXIT_CAP


def test_mismatch_exit(capsys):
    payload = json.loads((INPUTS / "algebra_evaluation_map.json").read_text())
    payload["expected"]["dim"] = 4
    code, report = run(capsys, "algebra", json.dumps(payload))
    assert code == EXIT_MISMATCH
    assert not report["summary"]["pass"]


def test_report_round_trip_and_determinism(capsys, tmp_path):
    out = tmp_path / "r.json"
    assert main(["algebra", str(INPUTS / "algebra_a2_semisimple.json"), "--semisimple", "--out", str(out)]) == 0
    first = json.loads(out.read_text())
    code, again = run(capsys, "algebra", str(out))
    assert code == EXIT_OK
    assert again["input_hash"] == first["input_hash"]
    assert again["results"] == first["results"]
    assert again["command"]["options"] == first["command"]["options"]
    code, third = run(capsys, "algebra", str(INPUTS / "algebra_a2_semisimple.json"), "--semisimple")
    assert third["results"] == first["results"] and third["input_hash"] == first["input_hash"]
    # a report from another command is rejected
    code, _ = run(capsys, "group", str(out))
    assert code == EXIT_INPUT


def test_track_is_deterministic(capsys):
    _, a = run(capsys, "track", str(INPUTS / "model_sym3.json"), "--seed", "3", "--random-pairs", "2")
    _, b = run(capsys, "track", str(INPUTS / "model_sym3.json"), "--seed", "3", "--random-pairs", "2")
    assert a["results"] == b["results"]


def test_console_script():
    proc = subprocess.run(
        [sys.executable, "-m", "polarhecke.cli", "group", '{"family": "cyclic", "m": 5}'],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["degrees"] == [5]
