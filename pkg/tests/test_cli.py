import json
import subprocess
import sys

import pytest

from tttbudget.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, EXIT_USAGE, main
from tttbudget.config import default_config_path

CONFIG = str(default_config_path())


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def trial_lines(n, n_correct):
    rows = []
    for i in range(n):
        rows.append(json.dumps({
            "trial_id": f"t{i}", "setup": "side_by_side", "subject_id": f"s{i}",
            "ground_truth_remote": "C", "response_remote": "C" if i < n_correct else "B",
            "acr_assessment": 4, "acr_reference": 4,
        }))
    return "\n".join(rows) + "\n"


def test_budget_text_fails_on_nominal(capsys):
    code, out, _ = run(capsys, "budget", "--config", CONFIG)
    assert code == EXIT_FAIL
    assert "Overall: FAIL" in out and "multiview_channels" in out


def test_budget_pass_exit_zero(tmp_path, capsys):
    doc = json.loads(default_config_path().read_text())
    doc["capabilities"]["view_channels"] = 700
    doc["checklist"] = {k: True for k in doc["checklist"]}
    path = tmp_path / "good.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "budget", "--config", str(path), "--format", "machine")
    assert code == EXIT_OK
    assert json.loads(out)["overall_pass"] is True


def test_budget_out_file(tmp_path, capsys):
    out_file = tmp_path / "report.json"
    run(capsys, "budget", "--config", CONFIG, "--format", "machine", "--out", str(out_file))
    assert len(json.loads(out_file.read_text())["entries"]) == 14


def test_input_errors_exit_three(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"geometry": {"viewing_distance_m": -1}}')
    code, _, err = run(capsys, "budget", "--config", str(bad))
    assert code == EXIT_INPUT and "geometry.viewing_distance_m" in err
    code, _, err = run(capsys, "budget", "--config", str(tmp_path / "none.json"))
    assert code == EXIT_INPUT
    trials = tmp_path / "t.jsonl"
    trials.write_text('{"trial_id": "x", "extra": 1}\n')
    code, _, err = run(capsys, "evaluate", "--trials", str(trials))
    assert code == EXIT_INPUT and "extra" in err


def test_usage_error_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--config", CONFIG, "--delta-ms", "10", "--turns", "10"])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["plan", "--setup", "round_table", "--subjects", "4", "--seed", "1"])
    assert exc.value.code == EXIT_USAGE


def test_simulate_reports_closed_form(capsys):
    code, out, _ = run(capsys, "simulate", "--config", CONFIG, "--delta-ms", "150",
                       "--turns", "20000", "--seed", "7", "--format", "machine")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert "perceived_gaps_s" not in doc
    assert abs(doc["detectable_silence_rate"] - doc["closed_form_detectability"]) < 0.02


def test_simulate_gaps_flag(capsys):
    _, out, _ = run(capsys, "simulate", "--config", CONFIG, "--delta-ms", "0",
                    "--turns", "5", "--seed", "1", "--format", "machine", "--gaps")
    assert len(json.loads(out)["perceived_gaps_s"]) == 5


def test_evaluate_exit_codes(tmp_path, capsys):
    same = tmp_path / "same.jsonl"
    same.write_text(trial_lines(20, 10))
    code, out, _ = run(capsys, "evaluate", "--trials", str(same))
    assert code == EXIT_OK and "not distinguishable" in out
    told = tmp_path / "told.jsonl"
    told.write_text(trial_lines(20, 15))
    code, out, _ = run(capsys, "evaluate", "--trials", str(told), "--format", "machine")
    assert code == EXIT_FAIL
    assert json.loads(out)["p_value"] == pytest.approx(0.020695, abs=1e-6)


def test_plan(capsys):
    code, out, _ = run(capsys, "plan", "--setup", "symmetric", "--subjects", "9", "--seed", "3")
    assert code == EXIT_OK
    assert "unassigned (1)" in out


def test_config_subcommand(capsys):
    _, out, _ = run(capsys, "config", "schema")
    assert "capabilities" in json.loads(out)["properties"]
    _, out, _ = run(capsys, "config", "default")
    assert json.loads(out) == json.loads(default_config_path().read_text())


SEEDED = [
    ["simulate", "--config", CONFIG, "--delta-ms", "50", "--turns", "2000", "--seed", "11",
     "--format", "machine", "--gaps"],
    ["plan", "--setup", "side_by_side", "--subjects", "13", "--seed", "5", "--format", "machine"],
    ["budget", "--config", CONFIG, "--format", "machine"],
]


@pytest.mark.parametrize("argv", SEEDED, ids=lambda a: a[0])
def test_byte_identical_across_processes(argv):
    cmd = [sys.executable, "-m", "tttbudget", *argv]
    first = subprocess.run(cmd, capture_output=True, check=False)
    second = subprocess.run(cmd, capture_output=True, check=False)
    assert first.returncode in (EXIT_OK, EXIT_FAIL), first.stderr
    assert first.stdout == second.stdout and first.stdout
