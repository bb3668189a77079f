"""Command line interface: determinism, exit codes, formats."""

import json
import subprocess
import sys

import numpy as np
import pytest

from conftest import DESK_POSTERIOR, make_desk_bundle

from leakrisk.cli import main
from leakrisk.model import dump_scenario


@pytest.fixture(scope="module")
def desk_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("scenario") / "desk.json"
    path.write_text(dump_scenario(make_desk_bundle()), encoding="utf-8")
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# --- validate ------------------------------------------------------------------


def test_validate_builtin(capsys):
    code, out, err = run(capsys, "validate")
    assert code == 0 and err == ""
    assert "ok: scenario 'gas-compressor'" in out


def test_validate_scenario_file(capsys, desk_file):
    code, out, _ = run(capsys, "validate", "--scenario", desk_file)
    assert code == 0
    assert "ok: scenario 'desk'" in out
    assert "levels: run, reduce, stop" in out


def test_validate_rejects_broken_file(capsys, tmp_path):
    bad = tmp_path / "broken.json"
    bad.write_text("{not json", encoding="utf-8")
    code, out, err = run(capsys, "validate", "--scenario", str(bad))
    assert code == 1 and out == ""
    assert err.startswith("error:")


def test_missing_file_is_an_error_not_a_traceback(capsys):
    code, _, err = run(capsys, "validate", "--scenario", "does/not/exist.json")
    assert code == 1 and err.startswith("error:")


# --- diagnose ------------------------------------------------------------------


def test_diagnose_desk_posterior(capsys, desk_file):
    code, out, _ = run(
        capsys,
        "diagnose",
        "--scenario",
        desk_file,
        "--evidence",
        '{"alarm": "on"}',
        "--format",
        "json",
    )
    assert code == 0
    doc = json.loads(out)
    got = [doc["aggregate"][s] for s in ("none", "progressive", "catastrophic")]
    assert np.allclose(got, DESK_POSTERIOR, atol=1e-4)
    assert doc["severity"] == "intermediate"  # P(leak) 0.625, P(cat) below 0.25
    assert doc["response_label"] == "normative-decision-support"


def test_diagnose_table_format(capsys, desk_file):
    code, out, _ = run(capsys, "diagnose", "--scenario", desk_file, "--format", "table")
    assert code == 0
    assert "aggregate:" in out and "severity:" in out


def test_diagnose_evidence_from_file(capsys, desk_file, tmp_path):
    evidence = tmp_path / "evidence.json"
    evidence.write_text('{"alarm": "off"}', encoding="utf-8")
    code, out, _ = run(
        capsys, "diagnose", "--scenario", desk_file, "--evidence", str(evidence),
        "--format", "json",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["evidence"] == {"alarm": "off"}
    assert doc["aggregate"]["none"] > 0.9


def test_diagnose_unknown_node_exit_code(capsys, desk_file):
    code, _, err = run(
        capsys, "diagnose", "--scenario", desk_file, "--evidence", '{"ghost": "x"}'
    )
    assert code == 1 and "ghost" in err


# --- recommend -----------------------------------------------------------------


def test_recommend_zero_ignition_loss_keeps_running(capsys):
    code, out, _ = run(
        capsys, "recommend", "--ignition-loss", "0", "--format", "json"
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["chosen"] == 0  # nothing to protect against, production wins


def test_recommend_table_lists_all_levels(capsys, desk_file):
    code, out, _ = run(
        capsys, "recommend", "--scenario", desk_file, "--evidence", '{"alarm": "on"}'
    )
    assert code == 0
    for name in ("run", "reduce", "stop"):
        assert name in out
    assert "chosen:" in out


def test_recommend_horizon_passthrough(capsys, desk_file):
    code, out, _ = run(
        capsys, "recommend", "--scenario", desk_file, "--horizon", "1.0",
        "--format", "json",
    )
    assert code == 0
    assert json.loads(out)["horizon_used"] == 1.0


def test_recommend_level_by_name_and_index(capsys, desk_file):
    code, out_name, _ = run(
        capsys, "recommend", "--scenario", desk_file, "--level", "reduce",
        "--format", "json",
    )
    assert code == 0
    code, out_index, _ = run(
        capsys, "recommend", "--scenario", desk_file, "--level", "1",
        "--format", "json",
    )
    assert code == 0
    assert out_name == out_index
    code, _, err = run(capsys, "recommend", "--scenario", desk_file, "--level", "warp")
    assert code == 1 and "warp" in err


# --- plan ----------------------------------------------------------------------


def test_plan_reports_value_of_information(capsys, desk_file):
    code, out, _ = run(
        capsys, "plan", "--scenario", desk_file, "--evidence", '{"alarm": "on"}',
        "--format", "json",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["value_of_information"] == pytest.approx(
        doc["best_eu"] - doc["act_now_eu"], abs=1e-12
    )
    assert doc["value_of_information"] >= -1e-12


def test_plan_constraint_overrides(capsys, desk_file):
    code, out, _ = run(
        capsys, "plan", "--scenario", desk_file,
        "--constraints", '{"expansion_budget": 1}', "--format", "json",
    )
    assert code == 0
    assert json.loads(out)["expansions_used"] == 1
    code, _, err = run(
        capsys, "plan", "--scenario", desk_file, "--constraints", '{"budget": 1}'
    )
    assert code == 1 and "unknown constraint fields" in err


def test_plan_table_format(capsys, desk_file):
    code, out, _ = run(
        capsys, "plan", "--scenario", desk_file, "--format", "table"
    )
    assert code == 0
    assert "act-now EU:" in out and "root choice:" in out


def test_plan_is_deterministic_for_fixed_seed(capsys, desk_file):
    argv = (
        "plan", "--scenario", desk_file, "--evidence", '{"alarm": "on"}',
        "--heuristic", "probability-weighted", "--seed", "23", "--format", "json",
    )
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


# --- simulate ------------------------------------------------------------------


def test_simulate_csv_shape_and_determinism(capsys, desk_file):
    argv = (
        "simulate", "--scenario", desk_file, "--steps", "3",
        "--trajectories", "2000", "--seed", "7",
    )
    code, first, _ = run(capsys, *argv)
    assert code == 0
    lines = first.strip().splitlines()
    assert lines[0] == "step,level,ignition_prob,mean_cost"
    assert len(lines) == 1 + 3 * 4  # three levels, steps 0..3
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_simulate_curves_ordered_by_level(capsys, desk_file):
    code, out, _ = run(
        capsys, "simulate", "--scenario", desk_file, "--steps", "4",
        "--trajectories", "4000", "--seed", "1", "--evidence", '{"alarm": "on"}',
    )
    assert code == 0
    rows = [line.split(",") for line in out.strip().splitlines()[1:]]
    by_level = {}
    for step, level, p_ign, _cost in rows:
        by_level.setdefault(level, {})[int(step)] = float(p_ign)
    final = [by_level[name][4] for name in ("run", "reduce", "stop")]
    assert final[0] >= final[1] >= final[2]  # shutting down curbs ignition risk


# --- output routing --------------------------------------------------------------


def test_out_flag_writes_file_instead_of_stdout(capsys, tmp_path, desk_file):
    target = tmp_path / "result.json"
    code, out, _ = run(
        capsys, "diagnose", "--scenario", desk_file, "--format", "json",
        "--out", str(target),
    )
    assert code == 0 and out == ""
    doc = json.loads(target.read_text(encoding="utf-8"))
    assert doc["aggregate"]["none"] == pytest.approx(0.90, abs=1e-9)


def test_no_subcommand_exits_with_usage():
    with pytest.raises(SystemExit):
        main([])


def test_module_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "leakrisk.cli", "recommend", "--ignition-loss", "0",
         "--format", "json"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["chosen"] == 0
