#!/usr/bin/env python3
"""
CLI tests
=========

Drive ``dsm`` through main(argv) and check exit codes and result documents.
"""

import json
import math

import numpy as np
import pytest

from dsm_solver.cli import main, resolve_problem
from dsm_solver.config import DSMSettings
from dsm_solver.export import read_trace_csv, read_trace_json


@pytest.fixture(autouse=True)
def isolated(tmp_path, monkeypatch):
    """Run from an empty directory with no DSM_ environment overrides"""
    monkeypatch.chdir(tmp_path)
    for name in ("DSM_SEED", "DSM_LOG_LEVEL", "DSM_LOG_FORMAT", "DSM_T_MAX", "DSM_FD_STEP",
                 "DSM_HOMOTOPY_ESCAPE_RADIUS"):
        monkeypatch.delenv(name, raising=False)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    document = json.loads(captured.out) if captured.out.strip() else None
    return code, document, captured.err


class TestSolve:
    def test_identity_converges(self, capsys):
        code, document, _ = run(capsys, "solve", "--problem", "identity", "--u0", "0", "--f", "7")
        assert code == 0
        assert document["result"]["status"] == "Converged"
        assert document["result"]["u_final"][0] == pytest.approx(7.0, abs=1e-9)
        assert document["manifest"]["subcommand"] == "solve"

    def test_cubic_reaches_root(self, capsys):
        code, document, _ = run(capsys, "solve", "--problem", "monotone_cubic", "--u0", "0", "--f", "2")
        assert code == 0
        assert document["result"]["u_final"][0] == pytest.approx(1.0, abs=1e-9)
        assert document["result"]["g_final"] <= 1e-10

    def test_exp_escapes(self, capsys):
        code, document, _ = run(capsys, "solve", "--problem", "scalar_exp", "--u0", "0", "--f", "0",
                                "--escape-radius", "10")
        assert code == 2
        assert document["result"]["status"] == "EscapedBall"

    def test_negative_vector_syntax(self, capsys):
        code, document, _ = run(capsys, "solve", "--problem", "linear_spd", "--u0=-1,2", "--f", "3,3")
        assert code == 0
        assert document["result"]["u_final"] == pytest.approx([1.0, 1.0], abs=1e-9)

    def test_trace_formats_agree(self, capsys, tmp_path):
        common = ["solve", "--problem", "monotone_cubic", "--u0", "0", "--f", "2"]
        assert run(capsys, *common, "--trace", str(tmp_path / "t.csv"))[0] == 0
        assert run(capsys, *common, "--trace", str(tmp_path / "t.json"), "--format", "json")[0] == 0

        csv_records = read_trace_csv(str(tmp_path / "t.csv"))
        json_records = read_trace_json(str(tmp_path / "t.json"))
        assert len(csv_records) > 1
        assert csv_records == json_records
        assert csv_records[0]["t"] == 0.0

    def test_unknown_problem(self, capsys):
        code, document, err = run(capsys, "solve", "--problem", "nope", "--u0", "0", "--f", "1")
        assert code == 1
        assert document is None
        assert "monotone_cubic" in err

    def test_missing_argument_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["solve", "--problem", "identity", "--u0", "0"])
        assert info.value.code == 1

    def test_malformed_vector_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["solve", "--problem", "identity", "--u0", "a,b", "--f", "1"])
        assert info.value.code == 1

    def test_dimension_mismatch_reported(self, capsys):
        code, _, err = run(capsys, "solve", "--problem", "identity", "--u0", "0,0", "--f", "1")
        assert code == 1
        assert "Error" in err

    def test_no_command_prints_help(self, capsys):
        assert main([]) == 1
        assert "usage" in capsys.readouterr().err


class TestCertify:
    def test_identity_holds(self, capsys):
        code, document, _ = run(capsys, "certify", "--problem", "identity", "--u0", "0", "--f", "1",
                                "--R", "2", "--samples", "200")
        assert code == 0
        assert document["trap_ball"]["holds"] is True
        assert document["estimate"]["m_hat"] == pytest.approx(1.0)
        assert document["flow"]["result"]["status"] == "Converged"
        assert document["flow"]["velocity_bound"]["passed"] is True
        assert document["flow"]["trap_containment"]["passed"] is True
        assert document["flow"]["convergence_envelope"]["passed"] is True

    def test_exp_fails_trap_ball(self, capsys):
        code, document, _ = run(capsys, "certify", "--problem", "scalar_exp", "--u0", "0", "--f", "0",
                                "--R", "3", "--samples", "200")
        assert code == 2
        assert document["trap_ball"]["holds"] is False
        assert document["estimate"]["m_hat"] == pytest.approx(math.exp(3.0), rel=1e-9)
        assert document["flow"]["convergence_envelope"] is None

    def test_hadamard_constants(self, capsys):
        code, document, _ = run(capsys, "certify", "--problem", "trig_perturbed", "--u0", "0",
                                "--f", "0.1", "--R", "1", "--samples", "200", "--a", "0", "--b", "2")
        assert code == 0
        hadamard = document["hadamard"]
        assert hadamard["constants"]["c2"] == pytest.approx(0.2)
        assert hadamard["certificate"]["holds"] is True
        assert document["flow"]["hadamard_ball"]["passed"] is True

    def test_hadamard_needs_both_constants(self, capsys):
        code, _, _ = run(capsys, "certify", "--problem", "identity", "--u0", "0", "--f", "1",
                         "--R", "2", "--a", "0")
        assert code == 1


class TestScan:
    def test_exp_ratio_peaks_at_one(self, capsys):
        code, document, _ = run(capsys, "scan", "--problem", "scalar_exp", "--u0", "0",
                                "--R-grid", "0.5,1,2,4", "--samples", "200")
        assert code == 0
        witnesses = document["certificate"]["witnesses"]
        assert witnesses["max_ratio"] == pytest.approx(math.exp(-1.0), rel=1e-6)
        assert witnesses["argmax_R"] == 1.0
        assert document["certificate"]["holds"] is False

    def test_trap_ball_per_radius(self, capsys):
        code, document, _ = run(capsys, "scan", "--problem", "identity", "--u0", "0",
                                "--R-grid", "0.5,1,2", "--f", "1", "--samples", "100")
        assert code == 0
        assert [entry["holds"] for entry in document["trap_ball"]] == [False, True, True]

    def test_grid_must_increase(self, capsys):
        code, _, _ = run(capsys, "scan", "--problem", "identity", "--u0", "0", "--R-grid", "2,1")
        assert code == 1


class TestHomotopy:
    def test_cubic_limits_coincide(self, capsys):
        code, document, _ = run(capsys, "homotopy", "--problem", "monotone_cubic", "--u0=-1",
                                "--v", "2", "--f", "2")
        assert code == 0
        assert document["homotopy"]["verdict"] is True
        assert document["homotopy"]["max_limit_spread"] <= 1e-7
        assert len(document["homotopy"]["nodes"]) == 11

    def test_exp_sweep_fails(self, capsys):
        code, document, _ = run(capsys, "homotopy", "--problem", "scalar_exp", "--u0", "0",
                                "--v", "1", "--f", "0", "--nodes", "3", "--escape-radius", "10")
        assert code == 2
        assert document["homotopy"]["first_failure"] == 0

    def test_exp_sweep_escapes_by_default(self, capsys):
        code, document, _ = run(capsys, "homotopy", "--problem", "scalar_exp", "--u0", "0",
                                "--v", "2", "--f", "0", "--coincidence-tol", "0.01")
        assert code == 2
        statuses = {node["status"] for node in document["homotopy"]["nodes"]}
        assert statuses == {"EscapedBall"}
        assert document["homotopy"]["first_failure"] == 0
        assert document["manifest"]["parameters"]["flow"]["escape_radius"] == 10.0

    def test_stability_report(self, capsys):
        code, document, _ = run(capsys, "homotopy", "--problem", "identity", "--u0", "0",
                                "--v", "1", "--f", "5", "--nodes", "3", "--delta", "1e-3")
        assert code == 0
        assert document["stability"]["pass"] is True
        assert document["stability"]["sup_ratio"] == pytest.approx(1.0, abs=1e-6)


class TestProblemsAndRuns:
    def test_problem_listing(self, capsys):
        code, document, _ = run(capsys, "problems")
        assert code == 0
        names = [entry["name"] for entry in document["problems"]]
        assert len(names) >= 6
        assert "scalar_exp" in names

    def test_output_is_deterministic(self, capsys, tmp_path):
        target = str(tmp_path / "certify.json")
        argv = ["certify", "--problem", "coupled_2d", "--u0", "0,0", "--f", "0.1,0.1",
                "--R", "0.8", "--samples", "300", "--output", target]

        _, first, _ = run(capsys, *argv)
        with open(target, "rb") as f:
            first_bytes = f.read()
        _, second, _ = run(capsys, *argv)
        with open(target, "rb") as f:
            second_bytes = f.read()

        assert first == second
        assert first_bytes == second_bytes
        assert json.loads(first_bytes) == first

    def test_fd_step_from_environment(self, monkeypatch):
        monkeypatch.setenv("DSM_FD_STEP", "0.5")
        problem = resolve_problem("identity", np.zeros(2), DSMSettings())
        assert problem.fd_step == 0.5
        assert problem.dimension == 2

    def test_seed_from_environment(self, capsys, monkeypatch):
        monkeypatch.setenv("DSM_SEED", "11")
        _, document, _ = run(capsys, "problems")
        assert document["manifest"]["seed"] == 11

        _, document, _ = run(capsys, "problems", "--seed", "3")
        assert document["manifest"]["seed"] == 3

    def test_default_seed(self, capsys):
        _, document, _ = run(capsys, "problems")
        assert document["manifest"]["seed"] == 7
        assert document["manifest"]["tool_version"] == "1.0.0"
