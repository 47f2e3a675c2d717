import json

import pytest

from klr_lab.main import main

A2_PAIR = {"cartan": {"preset": "A2"}, "lambda": {"1": 1}, "beta": {"1": 1, "2": 1}}


@pytest.fixture
def run(tmp_path):
    """Run the CLI on a job file and return (status, report)."""
    def invoke(config_path, *extra):
        out = tmp_path / "report.json"
        status = main(["--config", config_path, "--out", str(out), "--log-level", "WARNING", *extra])
        return status, json.loads(out.read_text())
    return invoke


def test_verify_relations(run, write_job):
    status, report = run(write_job({**A2_PAIR, "task": "verify-relations"}))
    assert status == 0
    assert report["summary"]["failed"] == 0
    assert report["summary"]["total_claims"] > 0
    assert report["data"]["sequences"] == [[1, 2], [2, 1]]


def test_center_check_writes_a_verdict(run, write_job):
    status, report = run(write_job({**A2_PAIR, "task": "center-check"}))
    assert status == 0
    (verdict,) = report["verdicts"]
    assert verdict["lambda"] == {"1": 1, "2": 0}
    assert verdict["dim_center"] == verdict["dim_sym_image"] == 1
    assert verdict["verdict"] == "surjective"
    assert all(r["statement"] for r in report["reports"])


def test_task_override(run, write_job):
    status, report = run(write_job({**A2_PAIR, "task": "center-check"}), "--task", "full-basis")
    assert status == 0
    assert report["summary"]["task"] == "full-basis"
    assert report["data"]["basis"]["size"] == 1


def test_biweight_basis_reports_generators(run, write_job):
    job = {**A2_PAIR, "lambda": {"1": 1, "2": 1}, "task": "biweight-basis", "nu": [1, 2], "target": [2, 1]}
    status, report = run(write_job(job))
    assert status == 0
    assert report["data"]["basis"]["size"] == 1
    assert set(report["data"]["generators"]) == {"1", "2"}


def test_iota_check_rotates_gamma_for_every_label(run, write_job):
    job = {**A2_PAIR, "lambda": {"1": 1, "2": 1}, "gamma": [1, 2], "task": "iota-check"}
    status, report = run(write_job(job))
    assert status == 0
    assert report["summary"]["errors"] == {}
    assert [r["witness"]["i"] for r in report["reports"]] == [1, 2]


def test_trace_check_on_nilhecke(run, write_job):
    job = {"cartan": {"preset": "A1"}, "lambda": {"1": 2}, "beta": {"1": 2}, "task": "trace-check"}
    status, report = run(write_job(job))
    assert status == 0
    statuses = {r["claim"]: r["status"] for r in report["reports"]}
    assert statuses == {"symmetrizing-form": "pass", "top-degree": "info", "z-central": "pass"}


@pytest.mark.parametrize("job", [
    {"cartan": {"labels": [1, 2], "matrix": [[2, 1], [-1, 2]], "symmetrizers": [1, 1]}, "beta": {"1": 1}},
    {"cartan": {"preset": "E8"}, "beta": {"1": 1}},
    {"cartan": {"preset": "A2", "matrix": [[2, -1], [-1, 2]]}, "beta": {"1": 1}},
    {**A2_PAIR, "task": "no-such-task"},
    {**A2_PAIR, "beta": {}},
    {**A2_PAIR, "beta": {"7": 1}},
])
def test_bad_jobs_exit_with_config_status(run, write_job, job):
    status, report = run(write_job(job))
    assert status == 2
    assert "ConfigError" in report["summary"]["errors"]


def test_invalid_json(run, write_job):
    status, report = run(write_job("{not json"))
    assert status == 2
    assert report["summary"]["total_claims"] == 0


def test_missing_config_file(tmp_path):
    assert main(["--config", str(tmp_path / "absent.json"), "--out", str(tmp_path / "r.json")]) == 2
    assert main([]) == 2


def test_cocenter_basis_needs_multiplicity_free_beta(run, write_job):
    status, report = run(write_job({**A2_PAIR, "beta": {"1": 2}, "task": "cocenter-basis"}))
    assert status == 3
    assert "PreconditionError" in report["summary"]["errors"]


def test_empty_sweep(run, write_job):
    status, report = run(write_job({**A2_PAIR, "task": "sweep", "sweep": {"betas": [], "heights": []}}))
    assert status == 0
    assert report["summary"]["instances"] == 0


def test_sweep_without_grid(run, write_job):
    status, _ = run(write_job({**A2_PAIR, "task": "sweep"}))
    assert status == 2


def test_sweep_rejects_non_multiplicity_free_up_front(run, write_job):
    job = {**A2_PAIR, "task": "sweep", "sweep": {"betas": [{"1": 2, "2": 1}], "checks": ["cocenter-basis"]}}
    status, _ = run(write_job(job))
    assert status == 3


def test_small_sweep(run, write_job):
    job = {**A2_PAIR, "task": "sweep", "sweep": {"lambda_max": 1, "heights": [2], "checks": ["center-check"]}}
    status, report = run(write_job(job))
    assert status == 0
    assert report["summary"]["instances"] == 4
    assert report["summary"]["failed"] == 0
    assert len(report["verdicts"]) == 3
    assert any(r["claim"] == "zero-quotient" for r in report["reports"])


def test_print_schema(capsys):
    assert main(["--print-schema"]) == 0
    schema = json.loads(capsys.readouterr().out)
    assert "cartan" in schema["properties"]
    assert "lambda" in schema["properties"]


def test_report_goes_to_stdout_without_out(write_job, capsys):
    assert main(["--config", write_job({**A2_PAIR, "task": "full-basis"}), "--log-level", "ERROR"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["summary"]["task"] == "full-basis"
