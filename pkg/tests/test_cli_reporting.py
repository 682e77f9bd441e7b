import json
import math
import subprocess
import sys

import pytest

import gevlab.cli_reporting as cli
from gevlab.errors import JobSpecError

MINIMAL = '{"command":"classify-spectrum","spectrum":{"power_law":{"a_re":1,"p_re":1,"a_im":1,"p_im":1}},"beta":1}'


# -- parsing -------------------------------------------------------------------


def test_parse_minimal_job():
    job = cli.parse_jobspec(MINIMAL)
    assert job.command == "classify-spectrum"
    assert job.beta == 1.0
    assert job.spectrum.kind == "power_law"


def test_missing_required_field_names_it():
    bad = '{"command":"classify-vector","spectrum":{"power_law":{"a_re":1,"p_re":1,"a_im":0,"p_im":0}},"vectors":[{"power_decay":{"c":1,"r":2}}]}'
    with pytest.raises(JobSpecError) as err:
        cli.parse_jobspec(bad)
    assert "beta" in str(err.value)


def test_negative_beta_is_a_semantic_error():
    bad = MINIMAL.replace('"beta":1', '"beta":-1')
    with pytest.raises(JobSpecError) as err:
        cli.parse_jobspec(bad)
    assert "beta must be >= 0" in str(err.value)


def test_unknown_field_rejected_with_path():
    bad = MINIMAL[:-1] + ',"extra":1}'
    with pytest.raises(JobSpecError) as err:
        cli.parse_jobspec(bad)
    assert "unknown field 'extra'" in str(err.value)


def test_json_errors_are_positioned():
    with pytest.raises(JobSpecError) as err:
        cli.parse_jobspec("{not json}")
    assert "line 1" in str(err.value)


def test_vector_spec_needs_exactly_one_kind():
    bad = (
        '{"command":"classify-vector","spectrum":{"power_law":{"a_re":1,"p_re":1,"a_im":0,"p_im":0}},'
        '"beta":1,"vectors":[{"power_decay":{"c":1,"r":2},"polynomial_decay":{"d":2}}]}'
    )
    with pytest.raises(JobSpecError):
        cli.parse_jobspec(bad)


ROUNDTRIP_JOBS = [
    MINIMAL,
    '{"command":"classify-vector","spectrum":{"explicit":{"points":[[1,0],[0,2]]}},'
    '"vectors":[{"label":"v","explicit":{"values":[[1,0],[0.5,0]]}}],"beta":1.5,"flavor":"roumieu"}',
    '{"command":"evolve","spectrum":{"explicit":{"points":[[1,0]]}},'
    '"vectors":[{"label":"one","explicit":{"values":[[1,0]]}}],"t_grid":[0,1],"t_max":50}',
    '{"command":"estimate-order","spectrum":{"power_law":{"a_re":1,"p_re":1,"a_im":0,"p_im":0}},'
    '"vectors":[{"power_decay":{"c":1,"r":0.5}}],"n_max":30}',
    '{"command":"counterexample","beta":2,"case":"unbounded","tol":1e-08}',
    '{"command":"harness","spectrum":{"power_law":{"a_re":0,"p_re":0,"a_im":1,"p_im":2}},"beta":1}',
    '{"command":"region-boundary","beta":1,"b_plus":0.5,"samples":8,"im_max":4}',
]


@pytest.mark.parametrize("text", ROUNDTRIP_JOBS)
def test_jobspec_roundtrip(text):
    job = cli.parse_jobspec(text)
    assert cli.parse_jobspec(cli.serialize_jobspec(job)) == job


# -- run -----------------------------------------------------------------------


def test_run_classify_spectrum_diagonal():
    report = cli.run(cli.parse_jobspec(MINIMAL))
    assert report.status == "ok"
    (verdict,) = report.verdicts
    assert verdict["status"] == "holds"
    assert abs(verdict["b_plus"] - 1.0) < 1e-12


def test_run_counterexample_bounded():
    job = cli.parse_jobspec('{"command":"counterexample","beta":1,"case":"bounded"}')
    report = cli.run(job)
    assert report.status == "ok"
    (v,) = report.verdicts
    assert v["admissible"] is True and v["roumieu_member"] is False


def test_run_evolve_scalar_values():
    job = cli.parse_jobspec(
        '{"command":"evolve","spectrum":{"explicit":{"points":[[1,0]]}},'
        '"vectors":[{"label":"one","explicit":{"values":[[1,0]]}}],"t_grid":[0,1]}'
    )
    report = cli.run(job)
    coords = [v["coords"] for v in report.verdicts if v["kind"] == "evolve"]
    assert coords[0][0] == [1.0, 0.0]
    assert abs(coords[1][0][0] - math.e) < 1e-12


def test_run_region_beta_below_one_is_an_error():
    job = cli.parse_jobspec(MINIMAL.replace('"beta":1', '"beta":0.5'))
    report = cli.run(job)
    assert report.status == "error"
    assert "beta" in report.error


def test_run_report_is_deterministic_modulo_timings():
    job = cli.parse_jobspec(MINIMAL)
    a = cli.run(job, flags={"seed_free": True}).to_json(seed_free=True)
    b = cli.run(job, flags={"seed_free": True}).to_json(seed_free=True)
    assert a == b


def test_run_region_boundary_samples_the_curve():
    job = cli.parse_jobspec(
        '{"command":"region-boundary","beta":2,"b_plus":0.5,"samples":5,"im_max":16}'
    )
    report = cli.run(job)
    assert report.status == "ok"
    assert len(report.verdicts) == 5
    for v in report.verdicts:
        assert v["re"] == 0.5 * abs(v["im"]) ** 0.5


def test_run_harness_on_violated_spectrum_includes_counterexample():
    job = cli.parse_jobspec(
        '{"command":"harness","spectrum":{"power_law":{"a_re":0,"p_re":0,"a_im":1,"p_im":2}},"beta":1}'
    )
    report = cli.run(job)
    assert report.status == "ok"
    kinds = [v["kind"] for v in report.verdicts]
    assert "counterexample" in kinds
    ce = next(v for v in report.verdicts if v["kind"] == "counterexample")
    assert ce["admissible"] is True and ce["roumieu_member"] is False


def test_run_harness_accepts_a_user_catalog():
    job = cli.parse_jobspec(
        '{"command":"harness","spectrum":{"power_law":{"a_re":1,"p_re":1,"a_im":1,"p_im":1}},'
        '"beta":1,"vectors":[{"label":"mine","power_decay":{"c":2,"r":2}}]}'
    )
    report = cli.run(job)
    rows = [v for v in report.verdicts if v["kind"] == "harness-row"]
    assert [v["vector"] for v in rows] == ["mine"]
    assert rows[0]["admissible"] is True


def test_run_classify_vector_beta_zero_uses_support_rule():
    job = cli.parse_jobspec(
        '{"command":"classify-vector","spectrum":{"power_law":{"a_re":1,"p_re":1,"a_im":0,"p_im":0}},'
        '"vectors":[{"label":"fin","explicit":{"values":[[1,0],[1,0]]}},'
        '{"label":"inf","power_decay":{"c":1,"r":2}}],"beta":0}'
    )
    report = cli.run(job)
    members = {v["vector"]: v["member"] for v in report.verdicts}
    assert members == {"fin": True, "inf": False}


# -- CSV -----------------------------------------------------------------------


def test_emit_csv_header_only_for_empty_verdicts(tmp_path):
    report = cli.RunReport(job=cli.parse_jobspec(MINIMAL), flags={})
    path = tmp_path / "empty.csv"
    cli.emit_csv(report, str(path))
    lines = path.read_text().strip().splitlines()
    assert len(lines) == 1
    assert lines[0] == ",".join(cli._CSV_COLUMNS)


def test_emit_csv_norm_rows_and_summary(tmp_path):
    job = cli.parse_jobspec(
        '{"command":"estimate-order","spectrum":{"power_law":{"a_re":1,"p_re":1,"a_im":0,"p_im":0}},'
        '"vectors":[{"label":"root","power_decay":{"c":1,"r":0.5}}],"n_max":20}'
    )
    report = cli.run(job)
    path = tmp_path / "order.csv"
    cli.emit_csv(report, str(path))
    lines = path.read_text().strip().splitlines()
    kinds = [line.split(",")[2] for line in lines[1:]]
    assert kinds.count("norm") == 21
    assert kinds.count("order-summary") == 1


def test_emit_csv_harness_row_per_vector(tmp_path):
    job = cli.parse_jobspec(
        '{"command":"harness","spectrum":{"power_law":{"a_re":1,"p_re":1,"a_im":1,"p_im":1}},"beta":1}'
    )
    report = cli.run(job)
    path = tmp_path / "harness.csv"
    cli.emit_csv(report, str(path))
    rows = path.read_text().strip().splitlines()[1:]
    harness_rows = [r for r in rows if r.split(",")[2] == "harness-row"]
    assert len(harness_rows) == 5  # one per built-in vector


def test_csv_bytes_are_reproducible(tmp_path):
    job = cli.parse_jobspec(MINIMAL)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    cli.emit_csv(cli.run(job), str(p1))
    cli.emit_csv(cli.run(job), str(p2))
    assert p1.read_bytes() == p2.read_bytes()


# -- main / exit codes -----------------------------------------------------------


def write_job(tmp_path, text, name="job.json"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_main_ok_and_report_file(tmp_path):
    path = write_job(tmp_path, MINIMAL)
    out_json = tmp_path / "report.json"
    out_csv = tmp_path / "table.csv"
    rc = cli.main(
        ["classify-spectrum", "--job", path, "--report", str(out_json), "--out", str(out_csv), "--seed-free"]
    )
    assert rc == 0
    payload = json.loads(out_json.read_text())
    assert payload["status"] == "ok"
    assert payload["flags"]["seed_free"] is True
    assert out_csv.exists()


def test_main_command_mismatch_is_an_error(tmp_path):
    path = write_job(tmp_path, MINIMAL)
    rc = cli.main(["harness", "--job", path])
    assert rc == 1


def test_main_math_error_exits_one(tmp_path):
    path = write_job(tmp_path, MINIMAL.replace('"beta":1', '"beta":0.5'))
    rc = cli.main(["classify-spectrum", "--job", path, "--report", str(tmp_path / "r.json")])
    assert rc == 1


def test_main_unwritable_csv_exits_one(tmp_path):
    path = write_job(tmp_path, MINIMAL)
    rc = cli.main(
        ["classify-spectrum", "--job", path, "--report", str(tmp_path / "r.json"),
         "--out", str(tmp_path / "no" / "dir" / "x.csv")]
    )
    assert rc == 1


def test_main_unknown_verdict_exits_two(tmp_path, monkeypatch, capsys):
    path = write_job(tmp_path, MINIMAL)

    def fake_run(job, budget=None, flags=None):
        report = cli.RunReport(job=job, flags=flags or {})
        report.verdicts.append({"kind": "class", "member": None, "unknown": True})
        report.status = "unknown"
        return report

    monkeypatch.setattr(cli, "run", fake_run)
    rc = cli.main(["classify-spectrum", "--job", path])
    assert rc == 2


def test_main_env_kmax_flows_into_flags(tmp_path, monkeypatch, capsys):
    path = write_job(tmp_path, MINIMAL)
    monkeypatch.setenv("GSL_KMAX", "65536")
    rc = cli.main(["classify-spectrum", "--job", path, "--seed-free"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["flags"]["kmax"] == 65536


def test_main_flag_beats_env(tmp_path, monkeypatch, capsys):
    path = write_job(tmp_path, MINIMAL)
    monkeypatch.setenv("GSL_KMAX", "65536")
    rc = cli.main(["classify-spectrum", "--job", path, "--kmax", "131072", "--seed-free"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["flags"]["kmax"] == 131072


def test_cli_subprocess_end_to_end(tmp_path):
    path = write_job(tmp_path, MINIMAL)
    proc = subprocess.run(
        [sys.executable, "-m", "gevlab.cli_reporting", "classify-spectrum", "--job", path, "--seed-free"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert payload["verdicts"][0]["status"] == "holds"


def test_cli_byte_identical_reports(tmp_path):
    path = write_job(tmp_path, MINIMAL)
    outs = []
    for _ in range(2):
        proc = subprocess.run(
            [sys.executable, "-m", "gevlab.cli_reporting", "classify-spectrum", "--job", path, "--seed-free"],
            capture_output=True,
        )
        outs.append(proc.stdout)
    assert outs[0] == outs[1]
