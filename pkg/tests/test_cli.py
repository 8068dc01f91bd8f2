import json

import pytest

from defcohom.catalog import CatalogError, build, expression_from_object
from defcohom.cli import main, shipped_job_text, shipped_jobs
from defcohom.jobs import JobError, parse_job, report_json, run_job


def write(tmp_path, obj, name="job.json"):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def test_shipped_jobs_exit_codes(tmp_path, capsys):
    names = shipped_jobs()
    assert "non_jacobi.json" in names and len(names) >= 6
    for name in names:
        path = write(tmp_path, shipped_job_text(name), name)
        code = main(["run", path])
        assert code == (1 if name == "non_jacobi.json" else 0), name
    capsys.readouterr()


def test_reports_are_byte_identical(tmp_path, capsys):
    path = write(tmp_path, shipped_job_text("la_vector_space.json"))
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    main(["run", path, "--out", str(out1), "--format", "json"])
    main(["run", path, "--out", str(out2)])
    assert out1.read_bytes() == out2.read_bytes()
    report = json.loads(out1.read_text())
    assert report_json(report) == out1.read_text()
    capsys.readouterr()


def test_input_errors_exit_two_with_location(tmp_path, capsys):
    bad_rational = {"model": {"dimA": 1}, "bracket": {"val": [{"inputs": ["A1", "A1"], "output": {"A1": "1/0"}}]},
                    "tasks": [{"op": "mc-check"}]}
    assert main(["check", write(tmp_path, bad_rational)]) == 2
    err = capsys.readouterr().err
    assert "bracket.val[0]" in err
    cases = [
        ({"model": {"dimA": 1, "dimE": 0, "dimC": 0}, "bracket": {"val": [{"inputs": ["A1", "A2"], "output": {"A1": "1"}}]},
          "tasks": [{"op": "mc-check"}]}, "unknown basis index"),
        ({"construct": "sl3", "tasks": [{"op": "mc-check"}]}, "unknown construct"),
        ({"construct": "so3", "tasks": [{"op": "cohomology"}]}, "tasks[0].degrees"),
        ({"construct": "so3", "tasks": [{"op": "frobnicate"}]}, "tasks[0].op"),
        ({"construct": {"kind": "la_vector_space", "partial": [["1.5"]]}, "tasks": [{"op": "mc-check"}]}, "construct"),
    ]
    for job, needle in cases:
        assert main(["check", write(tmp_path, job)]) == 2
        assert needle in capsys.readouterr().err
    assert main(["run", write(tmp_path, "{ not json")]) == 2
    assert "line 1" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "missing.json")]) == 2
    assert main(["frobnicate"]) == 2
    capsys.readouterr()


def test_object_constructs_match_expressions():
    assert expression_from_object({"kind": "lie_algebra", "name": "so3"}) == "so3"
    e = expression_from_object({"kind": "la_vector_space", "partial": [["1", "0"], ["0", "0"]], "trunc": 1})
    assert build(e).partial.rows == 2
    assert expression_from_object({"kind": "type1", "lie": "aff1", "dimE": 1, "trunc": 2}) == "type1(aff1, m=1, d=2)"
    with pytest.raises(CatalogError):
        expression_from_object({"kind": "lie_algebra", "name": "g2"})
    job = parse_job(json.dumps({"construct": {"kind": "lie_algebra", "name": "so3"},
                                "tasks": [{"op": "cohomology", "degrees": [-1, 2]}]}))
    report = run_job(job)
    assert report["tasks"][0]["data"]["betti"]["0"] == 0


def test_symbol_entries_in_both_spellings():
    base = {"model": {"dimA": 1, "dimE": 1, "dimC": 0, "trunc": 1}, "tasks": [{"op": "mc-check"}]}
    a = dict(base, bracket={"sym": [{"inputs": ["A1"], "direction": 1, "coeff": {"u1": "2"}}]})
    b = dict(base, bracket={"sym": [{"inputs": ["A1"], "field": {"u1": {"u1": "2"}}}]})
    assert parse_job(json.dumps(a)).bracket == parse_job(json.dumps(b)).bracket
    with pytest.raises(JobError) as exc:
        parse_job(json.dumps(dict(base, bracket={"sym": [{"inputs": ["A1"], "direction": "u2", "coeff": "1"}]})))
    assert "direction" in exc.value.where


def test_task_failure_does_not_abort_later_tasks():
    job = parse_job(json.dumps({"construct": "so3", "tasks": [
        {"op": "formula-check", "degrees": [-1, 1]}, {"op": "mc-check"}]}))
    report = run_job(job)
    assert [t["status"] for t in report["tasks"]] == ["ERROR", "PASS"]


def test_examples_listing(capsys):
    assert main(["examples"]) == 0
    out = capsys.readouterr().out
    assert "type1(g, m=1, d=1)" in out and "heisenberg_gauge.json" in out
    assert main(["examples", "--show", "nope.json"]) == 2
