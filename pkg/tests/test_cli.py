"""Tests for the command-line front end: fixtures, exit codes, report
shapes, and the mutation sensitivity of the verification suites."""

import json
import math

import pytest

from ajchains import cli
from ajchains import config


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_cohomology_relative_p1(capsys):
    code, out, _ = run(capsys, "cohomology", "--input", "p1.json",
                       "--relative", "H")
    assert code == 0
    report = json.loads(out)
    by_degree = {r["degree"]: r for r in report["rows"]}
    assert by_degree[1]["rank"] == 2
    assert by_degree[1]["torsion"] == []
    assert by_degree[0]["rank"] == 0
    assert by_degree[2]["rank"] == 1
    assert report["relative_to"] == ["z1=0", "z1=inf"]


def test_cohomology_relative_single_face(capsys):
    code, out, _ = run(capsys, "cohomology", "--input", "p1.json",
                       "--relative", "z1=0")
    assert code == 0
    report = json.loads(out)
    by_degree = {r["degree"]: r for r in report["rows"]}
    assert by_degree[1]["rank"] == 1


def test_cohomology_alternating_cubical(capsys):
    code, out, _ = run(capsys, "cohomology", "--input", "box1.json",
                       "--alt")
    assert code == 0
    report = json.loads(out)
    assert report["square_zero"]
    ranks = {r["degree"]: r["rank"] for r in report["rows"]}
    assert ranks[1] == 1
    assert all(v == 0 for d, v in ranks.items() if d != 1)


def test_cohomology_degree_filter(capsys):
    code, out, _ = run(capsys, "cohomology", "--input", "box2.json",
                       "--alt", "--degree", "2")
    assert code == 0
    report = json.loads(out)
    assert [r["degree"] for r in report["rows"]] == [2]
    assert report["rows"][0]["rank"] == 1


def test_cohomology_quasi_iso_default(capsys):
    code, out, _ = run(capsys, "cohomology", "--input", "p1.json")
    assert code == 0
    report = json.loads(out)
    assert report["quasi_isomorphism"]
    assert report["chain_map"]
    ranks = {r["degree"]: r["ac_rank"] for r in report["rows"]}
    assert ranks[1] == 1


def test_cohomology_missing_file(capsys):
    code, _, err = run(capsys, "cohomology", "--input", "no-such.json")
    assert code == 2
    assert "not found" in err


def test_cohomology_bad_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "cohomology", "--input", str(bad))
    assert code == 2


def test_cohomology_unknown_kind(tmp_path, capsys):
    weird = tmp_path / "weird.json"
    weird.write_text(json.dumps({"kind": "mystery"}))
    code, _, err = run(capsys, "cohomology", "--input", str(weird))
    assert code == 2
    assert "unknown input kind" in err


def test_cohomology_alt_on_simplicial_model(capsys):
    code, _, err = run(capsys, "cohomology", "--input", "p1.json", "--alt")
    assert code == 2


def test_cauchy_stokes_square_log(capsys):
    code, out, _ = run(capsys, "cauchy-stokes", "--case",
                       "builtin:square-log")
    assert code == 0
    report = json.loads(out)
    assert report["pass"]
    assert report["lhs"][1] == pytest.approx(2 * math.pi, abs=1e-9)
    assert report["rhs"][1] == pytest.approx(2 * math.pi, rel=1e-9)


def test_cauchy_stokes_diverging_wedge(capsys):
    code, out, _ = run(capsys, "cauchy-stokes", "--case",
                       "builtin:diverging-wedge")
    assert code == 0
    report = json.loads(out)
    assert report["diverged"] is True
    assert report["expected"] is True


def test_cauchy_stokes_bad_case(capsys):
    code, _, err = run(capsys, "cauchy-stokes", "--case", "builtin:nope")
    assert code == 2
    assert "unknown builtin case" in err


def test_cauchy_stokes_user_case(tmp_path, capsys):
    case = {
        "gamma": {
            "n": 1,
            "cells": [{
                "name": "user-square",
                "params": ["u", "v"],
                "bounds": [[-1, 1], [-1, 1]],
                "coords": ["u + I*v"],
            }],
        },
        "phi": {"n": 1, "log_axes": [1]},
        "dh_gamma": {
            "n": 1,
            "on_faces": [1],
            "cells": [{
                "name": "origin",
                "params": [],
                "bounds": [],
                "coords": ["0"],
                "on_faces": [1],
            }],
        },
    }
    path = tmp_path / "case.json"
    path.write_text(json.dumps(case))
    code, out, _ = run(capsys, "cauchy-stokes", "--case", str(path))
    assert code == 0
    report = json.loads(out)
    assert report["pass"]
    assert report["lhs"][1] == pytest.approx(2 * math.pi, abs=1e-9)


def test_polylog_pass(capsys):
    code, out, _ = run(capsys, "polylog", "--p", "2", "--a", "0.3")
    assert code == 0
    report = json.loads(out)
    assert report["pass"]
    assert report["rel_err"] < 1e-6


def test_polylog_forbidden_parameter(capsys):
    code, _, err = run(capsys, "polylog", "--p", "2", "--a", "1.0")
    assert code == 2


def test_polylog_bad_divisor_set(capsys):
    code, _, err = run(capsys, "polylog", "--p", "2", "--a", "0.3",
                       "--J", "0,1")
    assert code == 2


def test_polylog_budget_failure(capsys):
    code, _, err = run(capsys, "polylog", "--p", "2", "--a", "0.3",
                       "--tol", "1e-12", "--budget", "40")
    assert code == 1


def test_polylog_csv(capsys):
    code, out, _ = run(capsys, "polylog", "--p", "2", "--a", "0.3",
                       "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "field,i,re,im"
    assert lines[-1].startswith("pass,")
    assert lines[-1].endswith("1,")


def test_suite_names_stable():
    names = [name for name, _ in cli.verification_suites()]
    assert names == [
        "cubical-point-cohomology",
        "quasi-isomorphism-p1",
        "quasi-isomorphism-p1xp1",
        "thom-independence",
        "face-commutation",
        "cauchy-stokes",
        "divergence-probe",
        "structural-invariants",
        "polylog-aj",
        "boundary-relations",
    ]


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("AJCHAINS_THREADS", "3")
    assert cli._thread_count(10) == 3
    monkeypatch.setenv("AJCHAINS_THREADS", "0")
    assert cli._thread_count(10) == 1
    monkeypatch.delenv("AJCHAINS_THREADS")
    assert cli._thread_count(10) >= 1


def test_polylog_suite_detects_sign_mutation(monkeypatch):
    # Flipping the bookkeeping sign of one term must break the polylog
    # suite: the evaluator lands on the negated oracle value.
    orig = config.term_sign_exponent
    monkeypatch.setattr(config, "term_sign_exponent",
                        lambda c, i, p: orig(c, i, p) + 1)
    ok, _ = cli._suite_polylog()
    assert not ok
    monkeypatch.undo()
    ok, _ = cli._suite_polylog()
    assert ok


def test_usage_error_exit_code(capsys):
    assert cli.main(["polylog"]) == 2          # missing required flags
    capsys.readouterr()
    assert cli.main(["no-such-command"]) == 2
    capsys.readouterr()
