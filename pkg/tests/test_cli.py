"""Tests for the command-line interface."""

from __future__ import annotations

import json

from gpalab import cli
from gpalab.bigraph import CONN_4442_CODE, TWOD2_CODE


def run_json(capsys, argv):
    code = cli.run(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_parse_graph_trivial(capsys):
    code, doc = run_json(capsys, ["parse-graph", "bwd1duals1"])
    assert code == 0
    assert doc["report"]["pass"] is True


def test_parse_graph_4442(capsys):
    code, doc = run_json(capsys, ["parse-graph", CONN_4442_CODE])
    assert code == 0
    assert "15 vertices" in doc["report"]["corrections"][0]["value"]


def test_parse_graph_bad_code():
    assert cli.run(["parse-graph", "not-a-code"]) == 2


def test_unknown_subcommand():
    assert cli.run(["frobnicate"]) == 2


def test_low_precision_rejected():
    assert cli.run(["--precision", "10", "pf"]) == 2


def test_off_circle_lambda_rejected():
    assert cli.run(["--lambda", "2,0", "pf"]) == 2


def test_pf_default_graph(capsys):
    code, doc = run_json(capsys, ["pf"])
    assert code == 0
    note = doc["report"]["corrections"][0]
    assert note["name"] == "norm-squared"
    assert note["value"].startswith("0.52360679")


def test_jw_small(capsys):
    code, doc = run_json(capsys, ["jw", TWOD2_CODE, "--n", "2"])
    assert code == 0
    names = [c["name"] for c in doc["report"]["checks"]]
    assert names == ["idempotent", "self-adjoint", "uncappable", "trace"]


def test_2d2_generator(capsys):
    code, doc = run_json(capsys, ["2d2", "generator"])
    assert code == 0
    assert doc["report"]["pass"] is True


def test_output_file(tmp_path):
    out = tmp_path / "report.json"
    assert cli.run(["--out", str(out), "parse-graph", "bwd1duals1"]) == 0
    doc = json.loads(out.read_text())
    assert doc["command"] == "parse-graph"


def test_reports_are_byte_identical(capsys):
    cli.run(["pf"])
    first = capsys.readouterr().out
    cli.run(["pf"])
    second = capsys.readouterr().out
    assert first == second


def test_4442_cli(capsys):
    code, doc = run_json(capsys, ["--starts", "220", "4442", "solve-connection"])
    assert code == 0
    assert len(doc["solutions"]) == 2
