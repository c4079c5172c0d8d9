"""Command-line workbench, run in-process via cli.main()."""

import csv
import io
import json
from pathlib import Path

import pytest

from qcomplete.cli import main

DATA = Path(__file__).parent / "data" / "employees.csv"

EXAMPLE_QUERY = "SELECT Gender, Salary FROM Employees"

GOLDEN_RENDERED = [
    "SELECT Gender, Salary FROM Employees WHERE Commission >= 6200",
    "SELECT Gender, Salary FROM Employees WHERE Commission < 6200 AND Gender = 'F'",
    "SELECT Gender, Salary FROM Employees WHERE Commission < 6200 AND Gender <> 'F'",
]


@pytest.fixture()
def workspace(tmp_path, capsys):
    ws = tmp_path / "ws"
    rc = main(["--workspace", str(ws), "load", str(DATA), "--name", "Employees"])
    assert rc == 0
    capsys.readouterr()
    return ws


def run(workspace, *argv):
    return main(["--workspace", str(workspace), *argv])


# --- load -------------------------------------------------------------------


def test_load_reports_and_persists(tmp_path, capsys):
    ws = tmp_path / "ws"
    rc = main(["--workspace", str(ws), "load", str(DATA)])
    out = capsys.readouterr().out
    assert rc == 0
    assert "loaded 10 rows into employees (5 columns)" in out
    assert (ws / "employees.csv").is_file()
    sidecar = json.loads((ws / "employees.schema.json").read_text())
    assert {"name": "Commission", "type": "numeric", "nullable": False} \
        in sidecar["columns"]


def test_load_missing_file(tmp_path, capsys):
    rc = main(["--workspace", str(tmp_path / "ws"), "load", "nowhere.csv"])
    err = capsys.readouterr().err
    assert rc == 2
    assert "error:" in err and "nowhere.csv" in err


def test_workspace_env_var(tmp_path, capsys, monkeypatch):
    ws = tmp_path / "from_env"
    monkeypatch.setenv("QC_WORKSPACE", str(ws))
    rc = main(["load", str(DATA), "--name", "Employees"])
    assert rc == 0
    assert (ws / "Employees.csv").is_file()
    capsys.readouterr()
    rc = main(["query", "SELECT EmpNo FROM Employees"])
    assert rc == 0
    assert "e10" in capsys.readouterr().out


def test_workspace_collides_with_file(tmp_path, capsys):
    clobbered = tmp_path / "not_a_dir"
    clobbered.write_text("occupied")
    rc = main(["--workspace", str(clobbered), "load", str(DATA)])
    err = capsys.readouterr().err
    assert rc == 3
    assert "internal error:" in err


# --- query ------------------------------------------------------------------


def test_query_table_format(workspace, capsys):
    rc = run(workspace, "query", "SELECT EmpNo, Commission FROM Employees")
    captured = capsys.readouterr()
    assert rc == 0
    lines = captured.out.splitlines()
    assert lines[0].split() == ["EmpNo", "Commission"]
    assert set(lines[1]) == {"-", " "}
    assert lines[2].split() == ["e10", "1300"]
    assert len(lines) == 12
    assert captured.err.strip() == "10 rows"


def test_query_csv_format(workspace, capsys):
    rc = run(workspace, "query", "SELECT * FROM Employees", "--format", "csv")
    assert rc == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == ["EmpNo", "LastName", "Gender", "Salary", "Commission"]
    assert len(rows) == 11
    assert rows[1][3] == "41160"


def test_query_json_format(workspace, capsys):
    rc = run(workspace, "query", "SELECT Salary FROM Employees", "--format", "json")
    assert rc == 0
    body = json.loads(capsys.readouterr().out)
    assert body["columns"][0]["name"] == "Salary"
    assert body["rows"][0] == [41160.0]
    assert body["truncated"] is False


def test_query_max_rows(workspace, capsys):
    rc = run(workspace, "query", "SELECT * FROM Employees", "--max-rows", "4")
    captured = capsys.readouterr()
    assert rc == 0
    assert "4 rows (truncated)" in captured.err


def test_query_parse_error(workspace, capsys):
    rc = run(workspace, "query", "SELECT * FORM Employees")
    err = capsys.readouterr().err
    assert rc == 2
    assert err.startswith("error:")
    assert "position" in err


def test_query_unknown_table(workspace, capsys):
    rc = run(workspace, "query", "SELECT * FROM Ghosts")
    assert rc == 2
    assert "Ghosts" in capsys.readouterr().err


# --- complete ---------------------------------------------------------------


def test_complete_text_golden(workspace, capsys):
    rc = run(workspace, "complete", EXAMPLE_QUERY,
             "--k", "3", "--seed", "80", "--verify")
    captured = capsys.readouterr()
    assert rc == 0
    lines = captured.out.splitlines()
    assert lines[0].startswith("# k_requested=3 k_delivered=3 working_rows=10")
    assert lines[1] == f"[1] (4 rows) {GOLDEN_RENDERED[0]}"
    assert lines[2] == f"[2] (4 rows) {GOLDEN_RENDERED[1]}"
    assert lines[3] == f"[3] (2 rows) {GOLDEN_RENDERED[2]}"
    assert lines[4] == "partition: OK"
    assert captured.err == ""


def test_complete_json_matches_text(workspace, capsys):
    rc = run(workspace, "complete", EXAMPLE_QUERY,
             "--k", "3", "--seed", "80", "--format", "json", "--verify")
    assert rc == 0
    body = json.loads(capsys.readouterr().out)
    assert [c["rendered"] for c in body["completions"]] == GOLDEN_RENDERED
    assert body["k_delivered"] == 3
    assert body["verification"]["ok"] is True
    assert body["verification"]["witnesses"] == []


def test_complete_k_too_small(workspace, capsys):
    rc = run(workspace, "complete", EXAMPLE_QUERY, "--k", "1")
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_complete_insufficient_diversity_warns(tmp_path, capsys):
    ws = tmp_path / "ws"
    stub = tmp_path / "t.csv"
    stub.write_text("a\n5\n5\n7\n7\n")
    assert main(["--workspace", str(ws), "load", str(stub)]) == 0
    capsys.readouterr()
    rc = main(["--workspace", str(ws), "complete", "SELECT * FROM t",
               "--k", "3", "--verify"])
    captured = capsys.readouterr()
    assert rc == 0
    assert "partition: OK" in captured.out
    assert "only 2 of 3 completions possible" in captured.err


def test_complete_debug_tree(workspace, capsys):
    rc = run(workspace, "complete", EXAMPLE_QUERY,
             "--k", "3", "--seed", "80", "--debug-tree")
    captured = capsys.readouterr()
    assert rc == 0
    assert "Commission >= 6200" in captured.err


# --- demo data --------------------------------------------------------------


def test_demo_packages(tmp_path, capsys):
    ws = tmp_path / "ws"
    rc = main(["--workspace", str(ws), "demo-packages"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "wrote Cities: 30 rows" in out
    assert "wrote Packages: 11000 rows" in out
    capsys.readouterr()
    rc = main(["--workspace", str(ws), "query",
               "SELECT * FROM Packages", "--max-rows", "5", "--format", "csv"])
    assert rc == 0
    assert len(capsys.readouterr().out.splitlines()) == 6
