"""Relation store, CSV ingestion, and demo generator tests."""

import pytest

import qcomplete as qc
from qcomplete.errors import (
    DuplicateHeaderError,
    RaggedRowError,
    SchemaMismatchError,
    ValueParseError,
)
from qcomplete.store import relation_to_csv


def test_infer_schema_employees(employees):
    types = {c.name: c.type for c in employees.schema}
    assert types == {
        "EmpNo": "text",
        "LastName": "text",
        "Gender": "text",
        "Salary": "numeric",
        "Commission": "numeric",
    }
    assert employees.row_count == 10


def test_infer_schema_all_empty_column():
    schema = qc.infer_schema(["a"], [[""], [""]])
    assert schema[0].type == "text"
    assert schema[0].nullable


def test_infer_schema_one_bad_cell_forces_text():
    schema = qc.infer_schema(["a"], [["1"], ["2"], ["x"]])
    assert schema[0].type == "text"


def test_infer_schema_numeric_with_gaps():
    schema = qc.infer_schema(["a"], [["1"], [""], ["2.5"]])
    assert schema[0].type == "numeric"
    assert schema[0].nullable


def test_infer_schema_duplicate_header():
    with pytest.raises(DuplicateHeaderError):
        qc.infer_schema(["a", "A"], [])


def test_ragged_csv():
    with pytest.raises(RaggedRowError):
        qc.relation_from_csv("a,b\n1,2\n3\n")


def test_header_only_csv():
    rel = qc.relation_from_csv("a,b\n")
    assert rel.row_count == 0
    assert len(rel.schema) == 2


def test_explicit_schema_mismatch():
    schema = (qc.ColumnSchema("a", "numeric", False),)
    with pytest.raises(SchemaMismatchError):
        qc.relation_from_csv("a,b\n1,2\n", schema=schema)


def test_value_parse_error_reports_row_and_column():
    schema = (qc.ColumnSchema("a", "numeric", False),)
    with pytest.raises(ValueParseError) as exc:
        qc.relation_from_csv("a\n1\nx\n", schema=schema)
    assert "row 2" in str(exc.value)


def test_empty_cell_in_non_nullable_column():
    schema = (qc.ColumnSchema("a", "numeric", False), qc.ColumnSchema("b", "numeric", False))
    with pytest.raises(ValueParseError):
        qc.relation_from_csv("a,b\n1,2\n,3\n", schema=schema)


def test_blank_line_is_ragged():
    with pytest.raises(RaggedRowError):
        qc.relation_from_csv("a\n1\n\n2\n")


def test_quoted_cells_and_embedded_commas():
    rel = qc.relation_from_csv('name,note\n"Smith, J","said ""hi"""\n')
    assert rel.rows[0] == ("Smith, J", 'said "hi"')


def test_row_width_enforced():
    schema = (qc.ColumnSchema("a", "numeric", False),)
    with pytest.raises(Exception):
        qc.Relation(schema, ((1.0, 2.0),))


def test_register_replaces_case_insensitively(employees):
    store = qc.RelationStore()
    store.register("Employees", employees)
    v1 = store.snapshot().version
    small = qc.relation_from_csv("EmpNo\ne1\n")
    store.register("EMPLOYEES", small)
    snap = store.snapshot()
    assert snap.version > v1
    assert snap.get("employees").row_count == 1
    assert len(snap.relations) == 1


def test_snapshot_immutability(employees):
    store = qc.RelationStore()
    store.register("Employees", employees)
    before = store.snapshot()
    store.register("Employees", qc.relation_from_csv("EmpNo\ne1\n"))
    assert before.get("Employees").row_count == 10
    assert store.snapshot().get("Employees").row_count == 1


def test_snapshot_lookup_case_insensitive(employees_db):
    assert employees_db.get("EMPLOYEES") is employees_db.get("employees")


def test_load_csv(tmp_path, employees_csv):
    path = tmp_path / "employees.csv"
    path.write_text(employees_csv, encoding="utf-8")
    store = qc.RelationStore()
    rel = store.load_csv(path, "Employees")
    assert rel.row_count == 10
    assert store.snapshot().get("Employees") is rel


def test_csv_round_trip(employees):
    text = relation_to_csv(employees)
    again = qc.relation_from_csv(text, schema=employees.schema)
    assert again.rows == employees.rows


def test_csv_round_trip_with_nulls():
    rel = qc.relation_from_csv("a,b\n1,\n,x\n")
    again = qc.relation_from_csv(relation_to_csv(rel), schema=rel.schema)
    assert again.rows == ((1.0, None), (None, "x"))


def test_demo_packages_cardinalities():
    db = qc.demo_packages(seed=0)
    assert db.get("Cities").row_count == 30
    assert db.get("Packages").row_count == 11000


def test_demo_packages_foreign_keys():
    db = qc.demo_packages(seed=3, city_count=10, package_count=500)
    cities = db.get("Cities")
    packages = db.get("Packages")
    ids = {row[cities.column_names.index("city_ID")] for row in cities.rows}
    dest = packages.column_names.index("destination")
    assert all(row[dest] in ids for row in packages.rows)


def test_demo_packages_deterministic():
    a = qc.demo_packages(seed=7, city_count=5, package_count=200)
    b = qc.demo_packages(seed=7, city_count=5, package_count=200)
    for name in ("Cities", "Packages"):
        assert relation_to_csv(a.get(name)) == relation_to_csv(b.get(name))


def test_demo_packages_all_numeric():
    db = qc.demo_packages(seed=0, city_count=5, package_count=100)
    for name in ("Cities", "Packages"):
        assert all(c.type == "numeric" for c in db.get(name).schema)
