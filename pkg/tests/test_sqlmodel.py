"""Parser, renderer, and rewrite tests for the SQL subset."""

import random

import pytest

import qcomplete as qc
from qcomplete.errors import (
    AmbiguousColumnError,
    EmptyConjunctionError,
    ParseError,
    TypeMismatchError,
    UnknownColumnError,
    UnknownTableError,
    UnsupportedConstructError,
)
from qcomplete.sqlmodel import format_number

EXAMPLE_QUERY = "Select Gender, Salary From Employees"


def test_parse_example_query():
    ast = qc.parse(EXAMPLE_QUERY)
    assert [c.column for c in ast.select] == ["Gender", "Salary"]
    assert ast.from_tables == ("Employees",)
    assert ast.where.atoms == ()


def test_parse_star():
    ast = qc.parse("SELECT * FROM t")
    assert ast.select is None
    assert ast.from_tables == ("t",)


def test_parse_where_atoms():
    ast = qc.parse("SELECT a FROM t WHERE a < 5 AND b = 'x'")
    first, second = ast.where.atoms
    assert (first.lhs.column, first.op, first.rhs.number) == ("a", "<", 5.0)
    assert (second.lhs.column, second.op, second.rhs.text) == ("b", "=", "x")


def test_parse_not_equal_spellings():
    a = qc.parse("SELECT * FROM t WHERE a != 1")
    b = qc.parse("SELECT * FROM t WHERE a <> 1")
    assert a == b
    assert a.where.atoms[0].op == "<>"


def test_parse_null_tests():
    ast = qc.parse("SELECT * FROM t WHERE a IS NULL AND b IS NOT NULL")
    ops = [atom.op for atom in ast.where.atoms]
    assert ops == ["is-null", "is-not-null"]
    assert all(atom.rhs is None for atom in ast.where.atoms)


def test_parse_qualified_columns():
    ast = qc.parse("SELECT t.a FROM t, s WHERE s.b = 1")
    assert ast.select[0].qualifier == "t"
    assert ast.where.atoms[0].lhs.qualifier == "s"


def test_parse_string_escape():
    ast = qc.parse("SELECT * FROM t WHERE name = 'O''Hara'")
    assert ast.where.atoms[0].rhs.text == "O'Hara"


def test_parse_numbers():
    ast = qc.parse("SELECT * FROM t WHERE a < -2.5 AND b >= 1e3")
    assert ast.where.atoms[0].rhs.number == -2.5
    assert ast.where.atoms[1].rhs.number == 1000.0


@pytest.mark.parametrize("text", [
    "SELECT AVG(x) FROM t",
    "SELECT COUNT(*) FROM t",
    "SELECT * FROM t GROUP BY a",
    "SELECT * FROM t ORDER BY a",
    "SELECT * FROM t WHERE a = 1 OR b = 2",
    "SELECT * FROM (SELECT a FROM t)",
    "SELECT DISTINCT a FROM t",
    "SELECT * FROM t JOIN s",
    "SELECT * FROM t LIMIT 5",
])
def test_rejected_constructs(text):
    with pytest.raises(UnsupportedConstructError):
        qc.parse(text)


@pytest.mark.parametrize("text", [
    "",
    "SELECT",
    "SELECT FROM t",
    "SELECT * FROM",
    "SELECT * FROM t WHERE",
    "SELECT * FROM t WHERE a <",
    "SELECT * FROM t WHERE a = 'unterminated",
    "SELECT a b FROM t",
    "SELECT * FROM t, t",
])
def test_parse_errors(text):
    with pytest.raises(ParseError) as exc:
        qc.parse(text)
    assert exc.value.position >= 0


def test_parse_error_position_points_at_offender():
    with pytest.raises(ParseError) as exc:
        qc.parse("SELECT * FROM t WHERE a = = 1")
    assert exc.value.position == "SELECT * FROM t WHERE a = = 1".index("= 1")


def test_render_example_query():
    assert qc.render(qc.parse(EXAMPLE_QUERY)) == "SELECT Gender, Salary FROM Employees"


def test_render_no_where_keyword_when_empty():
    assert "WHERE" not in qc.render(qc.parse("select * from T"))


def test_render_canonical_spacing_and_keywords():
    ast = qc.parse("select  a ,b   from t  where a<=3 and b='v'")
    assert qc.render(ast) == "SELECT a, b FROM t WHERE a <= 3 AND b = 'v'"


def test_format_number_drops_trailing_zero():
    assert format_number(6200.0) == "6200"
    assert format_number(-3.5) == "-3.5"
    assert format_number(0.0) == "0"


def test_strip_projection():
    ast = qc.parse(EXAMPLE_QUERY)
    stripped = qc.strip_projection(ast)
    assert stripped.select is None
    assert stripped.from_tables == ast.from_tables
    assert stripped.where == ast.where
    assert ast.select is not None, "input must not be mutated"


def test_strip_projection_idempotent():
    ast = qc.parse("SELECT * FROM t WHERE a = 1")
    assert qc.strip_projection(ast) == ast


def test_inject_completion_1():
    ast = qc.parse(EXAMPLE_QUERY)
    c = qc.Conjunction((qc.Atom(qc.ColumnRef(None, "Commission"), ">=", qc.SqlValue.of(6200)),))
    out = qc.inject(ast, c)
    assert qc.render(out) == "SELECT Gender, Salary FROM Employees WHERE Commission >= 6200"


def test_inject_completion_2():
    ast = qc.parse(EXAMPLE_QUERY)
    c = qc.Conjunction((
        qc.Atom(qc.ColumnRef(None, "Commission"), "<", qc.SqlValue.of(6200)),
        qc.Atom(qc.ColumnRef(None, "Gender"), "=", qc.SqlValue.of("F")),
    ))
    out = qc.inject(ast, c)
    assert qc.render(out) == (
        "SELECT Gender, Salary FROM Employees WHERE Commission < 6200 AND Gender = 'F'"
    )


def test_inject_appends_after_existing_atoms():
    ast = qc.parse("SELECT * FROM t WHERE a = 1")
    c = qc.Conjunction((qc.Atom(qc.ColumnRef(None, "b"), "<", qc.SqlValue.of(2)),))
    out = qc.inject(ast, c)
    assert out.where.atoms == ast.where.atoms + c.atoms
    assert qc.render(out) == "SELECT * FROM t WHERE a = 1 AND b < 2"


def test_inject_rejects_empty_conjunction():
    with pytest.raises(EmptyConjunctionError):
        qc.inject(qc.parse("SELECT * FROM t"), qc.Conjunction(()))


def test_null_guard_atom_round_trip():
    text = "SELECT * FROM t WHERE (a < 5 OR a IS NULL)"
    ast = qc.parse(text)
    atom = ast.where.atoms[0]
    assert atom.or_null and atom.op == "<"
    assert qc.render(ast) == text
    assert qc.parse(qc.render(ast)) == ast


def test_null_guard_atom_disjunct_order_insensitive():
    a = qc.parse("SELECT * FROM t WHERE (a IS NULL OR a < 5)")
    b = qc.parse("SELECT * FROM t WHERE (a < 5 OR a IS NULL)")
    assert a == b


def test_null_guard_atom_requires_same_column():
    with pytest.raises(ParseError):
        qc.parse("SELECT * FROM t WHERE (a < 5 OR b IS NULL)")


def test_bare_disjunction_still_rejected():
    with pytest.raises(UnsupportedConstructError):
        qc.parse("SELECT * FROM t WHERE (a < 5 OR a > 9)")


def _random_ast(rng: random.Random) -> qc.QueryAst:
    tables = rng.sample(["t", "s", "u"], rng.randint(1, 2))
    if rng.random() < 0.4:
        select = None
    else:
        select = tuple(
            qc.ColumnRef(rng.choice(tables) if rng.random() < 0.3 else None, name)
            for name in rng.sample(["a", "b", "c", "d"], rng.randint(1, 3))
        )
    atoms = []
    for _ in range(rng.randint(0, 3)):
        lhs = qc.ColumnRef(rng.choice(tables) if rng.random() < 0.3 else None,
                           rng.choice(["a", "b", "c"]))
        roll = rng.random()
        if roll < 0.2:
            atoms.append(qc.Atom(lhs, rng.choice(["is-null", "is-not-null"]), None))
        elif roll < 0.6:
            value = qc.SqlValue.of(round(rng.uniform(-100, 100), rng.choice([0, 1, 3])))
            op = rng.choice(["<", ">", "<=", ">=", "=", "<>"])
            atoms.append(qc.Atom(lhs, op, value, or_null=rng.random() < 0.2))
        else:
            text = rng.choice(["x", "it's", "Ab c", ""])
            op = rng.choice(["=", "<>"])
            atoms.append(qc.Atom(lhs, op, qc.SqlValue.of(text), or_null=rng.random() < 0.2))
    return qc.QueryAst(select, tuple(tables), qc.Conjunction(tuple(atoms)))


def test_round_trip_random_asts():
    rng = random.Random(20240817)
    for _ in range(300):
        ast = _random_ast(rng)
        text = qc.render(ast)
        assert qc.parse(text) == ast, text


def test_round_trip_accepted_texts():
    texts = [
        EXAMPLE_QUERY,
        "SELECT * FROM t WHERE a IS NULL",
        "select T.a, b from T, S where S.c <> 'v' and a >= -2.5",
        "SELECT * FROM t WHERE (x >= 0 OR x IS NULL) AND y = ''",
    ]
    for text in texts:
        ast = qc.parse(text)
        assert qc.parse(qc.render(ast)) == ast


def test_validate_example_query(employees_db):
    report = qc.validate_completable(qc.parse(EXAMPLE_QUERY), employees_db)
    assert report.ok and report.problems == ()


def test_validate_unknown_column(employees_db):
    report = qc.validate_completable(qc.parse("SELECT x FROM Employees"), employees_db)
    assert not report.ok
    assert report.problems[0].code == "unknown-column"


def test_validate_unknown_table(employees_db):
    report = qc.validate_completable(qc.parse("SELECT * FROM Nowhere"), employees_db)
    assert report.problems[0].code == "unknown-table"


def test_validate_ambiguous_column():
    store = qc.RelationStore()
    schema = (qc.ColumnSchema("shared", "numeric", False),)
    store.register("t", qc.Relation(schema, ((1.0,),)))
    store.register("s", qc.Relation(schema, ((2.0,),)))
    report = qc.validate_completable(qc.parse("SELECT shared FROM t, s"), store.snapshot())
    assert report.problems[0].code == "ambiguous-column"
    qualified = qc.validate_completable(qc.parse("SELECT t.shared FROM t, s"), store.snapshot())
    assert qualified.ok


def test_validate_type_mismatch(employees_db):
    report = qc.validate_completable(
        qc.parse("SELECT * FROM Employees WHERE Gender < 4"), employees_db)
    assert report.problems[0].code == "type-mismatch"


def test_validate_collects_problems_in_query_order(employees_db):
    report = qc.validate_completable(
        qc.parse("SELECT x, y FROM Employees WHERE Gender < 1"), employees_db)
    codes = [p.code for p in report.problems]
    assert codes == ["unknown-column", "unknown-column", "type-mismatch"]


def test_validation_errors_raised_by_evaluate(employees_db):
    cases = {
        "SELECT x FROM Employees": UnknownColumnError,
        "SELECT * FROM Nowhere": UnknownTableError,
        "SELECT * FROM Employees WHERE Gender < 4": TypeMismatchError,
    }
    for text, err in cases.items():
        with pytest.raises(err):
            qc.evaluate(qc.parse(text), employees_db)


def test_ambiguity_error_raised_by_evaluate():
    store = qc.RelationStore()
    schema = (qc.ColumnSchema("shared", "numeric", False),)
    store.register("t", qc.Relation(schema, ((1.0,),)))
    store.register("s", qc.Relation(schema, ((2.0,),)))
    with pytest.raises(AmbiguousColumnError):
        qc.evaluate(qc.parse("SELECT shared FROM t, s"), store.snapshot())
