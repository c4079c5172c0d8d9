"""Conjunctive SQL subset: AST values, parser, canonical renderer.

The supported language is deliberately small:

    query      = SELECT select_list FROM table_list [WHERE conjunction]
    select_list= "*" | column_ref ("," column_ref)*
    table_list = name ("," name)*
    conjunction= atom (AND atom)*
    atom       = column_ref cmp (literal | column_ref)
               | column_ref IS [NOT] NULL
               | "(" column_ref cmp literal OR column_ref IS NULL ")"
    cmp        = "<" | ">" | "<=" | ">=" | "=" | "<>" | "!="
    literal    = number | "'" text "'"
    column_ref = [name "."] name

No OR (outside the parenthesized null-guard above), no aggregates, no
GROUP BY / ORDER BY, no subqueries, no JOIN keyword; joins are written as
comma-separated FROM tables.  Keywords are case-insensitive, identifier
case is preserved.  ``!=`` parses but always renders as ``<>``.

The parenthesized form exists because a completion may need to say
"Commission < 6200, and rows where Commission is unknown belong here too".
A bare conjunction cannot express that, so a comparison atom carries an
``or_null`` flag rendered as ``(col < x OR col IS NULL)``.  General
disjunctions remain unsupported.

All AST types are frozen; every operation returns new values.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Iterable, Union

from .errors import (
    AmbiguousColumnError,
    EmptyConjunctionError,
    ParseError,
    TypeMismatchError,
    UnknownColumnError,
    UnknownTableError,
    UnsupportedConstructError,
)

if TYPE_CHECKING:
    from .store import ColumnSchema, DatabaseSnapshot

COMPARISON_OPS = ("<", ">", "<=", ">=", "=", "<>")
NULL_TEST_OPS = ("is-null", "is-not-null")

# Words that cannot be identifiers.  The second group only appears in
# SQL we refuse, but reserving them gives better error messages.
_KEYWORDS = {"select", "from", "where", "and", "or", "is", "not", "null"}
_REJECTED = {
    "group": "GROUP BY",
    "order": "ORDER BY",
    "by": "GROUP BY / ORDER BY",
    "join": "JOIN syntax (write comma-separated tables)",
    "having": "HAVING",
    "limit": "LIMIT",
    "union": "UNION",
    "distinct": "SELECT DISTINCT",
}


# --- values and AST nodes --------------------------------------------------


@dataclass(frozen=True)
class SqlValue:
    """A literal: NULL, a finite number, or a text string.

    Exactly one payload field is populated, matching ``kind``.
    """

    kind: str
    number: float | None = None
    text: str | None = None

    def __post_init__(self):
        if self.kind == "null":
            ok = self.number is None and self.text is None
        elif self.kind == "number":
            ok = self.number is not None and self.text is None and math.isfinite(self.number)
        elif self.kind == "text":
            ok = self.text is not None and self.number is None
        else:
            ok = False
        if not ok:
            raise ValueError(f"malformed SqlValue: {self.kind!r}/{self.number!r}/{self.text!r}")

    @staticmethod
    def of(value: float | int | str | None) -> "SqlValue":
        """Wrap a plain Python value (None, number, or str)."""
        if value is None:
            return NULL
        if isinstance(value, bool):
            raise TypeError("bool is not a SQL value")
        if isinstance(value, (int, float)):
            return SqlValue("number", number=float(value))
        if isinstance(value, str):
            return SqlValue("text", text=value)
        raise TypeError(f"cannot wrap {type(value).__name__}")

    def payload(self) -> float | str | None:
        if self.kind == "number":
            return self.number
        if self.kind == "text":
            return self.text
        return None


NULL = SqlValue("null")


@dataclass(frozen=True)
class ColumnRef:
    """A possibly table-qualified column name.  Case is preserved."""

    qualifier: str | None
    column: str

    def key(self) -> tuple[str | None, str]:
        q = self.qualifier.lower() if self.qualifier is not None else None
        return (q, self.column.lower())

    def __str__(self) -> str:
        return f"{self.qualifier}.{self.column}" if self.qualifier else self.column


@dataclass(frozen=True)
class Atom:
    """One condition: a comparison or a null test.

    ``rhs`` is absent exactly for null tests.  ``or_null`` widens a
    comparison to also accept NULL in the tested column; it renders as the
    parenthesized null-guard form.
    """

    lhs: ColumnRef
    op: str
    rhs: Union[ColumnRef, SqlValue, None] = None
    or_null: bool = False

    def __post_init__(self):
        if self.op in NULL_TEST_OPS:
            if self.rhs is not None or self.or_null:
                raise ValueError(f"null test {self.op} takes no rhs and no or_null")
        elif self.op in COMPARISON_OPS:
            if self.rhs is None:
                raise ValueError(f"comparison {self.op} needs a rhs")
        else:
            raise ValueError(f"unknown op {self.op!r}")


@dataclass(frozen=True)
class Conjunction:
    """An ordered list of atoms, all implicitly ANDed.  May be empty."""

    atoms: tuple[Atom, ...] = ()

    @staticmethod
    def of(*atoms: Atom) -> "Conjunction":
        return Conjunction(tuple(atoms))

    def __len__(self) -> int:
        return len(self.atoms)


@dataclass(frozen=True)
class QueryAst:
    """A parsed query.  ``select is None`` means ``SELECT *``."""

    select: tuple[ColumnRef, ...] | None
    from_tables: tuple[str, ...]
    where: Conjunction = field(default_factory=Conjunction)

    def __post_init__(self):
        if not self.from_tables:
            raise ValueError("FROM list must not be empty")
        seen = set()
        for t in self.from_tables:
            if t.lower() in seen:
                raise ValueError(f"duplicate table {t!r} in FROM")
            seen.add(t.lower())


# --- tokenizer ---------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<number>-?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<string>'(?:[^']|'')*')
      | (?P<symbol><=|>=|<>|!=|[<>=,.*()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # number | ident | string | symbol | eof
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos] == "'":
                raise ParseError("unterminated string literal", pos)
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def take(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "ident" and tok.text.lower() == word

    def expect_keyword(self, word: str) -> _Token:
        if not self.at_keyword(word):
            tok = self.peek()
            raise ParseError(f"got {tok.text!r}" if tok.text else "query ended early",
                             tok.pos, expected=word.upper())
        return self.take()

    def at_symbol(self, sym: str) -> bool:
        tok = self.peek()
        return tok.kind == "symbol" and tok.text == sym

    def expect_symbol(self, sym: str) -> _Token:
        if not self.at_symbol(sym):
            tok = self.peek()
            raise ParseError(f"got {tok.text!r}" if tok.text else "query ended early",
                             tok.pos, expected=repr(sym))
        return self.take()

    def name(self, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != "ident":
            raise ParseError(f"got {tok.text!r}" if tok.text else "query ended early",
                             tok.pos, expected=what)
        low = tok.text.lower()
        if low in _REJECTED:
            raise UnsupportedConstructError(_REJECTED[low], tok.pos)
        if low in _KEYWORDS:
            raise ParseError(f"got keyword {tok.text!r}", tok.pos, expected=what)
        return self.take()

    # grammar rules ----------------------------------------------------

    def query(self) -> QueryAst:
        self.expect_keyword("select")
        select = self.select_list()
        self.expect_keyword("from")
        tables = self.table_list()
        where = Conjunction()
        if self.at_keyword("where"):
            self.take()
            where = self.conjunction()
        tail = self.peek()
        if tail.kind != "eof":
            if tail.kind == "ident" and tail.text.lower() in _REJECTED:
                raise UnsupportedConstructError(_REJECTED[tail.text.lower()], tail.pos)
            raise ParseError(f"got {tail.text!r}", tail.pos, expected="end of query")
        return QueryAst(select, tables, where)

    def select_list(self) -> tuple[ColumnRef, ...] | None:
        if self.at_symbol("*"):
            self.take()
            return None
        cols = [self.select_item()]
        while self.at_symbol(","):
            self.take()
            cols.append(self.select_item())
        return tuple(cols)

    def select_item(self) -> ColumnRef:
        col = self.column_ref()
        if self.at_symbol("("):
            raise UnsupportedConstructError("aggregate function calls", self.peek().pos)
        return col

    def table_list(self) -> tuple[str, ...]:
        tables = [self.table_name()]
        while self.at_symbol(","):
            self.take()
            t = self.table_name()
            if any(t.lower() == s.lower() for s in tables):
                raise ParseError(f"duplicate table {t!r} in FROM", self.tokens[self.i - 1].pos)
            tables.append(t)
        return tuple(tables)

    def table_name(self) -> str:
        if self.at_symbol("("):
            raise UnsupportedConstructError("subqueries", self.peek().pos)
        return self.name("table name").text

    def conjunction(self) -> Conjunction:
        atoms = [self.atom()]
        while self.at_keyword("and"):
            self.take()
            atoms.append(self.atom())
        if self.at_keyword("or"):
            raise UnsupportedConstructError("OR between conditions", self.peek().pos)
        return Conjunction(tuple(atoms))

    def atom(self) -> Atom:
        if self.at_symbol("("):
            return self.null_guard_atom()
        lhs = self.column_ref()
        if self.peek().kind == "symbol" and self.peek().text == "(":
            raise UnsupportedConstructError("aggregate function calls", self.peek().pos)
        return self.atom_tail(lhs)

    def atom_tail(self, lhs: ColumnRef) -> Atom:
        if self.at_keyword("is"):
            self.take()
            negate = False
            if self.at_keyword("not"):
                self.take()
                negate = True
            self.expect_keyword("null")
            return Atom(lhs, "is-not-null" if negate else "is-null")
        tok = self.peek()
        if tok.kind == "symbol" and tok.text in ("<", ">", "<=", ">=", "=", "<>", "!="):
            self.take()
            op = "<>" if tok.text == "!=" else tok.text
            return Atom(lhs, op, self.comparison_rhs())
        raise ParseError(f"got {tok.text!r}" if tok.text else "query ended early",
                         tok.pos, expected="comparison operator or IS")

    def comparison_rhs(self) -> Union[ColumnRef, SqlValue]:
        tok = self.peek()
        if tok.kind == "number":
            self.take()
            return SqlValue("number", number=float(tok.text))
        if tok.kind == "string":
            self.take()
            return SqlValue("text", text=tok.text[1:-1].replace("''", "'"))
        if tok.kind == "ident":
            if tok.text.lower() == "null":
                raise ParseError("NULL cannot be compared; use IS NULL", tok.pos)
            return self.column_ref()
        raise ParseError(f"got {tok.text!r}" if tok.text else "query ended early",
                         tok.pos, expected="literal or column")

    def null_guard_atom(self) -> Atom:
        """Parse '(col cmp value OR col IS NULL)', either disjunct first."""
        open_tok = self.take()
        if self.at_keyword("select"):
            raise UnsupportedConstructError("subqueries", open_tok.pos)
        first = self._inner_atom()
        if self.at_keyword("and"):
            raise UnsupportedConstructError(
                "parenthesized conjunctions (parentheses are only for the "
                "'(col cmp value OR col IS NULL)' form)", self.peek().pos)
        self.expect_keyword("or")
        second = self._inner_atom()
        self.expect_symbol(")")
        if first.op in NULL_TEST_OPS:
            null_test, cmp_atom = first, second
        else:
            cmp_atom, null_test = first, second
        bad = (
            null_test.op != "is-null"
            or cmp_atom.op not in COMPARISON_OPS
            or cmp_atom.lhs.key() != null_test.lhs.key()
        )
        if bad:
            raise UnsupportedConstructError(
                "general parenthesized disjunctions (only "
                "'(col cmp value OR col IS NULL)' over one column)", open_tok.pos)
        return replace(cmp_atom, or_null=True)

    def _inner_atom(self) -> Atom:
        if self.at_symbol("("):
            raise UnsupportedConstructError("nested parentheses", self.peek().pos)
        return self.atom_tail(self.column_ref())

    def column_ref(self) -> ColumnRef:
        first = self.name("column name")
        if self.at_symbol("."):
            self.take()
            second = self.name("column name")
            return ColumnRef(first.text, second.text)
        return ColumnRef(None, first.text)


def parse(text: str) -> QueryAst:
    """Parse query text into a :class:`QueryAst`.

    Raises :class:`ParseError` on malformed input and
    :class:`UnsupportedConstructError` for recognizable SQL outside the
    subset (aggregates, GROUP BY, ORDER BY, subqueries, OR, general
    parenthesized disjunctions).
    """
    return _Parser(_tokenize(text)).query()


# --- rendering ---------------------------------------------------------------


def format_number(x: float) -> str:
    """Canonical number text: no trailing zeros, integers without a dot."""
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(float(x))  # float() strips subclasses whose repr differs


def _format_text(s: str) -> str:
    return "'" + s.replace("'", "''") + "'"


def render_value(v: SqlValue) -> str:
    if v.kind == "number":
        return format_number(v.number)
    if v.kind == "text":
        return _format_text(v.text)
    return "NULL"


def render_atom(a: Atom) -> str:
    col = str(a.lhs)
    if a.op == "is-null":
        return f"{col} IS NULL"
    if a.op == "is-not-null":
        return f"{col} IS NOT NULL"
    rhs = str(a.rhs) if isinstance(a.rhs, ColumnRef) else render_value(a.rhs)
    base = f"{col} {a.op} {rhs}"
    if a.or_null:
        return f"({base} OR {col} IS NULL)"
    return base


def render(ast: QueryAst) -> str:
    """Render to canonical text: uppercase keywords, single spaces,
    ``<>`` for not-equal, numbers without trailing zeros.

    ``parse(render(ast)) == ast`` for every valid AST.
    """
    sel = "*" if ast.select is None else ", ".join(str(c) for c in ast.select)
    text = f"SELECT {sel} FROM {', '.join(ast.from_tables)}"
    if ast.where.atoms:
        text += " WHERE " + " AND ".join(render_atom(a) for a in ast.where.atoms)
    return text


# --- structural operations ---------------------------------------------------


def strip_projection(ast: QueryAst) -> QueryAst:
    """Replace the select list with star; FROM and WHERE are untouched."""
    return replace(ast, select=None)


def inject(ast: QueryAst, conjunction: Conjunction) -> QueryAst:
    """Append extra conjuncts to the WHERE clause.

    The original atoms stay first, in order, so the result's WHERE is
    exactly ``ast.where.atoms ++ conjunction.atoms``.
    """
    if not conjunction.atoms:
        raise EmptyConjunctionError("refusing to inject an empty conjunction")
    merged = Conjunction(ast.where.atoms + conjunction.atoms)
    return replace(ast, where=merged)


# --- validation --------------------------------------------------------------


@dataclass(frozen=True)
class ValidationProblem:
    code: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    problems: tuple[ValidationProblem, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.problems


_PROBLEM_ERRORS = {
    "unknown-table": UnknownTableError,
    "unknown-column": UnknownColumnError,
    "ambiguous-column": AmbiguousColumnError,
    "type-mismatch": TypeMismatchError,
}


def resolve_column(ref: ColumnRef, from_tables: Iterable[str],
                   db: "DatabaseSnapshot") -> tuple[str, int, "ColumnSchema"]:
    """Resolve a column reference against the FROM tables, case-insensitively.

    Returns (canonical table name, column index within that table, schema).
    """
    candidates = []
    for t in from_tables:
        rel = db.get(t)
        if rel is None:
            continue
        if ref.qualifier is not None and ref.qualifier.lower() != t.lower():
            continue
        for idx, col in enumerate(rel.schema):
            if col.name.lower() == ref.column.lower():
                candidates.append((t, idx, col))
    if ref.qualifier is not None:
        if not any(ref.qualifier.lower() == t.lower() for t in from_tables):
            raise UnknownTableError(f"table {ref.qualifier!r} is not in FROM")
    if not candidates:
        raise UnknownColumnError(f"unknown column {ref}")
    if len(candidates) > 1:
        tables = ", ".join(t for t, _, _ in candidates)
        raise AmbiguousColumnError(f"column {ref} is ambiguous across {tables}")
    return candidates[0]


def _operand_type(operand, from_tables, db) -> str:
    if isinstance(operand, ColumnRef):
        return resolve_column(operand, from_tables, db)[2].type
    return "numeric" if operand.kind == "number" else "text"


def validate_completable(ast: QueryAst, db: "DatabaseSnapshot") -> ValidationReport:
    """Check that the query can be evaluated and extended against ``db``.

    Confirms every FROM table exists, every column reference resolves
    unambiguously, and comparison operands have matching types (numeric
    with numeric, text with text).  Problems are collected in query
    order rather than raised; see :func:`ensure_completable`.
    """
    problems: list[ValidationProblem] = []
    known_tables = []
    for t in ast.from_tables:
        if db.get(t) is None:
            problems.append(ValidationProblem("unknown-table", f"unknown table {t!r}"))
        else:
            known_tables.append(t)

    def check_ref(ref: ColumnRef):
        try:
            resolve_column(ref, known_tables, db)
        except (UnknownTableError, UnknownColumnError, AmbiguousColumnError) as exc:
            code = {"UNKNOWN_TABLE": "unknown-table", "UNKNOWN_COLUMN": "unknown-column",
                    "AMBIGUOUS_COLUMN": "ambiguous-column"}[exc.code]
            problems.append(ValidationProblem(code, str(exc)))
            return False
        return True

    if ast.select is not None:
        for ref in ast.select:
            check_ref(ref)
    for atom in ast.where.atoms:
        lhs_ok = check_ref(atom.lhs)
        if atom.op in NULL_TEST_OPS:
            continue
        rhs_ok = check_ref(atom.rhs) if isinstance(atom.rhs, ColumnRef) else True
        if lhs_ok and rhs_ok:
            lt = _operand_type(atom.lhs, known_tables, db)
            rt = _operand_type(atom.rhs, known_tables, db)
            if lt != rt:
                problems.append(ValidationProblem(
                    "type-mismatch",
                    f"cannot compare {lt} {atom.lhs} with {rt} operand"))
    return ValidationReport(tuple(problems))


def ensure_completable(ast: QueryAst, db: "DatabaseSnapshot") -> None:
    """Raise the typed error for the first validation problem, if any."""
    report = validate_completable(ast, db)
    if not report.ok:
        first = report.problems[0]
        raise _PROBLEM_ERRORS[first.code](first.message)
