"""Reference evaluation of the conjunctive subset over a snapshot.

Semantics are deliberately plain SQL:

* FROM is a cross product of the listed tables, enumerated as one
  deterministic nested loop (first table outermost, relation row order
  within each table).  Duplicates are kept; a result row's position is
  its ordinal.
* WHERE keeps a combined row iff every atom holds.  Any comparison
  involving NULL is false; only IS NULL / IS NOT NULL (and the
  ``or_null`` guard on an atom) ever accept a NULL.
* Projection happens last and never changes row count or order.

``max_rows`` caps the output; ``truncated`` is set only when at least
one further matching row existed beyond the cap.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from itertools import product
from typing import Callable

from .errors import TypeMismatchError
from .sqlmodel import (
    Atom,
    ColumnRef,
    QueryAst,
    SqlValue,
    ensure_completable,
    resolve_column,
)
from .store import ColumnSchema, DatabaseSnapshot

DEFAULT_MAX_ROWS = 100_000

_CMP = {
    "<": operator.lt,
    ">": operator.gt,
    "<=": operator.le,
    ">=": operator.ge,
    "=": operator.eq,
    "<>": operator.ne,
}


@dataclass(frozen=True)
class ResultColumn:
    """A result column remembers which FROM table it came from."""

    table: str
    schema: ColumnSchema

    @property
    def name(self) -> str:
        return self.schema.name


@dataclass
class ResultSet:
    columns: tuple[ResultColumn, ...]
    rows: list[tuple]
    truncated: bool = False

    @property
    def row_count(self) -> int:
        return len(self.rows)


def _column_offsets(ast: QueryAst, db: DatabaseSnapshot) -> dict[str, int]:
    offsets = {}
    at = 0
    for t in ast.from_tables:
        offsets[t.lower()] = at
        at += len(db.get(t).schema)
    return offsets


def _position(ref: ColumnRef, ast: QueryAst, db: DatabaseSnapshot,
              offsets: dict[str, int]) -> int:
    table, idx, _ = resolve_column(ref, ast.from_tables, db)
    return offsets[table.lower()] + idx


def compile_predicate(atoms: tuple[Atom, ...], ast: QueryAst,
                      db: DatabaseSnapshot) -> Callable[[tuple], bool]:
    """Turn WHERE atoms into one combined-row predicate.

    The caller passes full cross-product rows (pre-projection).  NULL
    comparison semantics live here and nowhere else.
    """
    offsets = _column_offsets(ast, db)
    tests = []
    for atom in atoms:
        i = _position(atom.lhs, ast, db, offsets)
        if atom.op == "is-null":
            tests.append(lambda row, i=i: row[i] is None)
        elif atom.op == "is-not-null":
            tests.append(lambda row, i=i: row[i] is not None)
        elif isinstance(atom.rhs, ColumnRef):
            j = _position(atom.rhs, ast, db, offsets)
            cmp = _CMP[atom.op]
            if atom.or_null:
                tests.append(lambda row, i=i, j=j, cmp=cmp: row[i] is None or (
                    row[j] is not None and cmp(row[i], row[j])))
            else:
                tests.append(lambda row, i=i, j=j, cmp=cmp:
                             row[i] is not None and row[j] is not None and cmp(row[i], row[j]))
        else:
            value = atom.rhs.payload()
            cmp = _CMP[atom.op]
            if atom.or_null:
                tests.append(lambda row, i=i, cmp=cmp, value=value:
                             row[i] is None or cmp(row[i], value))
            else:
                tests.append(lambda row, i=i, cmp=cmp, value=value:
                             row[i] is not None and cmp(row[i], value))

    def predicate(row: tuple) -> bool:
        return all(t(row) for t in tests)

    return predicate


def evaluate(ast: QueryAst, db: DatabaseSnapshot,
             max_rows: int | None = DEFAULT_MAX_ROWS) -> ResultSet:
    """Evaluate a validated query; see the module docstring for semantics.

    Raises the validation errors of :func:`ensure_completable` if the
    query does not fit ``db``.  ``max_rows=None`` disables the cap.
    """
    ensure_completable(ast, db)
    relations = [db.get(t) for t in ast.from_tables]

    all_columns = tuple(
        ResultColumn(t, col)
        for t, rel in zip(ast.from_tables, relations)
        for col in rel.schema
    )
    if ast.select is None:
        columns = all_columns
        take: list[int] | None = None
    else:
        offsets = _column_offsets(ast, db)
        take = [_position(ref, ast, db, offsets) for ref in ast.select]
        columns = tuple(all_columns[i] for i in take)

    predicate = compile_predicate(ast.where.atoms, ast, db)
    rows: list[tuple] = []
    truncated = False
    for combo in product(*(rel.rows for rel in relations)):
        row = combo[0] if len(combo) == 1 else tuple(v for part in combo for v in part)
        if not predicate(row):
            continue
        if max_rows is not None and len(rows) >= max_rows:
            truncated = True
            break
        rows.append(row if take is None else tuple(row[i] for i in take))
    return ResultSet(columns, rows, truncated)


def count(ast: QueryAst, db: DatabaseSnapshot) -> int:
    """Uncapped row count of ``ast`` over ``db``."""
    return len(evaluate(ast, db, max_rows=None).rows)


def atom_accepts(atom: Atom, value) -> bool:
    """Apply a single-column atom to one plain value (NULL-aware).

    Exposed for replaying extracted rules over working rows; the
    semantics match :func:`compile_predicate` exactly.
    """
    if atom.op == "is-null":
        return value is None
    if atom.op == "is-not-null":
        return value is not None
    if not isinstance(atom.rhs, SqlValue):
        raise TypeMismatchError("atom_accepts needs a literal rhs")
    if value is None:
        return atom.or_null
    return _CMP[atom.op](value, atom.rhs.payload())
