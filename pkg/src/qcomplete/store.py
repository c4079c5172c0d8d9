"""In-memory relations, immutable snapshots, CSV ingestion.

Cells are plain Python values: ``None`` (NULL), ``float`` for numeric
columns, ``str`` for text columns.  The schema carries the typing; rows
never mix types within a column.  Snapshots are frozen views with a
monotonically increasing version, so concurrent readers always see a
consistent database while uploads replace whole relations atomically.
"""

from __future__ import annotations

import csv
import io
import math
import threading
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    DuplicateHeaderError,
    RaggedRowError,
    SchemaMismatchError,
    ValueParseError,
)

NUMERIC = "numeric"
TEXT = "text"


@dataclass(frozen=True)
class ColumnSchema:
    name: str
    type: str  # "numeric" | "text"
    nullable: bool

    def __post_init__(self):
        if self.type not in (NUMERIC, TEXT):
            raise ValueError(f"bad column type {self.type!r}")


@dataclass(frozen=True)
class Relation:
    """An ordered bag of rows with a fixed schema."""

    schema: tuple[ColumnSchema, ...]
    rows: tuple[tuple, ...]

    def __post_init__(self):
        for r, row in enumerate(self.rows):
            if len(row) != len(self.schema):
                raise RaggedRowError(f"row {r} has {len(row)} cells, schema has {len(self.schema)}")

    @property
    def row_count(self) -> int:
        return len(self.rows)

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.schema]


@dataclass(frozen=True)
class DatabaseSnapshot:
    """Immutable set of named relations.  Lookup is case-insensitive."""

    relations: Mapping[str, Relation]
    version: int

    def get(self, name: str) -> Relation | None:
        found = self.lookup(name)
        return found[1] if found else None

    def lookup(self, name: str) -> tuple[str, Relation] | None:
        """Return (canonical name, relation), or None."""
        low = name.lower()
        for key, rel in self.relations.items():
            if key.lower() == low:
                return key, rel
        return None


class RelationStore:
    """Mutable owner of relations; hands out immutable snapshots.

    Registrations serialize on a lock and bump the version; snapshots
    taken earlier keep pointing at their own relation mapping.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._relations: dict[str, Relation] = {}
        self._version = 0

    def register(self, name: str, relation: Relation) -> DatabaseSnapshot:
        """Add or replace a relation (name match is case-insensitive)."""
        with self._lock:
            relations = {k: v for k, v in self._relations.items()
                         if k.lower() != name.lower()}
            relations[name] = relation
            self._relations = relations
            self._version += 1
            return self._snapshot_locked()

    def load_csv(self, path, name: str,
                 schema: Sequence[ColumnSchema] | None = None) -> Relation:
        """Read a CSV file and register it under ``name``."""
        with open(path, "r", newline="", encoding="utf-8") as fh:
            relation = relation_from_csv(fh.read(), schema=schema)
        self.register(name, relation)
        return relation

    def snapshot(self) -> DatabaseSnapshot:
        with self._lock:
            return self._snapshot_locked()

    def _snapshot_locked(self) -> DatabaseSnapshot:
        return DatabaseSnapshot(MappingProxyType(self._relations), self._version)


# --- CSV ---------------------------------------------------------------------


def _parse_decimal(text: str) -> float | None:
    try:
        value = float(text)
    except ValueError:
        return None
    if not math.isfinite(value):
        return None
    return value


def infer_schema(header: Sequence[str], grid: Sequence[Sequence[str]]) -> tuple[ColumnSchema, ...]:
    """Infer per-column types from string cells.

    A column is numeric iff every non-empty cell parses as a decimal
    number; empty cells mean NULL and mark the column nullable.  An
    all-empty column comes out as nullable text.
    """
    seen = set()
    for h in header:
        if h.lower() in seen:
            raise DuplicateHeaderError(f"duplicate column name {h!r}")
        seen.add(h.lower())
    schema = []
    for j, name in enumerate(header):
        non_empty = [row[j] for row in grid if row[j] != ""]
        nullable = len(non_empty) < len(grid)
        numeric = bool(non_empty) and all(_parse_decimal(c) is not None for c in non_empty)
        schema.append(ColumnSchema(name, NUMERIC if numeric else TEXT, nullable))
    return tuple(schema)


def relation_from_csv(text: str,
                      schema: Sequence[ColumnSchema] | None = None) -> Relation:
    """Build a Relation from CSV text (first row is the header).

    With no explicit schema, types are inferred via :func:`infer_schema`.
    With a schema, the header must match its column names in order and
    every cell must parse under the declared type.
    """
    reader = csv.reader(io.StringIO(text))
    table = list(reader)
    if not table:
        raise SchemaMismatchError("CSV has no header row")
    header, raw = table[0], table[1:]
    width = len(header)
    for r, row in enumerate(raw):
        if len(row) != width:
            raise RaggedRowError(f"row {r + 1} has {len(row)} cells, header has {width}")
    if schema is None:
        schema = infer_schema(header, raw)
    else:
        schema = tuple(schema)
        names = [c.name.lower() for c in schema]
        if [h.lower() for h in header] != names:
            raise SchemaMismatchError(f"header {header} does not match schema columns {names}")

    rows = []
    for r, raw_row in enumerate(raw):
        row = []
        for j, cell in enumerate(raw_row):
            col = schema[j]
            if cell == "":
                if not col.nullable:
                    raise ValueParseError(
                        f"row {r + 1}, column {col.name!r}: empty cell in non-nullable column")
                row.append(None)
            elif col.type == NUMERIC:
                value = _parse_decimal(cell)
                if value is None:
                    raise ValueParseError(
                        f"row {r + 1}, column {col.name!r}: {cell!r} is not a number")
                row.append(value)
            else:
                row.append(cell)
        rows.append(tuple(row))
    return Relation(tuple(schema), tuple(rows))


def relation_to_csv(relation: Relation) -> str:
    """Inverse of :func:`relation_from_csv` (NULL becomes an empty cell)."""
    from .sqlmodel import format_number

    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(relation.column_names)
    for row in relation.rows:
        writer.writerow(["" if v is None else
                         format_number(v) if isinstance(v, float) else v
                         for v in row])
    return out.getvalue()


def snapshot_of(**relations: Relation) -> DatabaseSnapshot:
    """Convenience: a one-off snapshot from keyword-named relations."""
    return DatabaseSnapshot(MappingProxyType(dict(relations)), version=1)


# --- demo dataset --------------------------------------------------------------


def demo_packages(seed: int = 0, city_count: int = 30,
                  package_count: int = 11000) -> DatabaseSnapshot:
    """Generate the shipping demo database: Cities and Packages.

    Cities(city_ID, distance): ``city_count`` rows, distances drawn
    log-uniformly between 12 and 1600 km.

    Packages(package_ID, destination, length, width, height, weight,
    price): ``package_count`` rows.  Every destination is a valid
    city_ID.  Rows are drawn from four archetypes (letters, parcels,
    bulky, heavy freight) with dimensions in cm, weight in grams and a
    price that grows with weight, volume and destination distance, plus
    a small overpriced-outlier group to make exploration interesting.
    All columns are numeric; the same seed always yields the same rows.
    """
    rng = np.random.default_rng(np.uint64(seed & 0xFFFFFFFFFFFFFFFF))

    city_ids = np.arange(1, city_count + 1, dtype=float)
    distance = np.round(np.exp(rng.uniform(np.log(12.0), np.log(1600.0), city_count)), 1)
    cities = Relation(
        (ColumnSchema("city_ID", NUMERIC, False), ColumnSchema("distance", NUMERIC, False)),
        tuple((float(cid), float(d)) for cid, d in zip(city_ids, distance)),
    )

    # nearer cities receive more traffic
    dest_weights = 1.0 / np.sqrt(distance)
    dest_weights /= dest_weights.sum()
    destination = rng.choice(city_ids, size=package_count, p=dest_weights)
    dest_distance = distance[destination.astype(int) - 1]

    # archetype:        letters  parcels  bulky   freight
    mix = rng.choice(4, size=package_count, p=[0.35, 0.40, 0.15, 0.10])
    dim_mean = np.array([[23, 16, 1.0], [35, 25, 18], [95, 60, 55], [60, 45, 40]])
    dim_sd = np.array([[4, 3, 0.3], [8, 7, 6], [28, 18, 16], [14, 10, 9]])
    weight_mean = np.array([40.0, 1500.0, 4200.0, 9500.0])
    weight_sd = np.array([15.0, 700.0, 1800.0, 2600.0])

    dims = rng.normal(dim_mean[mix], dim_sd[mix])
    dims = np.maximum(np.round(dims, 1), np.array([9.0, 6.0, 0.2]))
    weight = np.maximum(np.round(rng.normal(weight_mean[mix], weight_sd[mix])), 5.0)

    volume_l = dims[:, 0] * dims[:, 1] * dims[:, 2] / 1000.0
    price = (1.2
             + 0.0009 * weight
             + 0.055 * volume_l
             + 0.004 * dest_distance
             + rng.normal(0.0, 0.8, package_count))
    # a sliver of long, light, overpriced packages
    odd = (mix == 2) & (dims[:, 0] > 140.0)
    price[odd] *= 2.5
    price = np.round(np.maximum(price, 0.5), 2)

    package_schema = tuple(
        ColumnSchema(n, NUMERIC, False)
        for n in ("package_ID", "destination", "length", "width", "height", "weight", "price")
    )
    package_rows = tuple(
        (float(i + 1), float(destination[i]), float(dims[i, 0]), float(dims[i, 1]),
         float(dims[i, 2]), float(weight[i]), float(price[i]))
        for i in range(package_count)
    )
    packages = Relation(package_schema, package_rows)
    return snapshot_of(Cities=cities, Packages=packages)
