"""Independent reference implementations the tests trust.

These recompute, by direct enumeration and exact arithmetic, the
quantities the library derives incrementally.  They are deliberately
written in the most obvious way possible; keep them free of any code
shared with the package.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction

import qcomplete as qc


def weighted_gini(parts: list[list[int]]) -> Fraction:
    """Exact weighted Gini impurity of a label partition."""
    n = sum(len(p) for p in parts)
    total = Fraction(0)
    for part in parts:
        counts = Counter(part)
        gini = Fraction(1) - sum(Fraction(c, len(part)) ** 2 for c in counts.values())
        total += Fraction(len(part), n) * gini
    return total


def brute_best_split(rows: qc.LabeledRows, subset):
    """Enumerate every legal split and pick the minimum by the stated
    tie-break: impurity, then column position, then smaller value
    (numeric thresholds before categorical values, which only matters
    if a column could carry both kinds; here it cannot).

    Returns (gini, col_index, kind, value) or None.
    """
    labels = rows.labels
    if len({labels[i] for i in subset}) < 2:
        return None
    candidates = []
    for ci, col in enumerate(rows.columns):
        cells = [(rows.rows[i][ci], labels[i]) for i in subset]
        distinct = sorted({v for v, _ in cells if v is not None})
        if col.schema.type == "numeric":
            for t in distinct[1:]:
                lo = [lab for v, lab in cells if v is None or v < t]
                hi = [lab for v, lab in cells if v is not None and v >= t]
                if lo and hi:
                    candidates.append((weighted_gini([lo, hi]), ci, 0, t))
        else:
            for v in distinct:
                eq = [lab for val, lab in cells if val == v]
                ne = [lab for val, lab in cells if val is None or val != v]
                if eq and ne:
                    candidates.append((weighted_gini([eq, ne]), ci, 1, v))
    if not candidates:
        return None
    return min(candidates)


def replay_conjunction(conjunction: qc.Conjunction, columns, rows) -> set[int]:
    """Which row indices satisfy every atom, by plain reading of each
    atom over the raw cells (NULL comparisons false, or_null admits
    NULL, null tests as named)."""
    def find(ref: qc.ColumnRef) -> int:
        hits = [j for j, c in enumerate(columns)
                if c.schema.name.lower() == ref.column.lower()
                and (ref.qualifier is None or ref.qualifier.lower() == c.table.lower())]
        assert len(hits) == 1, f"ambiguous or missing {ref}"
        return hits[0]

    def holds(atom: qc.Atom, row) -> bool:
        v = row[find(atom.lhs)]
        if atom.op == "is-null":
            return v is None
        if atom.op == "is-not-null":
            return v is not None
        if v is None:
            return atom.or_null
        rhs = atom.rhs.payload()
        return {"<": v < rhs, ">": v > rhs, "<=": v <= rhs,
                ">=": v >= rhs, "=": v == rhs, "<>": v != rhs}[atom.op]

    return {i for i, row in enumerate(rows)
            if all(holds(a, row) for a in conjunction.atoms)}


def planted_blobs(seed: int):
    """Two well-separated point clouds; gap over 10x the blob diameter.

    Returns (matrix, planted) where planted[i] is 0 or 1.
    """
    import numpy as np

    rng = np.random.default_rng(seed)
    n0 = int(rng.integers(3, 21))
    n1 = int(rng.integers(3, 21))
    # each blob fits a unit box (diameter <= sqrt(2)); centers 20 apart
    blob0 = rng.uniform(-0.5, 0.5, size=(n0, 2))
    blob1 = rng.uniform(-0.5, 0.5, size=(n1, 2)) + np.array([20.0, 0.0])
    values = np.vstack([blob0, blob1])
    planted = [0] * n0 + [1] * n1
    matrix = qc.FeatureMatrix(values, [], np.arange(len(planted)))
    return matrix, planted


def same_partition(a, b) -> bool:
    """True when two label vectors induce the same two-block partition
    (checked exhaustively against both relabelings)."""
    assert len(a) == len(b)
    direct = all(x == y for x, y in zip(a, b))
    swapped = all(x == 1 - y for x, y in zip(a, b))
    return direct or swapped
