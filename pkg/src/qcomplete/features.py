"""Turn a result set into the numeric matrix clustering wants.

Numeric columns are z-scored with the population standard deviation;
NULLs are imputed to the column mean first, so they land on 0 after
scaling.  Constant columns carry no signal and are dropped.  Text
columns of modest cardinality become one 0/1 feature per distinct
value, with NULL as its own category (sorted last); wide text columns
are dropped by default.  Rows are never dropped, so ``row_map`` is the
identity and feature row i always describes working row i.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyWorkingDataError, NoUsableFeaturesError
from .evaluate import ResultColumn, ResultSet
from .store import NUMERIC


@dataclass(frozen=True)
class FeatureConfig:
    encode_categoricals: bool = True
    max_categorical_cardinality: int = 20
    drop_high_cardinality_text: bool = True

    def __post_init__(self):
        if self.max_categorical_cardinality < 2:
            raise ValueError("max_categorical_cardinality must be >= 2")


@dataclass(frozen=True)
class FeatureMeta:
    """Provenance of one matrix column."""

    column: ResultColumn
    encoding: str  # "zscore" | "onehot"
    mean: float | None = None
    stddev: float | None = None
    category: str | None = None  # one-hot value; None encodes the NULL category


@dataclass
class FeatureMatrix:
    values: np.ndarray  # (n_rows, n_features) float64
    feature_meta: list[FeatureMeta] = field(default_factory=list)
    row_map: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=int))


def prepare(rs: ResultSet, cfg: FeatureConfig = FeatureConfig()) -> FeatureMatrix:
    """Build the feature matrix for a non-empty result set.

    Raises :class:`EmptyWorkingDataError` when there are no rows and
    :class:`NoUsableFeaturesError` when every column got dropped.
    The output contains no NaN or infinity by construction.
    """
    n = len(rs.rows)
    if n == 0:
        raise EmptyWorkingDataError("result set has no rows to featurize")

    columns: list[np.ndarray] = []
    meta: list[FeatureMeta] = []
    for j, col in enumerate(rs.columns):
        cells = [row[j] for row in rs.rows]
        if col.schema.type == NUMERIC:
            present = np.array([v for v in cells if v is not None], dtype=float)
            if present.size == 0:
                continue  # all NULL: constant after imputation
            mean = float(present.mean())
            filled = np.array([mean if v is None else v for v in cells], dtype=float)
            stddev = float(np.sqrt(np.mean((filled - mean) ** 2)))
            if stddev == 0.0:
                continue
            columns.append((filled - mean) / stddev)
            meta.append(FeatureMeta(col, "zscore", mean=mean, stddev=stddev))
        else:
            if not cfg.encode_categoricals:
                continue
            distinct = sorted({v for v in cells if v is not None})
            categories: list[str | None] = list(distinct)
            if any(v is None for v in cells):
                categories.append(None)
            if len(categories) < 2:
                continue  # constant column, same rule as numerics
            if len(categories) > cfg.max_categorical_cardinality and cfg.drop_high_cardinality_text:
                continue
            for cat in categories:
                columns.append(np.array([1.0 if v == cat else 0.0 for v in cells]))
                meta.append(FeatureMeta(col, "onehot", category=cat))

    if not columns:
        raise NoUsableFeaturesError(
            "no clusterable columns remain after dropping constants and wide text")
    values = np.column_stack(columns)
    return FeatureMatrix(values, meta, np.arange(n))
