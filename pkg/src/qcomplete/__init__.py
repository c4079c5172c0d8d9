"""qcomplete: complete a conjunctive SQL query into k disjoint sub-queries.

The pieces compose left to right: parse SQL (:mod:`.sqlmodel`), evaluate
it over in-memory relations (:mod:`.store`, :mod:`.evaluate`), cluster
the answer rows (:mod:`.features`, :mod:`.kmeans`), explain the clusters
with a k-leaf decision tree (:mod:`.tree`), and inject each leaf's
conditions back into the query (:mod:`.engine`).  :mod:`.service` and
:mod:`.cli` wrap the same engine for HTTP and terminal use.
"""

from .engine import Completion, CompletionSet, EngineConfig, VerificationReport, complete, verify
from .errors import InputError, QcError
from .evaluate import ResultSet, count, evaluate
from .features import FeatureConfig, FeatureMatrix, prepare
from .kmeans import ClusterModel, assign_labels, kmeans
from .sqlmodel import (
    Atom,
    ColumnRef,
    Conjunction,
    QueryAst,
    SqlValue,
    inject,
    parse,
    render,
    strip_projection,
    validate_completable,
)
from .store import (
    ColumnSchema,
    DatabaseSnapshot,
    Relation,
    RelationStore,
    demo_packages,
    infer_schema,
    relation_from_csv,
)
from .tree import DecisionTree, LabeledRows, Rule, Split, best_split, extract_rules, grow_levelwise, prune_to_k

__version__ = "0.1.0"

__all__ = [
    "Atom", "ClusterModel", "ColumnRef", "ColumnSchema", "Completion",
    "CompletionSet", "Conjunction", "DatabaseSnapshot", "DecisionTree",
    "EngineConfig", "FeatureConfig", "FeatureMatrix", "InputError",
    "LabeledRows", "QcError", "QueryAst", "Relation", "RelationStore",
    "ResultSet", "Rule", "Split", "SqlValue", "VerificationReport",
    "assign_labels", "best_split", "complete", "count", "demo_packages",
    "evaluate", "extract_rules", "grow_levelwise", "infer_schema", "inject",
    "kmeans", "parse", "prepare", "prune_to_k", "relation_from_csv", "render",
    "strip_projection", "validate_completable", "verify",
]
