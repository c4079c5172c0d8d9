"""End-to-end query completion.

Given a query and a database snapshot: evaluate the query with its
projection stripped, cluster the working rows, grow a tree with one
leaf per requested completion, and turn each root-to-leaf path into an
extra WHERE conjunction on the original query (projection restored).
The k completions select pairwise disjoint slices of the original
answer whose union gives it back exactly; :func:`verify` re-checks that
from scratch for any completion set.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

from . import kmeans as km
from .errors import EmptyWorkingDataError, KOutOfRangeError, SizeMismatchError
from .evaluate import DEFAULT_MAX_ROWS, compile_predicate, count, evaluate
from .features import FeatureConfig, prepare
from .sqlmodel import (
    Conjunction,
    QueryAst,
    inject,
    parse,
    render,
    strip_projection,
)
from .store import DatabaseSnapshot
from .tree import LabeledRows, extract_rules, grow_levelwise, prune_to_k


@dataclass(frozen=True)
class EngineConfig:
    """Tunables for one completion run; defaults suit desk-scale data.

    ``debug_tree`` adds the induced tree's text dump to diagnostics.
    """

    k: int
    seed: int = 0
    max_rows: int = DEFAULT_MAX_ROWS
    feature: FeatureConfig = field(default_factory=FeatureConfig)
    kmeans_max_iter: int = km.DEFAULT_MAX_ITER
    kmeans_tol: float = km.DEFAULT_TOL
    debug_tree: bool = False

    def __post_init__(self):
        if self.k < 2:
            raise KOutOfRangeError(f"k must be at least 2, got {self.k}")
        if self.max_rows < 1:
            raise ValueError("max_rows must be positive")


@dataclass
class Completion:
    """One slice: the added conjunction and the full query carrying it."""

    conjunction: Conjunction
    query: QueryAst
    rendered: str
    row_count: int
    leaf_class: int
    leaf_purity: float


@dataclass
class CompletionSet:
    original: QueryAst
    original_rendered: str
    k_requested: int
    k_delivered: int
    completions: tuple[Completion, ...]
    diagnostics: dict


@dataclass
class VerificationReport:
    """Outcome of independently re-checking a completion set.

    ``witnesses`` holds human-readable evidence for any failure.  When
    the working data had been truncated, cover and disjointness are
    checked against the same truncated prefix and ``truncated`` says so.
    """

    each_is_completion: bool
    pairwise_disjoint: bool
    covers_original: bool
    truncated: bool
    checked_rows: int
    witnesses: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return self.each_is_completion and self.pairwise_disjoint and self.covers_original


def complete(query_text: str, cfg: EngineConfig, db: DatabaseSnapshot,
             labels: Sequence[int] | None = None) -> CompletionSet:
    """Produce up to ``cfg.k`` completions of ``query_text`` over ``db``.

    Fewer than k come back only when the data cannot support k distinct
    slices; ``diagnostics["insufficient_diversity"]`` flags that.  The
    ``labels`` argument bypasses clustering with caller-supplied cluster
    ids (one per working row, in row order) and exists for tests that
    need a pinned labeling; real callers never pass it.
    """
    timings: dict[str, float] = {}
    t0 = time.perf_counter()

    original = parse(query_text)
    stripped = strip_projection(original)
    wd = evaluate(stripped, db, max_rows=cfg.max_rows)
    timings["evaluate"] = time.perf_counter() - t0
    if not wd.rows:
        raise EmptyWorkingDataError("the query returned no rows; nothing to complete")
    if cfg.k > len(wd.rows):
        raise KOutOfRangeError(
            f"k={cfg.k} exceeds the {len(wd.rows)} working rows")

    inertia = None
    t1 = time.perf_counter()
    if labels is None:
        matrix = prepare(wd, cfg.feature)
        model = km.kmeans(matrix, cfg.k, seed=cfg.seed,
                          max_iter=cfg.kmeans_max_iter, tol=cfg.kmeans_tol)
        inertia = model.inertia
        labeled = km.assign_labels(wd, model)
    else:
        if len(labels) != len(wd.rows):
            raise SizeMismatchError(
                f"{len(labels)} labels supplied for {len(wd.rows)} working rows")
        labeled = LabeledRows(wd.columns, list(wd.rows), [int(c) for c in labels])
    timings["cluster"] = time.perf_counter() - t1

    t2 = time.perf_counter()
    tree = grow_levelwise(labeled, cfg.k)
    if tree.leaf_count > cfg.k:
        tree = prune_to_k(tree, cfg.k)
    timings["tree"] = time.perf_counter() - t2

    completions: list[Completion] = []
    t3 = time.perf_counter()
    if tree.leaf_count > 1:
        for rule in extract_rules(tree):
            query = inject(original, rule.conjunction)
            hits = sum(1 for i in rule.row_indices
                       if labeled.labels[i] == rule.cls)
            completions.append(Completion(
                conjunction=rule.conjunction,
                query=query,
                rendered=render(query),
                row_count=count(query, db),
                leaf_class=rule.cls,
                leaf_purity=hits / len(rule.row_indices),
            ))
    timings["extract"] = time.perf_counter() - t3
    timings["total"] = time.perf_counter() - t0

    diagnostics_extra = {"tree_dump": tree.dump()} if cfg.debug_tree else {}
    return CompletionSet(
        original=original,
        original_rendered=render(original),
        k_requested=cfg.k,
        k_delivered=len(completions),
        completions=tuple(completions),
        diagnostics={
            "truncated": wd.truncated,
            "insufficient_diversity": tree.insufficient_diversity,
            "inertia": inertia,
            "tree_depth": tree.depth,
            "working_rows": len(wd.rows),
            "max_rows": cfg.max_rows,
            "timings": timings,
            **diagnostics_extra,
        },
    )


def verify(cs: CompletionSet, db: DatabaseSnapshot) -> VerificationReport:
    """Re-check the partition claim for a completion set, from scratch.

    Three facts are established independently of how ``cs`` was built:

    * each completion is the original query plus at least one extra
      WHERE conjunct (projection, FROM and the original atoms intact);
    * no row of the original evaluation is claimed by two completions;
    * every row of the original evaluation is claimed by one.

    Row identity is by ordinal of the original evaluation, which is
    well-defined because all queries share the same deterministic FROM
    enumeration.  If the working data had been truncated the same cap
    is applied here.
    """
    witnesses: list[str] = []
    original = cs.original
    prefix = original.where.atoms

    each_ok = True
    for idx, comp in enumerate(cs.completions):
        q = comp.query
        reasons = []
        if q.select != original.select:
            reasons.append("projection differs")
        if q.from_tables != original.from_tables:
            reasons.append("FROM differs")
        if q.where.atoms[:len(prefix)] != prefix:
            reasons.append("WHERE does not keep the original atoms as a prefix")
        if len(q.where.atoms) <= len(prefix):
            reasons.append("no conjunct was added")
        if comp.conjunction.atoms != q.where.atoms[len(prefix):]:
            reasons.append("stated conjunction is not the added suffix")
        if reasons:
            each_ok = False
            witnesses.append(f"completion {idx}: " + "; ".join(reasons))

    truncated = bool(cs.diagnostics.get("truncated"))
    max_rows = cs.diagnostics.get("max_rows") if truncated else None
    base = evaluate(strip_projection(original), db, max_rows=max_rows)

    owners: list[list[int]] = [[] for _ in base.rows]
    stripped = strip_projection(original)
    for idx, comp in enumerate(cs.completions):
        added = compile_predicate(comp.conjunction.atoms, stripped, db)
        for ordinal, row in enumerate(base.rows):
            if added(row):
                owners[ordinal].append(idx)

    disjoint = True
    covers = True
    dropped = 0
    for ordinal, who in enumerate(owners):
        if len(who) == 1:
            continue
        if who:
            disjoint = False
            note = f"row {ordinal} {base.rows[ordinal]!r} claimed by completions {who}"
        else:
            covers = False
            note = f"row {ordinal} {base.rows[ordinal]!r} claimed by none"
        if len(witnesses) < 20:
            witnesses.append(note)
        else:
            dropped += 1
    if dropped:
        witnesses.append(f"... and {dropped} more rows")

    return VerificationReport(
        each_is_completion=each_ok,
        pairwise_disjoint=disjoint,
        covers_original=covers,
        truncated=truncated,
        checked_rows=len(base.rows),
        witnesses=tuple(witnesses),
    )
