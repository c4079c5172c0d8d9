"""Levelwise binary decision tree constrained to exactly k leaves.

The tree explains cluster labels with conditions a query can reuse.
Split candidates quote values that actually occur in the data: numeric
thresholds t come from observed values (split as col < t vs col >= t,
the minimum excluded since it separates nothing), categorical splits
are col = v vs col <> v.  NULLs always follow the complement branch
(< t for numerics, <> v for categoricals); when the column is nullable
the extracted condition for that branch says so explicitly.

Growth is breadth-first one full level at a time and stops at the first
level with at least k leaves; sibling-leaf merges then prune back down
to exactly k.  Impurity is weighted Gini, compared in exact rational
arithmetic so ties break reproducibly: lower column position first,
then smaller split value, numerics before categoricals.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import BareRootError, CannotPruneError, KOutOfRangeError
from .evaluate import ResultColumn
from .sqlmodel import Atom, ColumnRef, Conjunction, SqlValue, render_atom
from .store import NUMERIC


@dataclass
class LabeledRows:
    """Working rows plus their cluster ids, kept side by side.

    The label is pipeline-internal: it never becomes a result column
    and never appears in rendered SQL.
    """

    columns: tuple[ResultColumn, ...]
    rows: list[tuple]
    labels: list[int]

    def __post_init__(self):
        if len(self.rows) != len(self.labels):
            raise ValueError(f"{len(self.rows)} rows vs {len(self.labels)} labels")


@dataclass(frozen=True)
class Split:
    """One binary test.  ``lo``/``hi`` name the two sides of the pair
    (col < t | col >= t) or (col = v | col <> v); ``null_side`` says
    which side NULL values take.
    """

    column: ColumnRef
    col_index: int
    kind: str                 # "numeric" | "categorical"
    value: float | str
    lo_condition: Atom
    hi_condition: Atom
    null_side: str            # "lo" | "hi"
    gini: float

    def goes_left(self, value) -> bool:
        """Left child holds the affirmative side: col >= t, or col = v.
        NULLs go right, with the complement."""
        if value is None:
            return False
        if self.kind == "numeric":
            return value >= self.value
        return value == self.value

    def left_condition(self) -> Atom:
        return self.hi_condition if self.kind == "numeric" else self.lo_condition

    def right_condition(self, nullable: bool) -> Atom:
        atom = self.lo_condition if self.kind == "numeric" else self.hi_condition
        return replace(atom, or_null=True) if nullable else atom


@dataclass
class Node:
    """Leaf until ``split`` is set; then an internal node with two children."""

    row_indices: tuple[int, ...]
    depth: int
    cls: int | None = None
    split: Split | None = None
    left: "Node | None" = None
    right: "Node | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.split is None


@dataclass
class DecisionTree:
    root: Node
    depth: int
    leaf_count: int
    columns: tuple[ResultColumn, ...]
    labels: tuple[int, ...]
    insufficient_diversity: bool = False

    def leaves(self) -> Iterator[Node]:
        """Leaves in left-to-right order (affirmative branches first)."""
        def walk(node: Node) -> Iterator[Node]:
            if node.is_leaf:
                yield node
            else:
                yield from walk(node.left)
                yield from walk(node.right)
        return walk(self.root)

    def dump(self) -> str:
        """Indented text form, for debugging and bug reports."""
        lines: list[str] = []

        def walk(node: Node, pad: str):
            if node.is_leaf:
                lines.append(f"{pad}leaf class={node.cls} rows={len(node.row_indices)}")
                return
            nullable = self.columns[node.split.col_index].schema.nullable
            lines.append(f"{pad}split {render_atom(node.split.left_condition())}"
                         f" (gini={node.split.gini:.4f})")
            walk(node.left, pad + "  ")
            lines.append(f"{pad}else {render_atom(node.split.right_condition(nullable))}")
            walk(node.right, pad + "  ")

        walk(self.root, "")
        return "\n".join(lines)


@dataclass(frozen=True)
class Rule:
    """A root-to-leaf path: the conjunction plus what the leaf holds."""

    conjunction: Conjunction
    cls: int
    row_indices: tuple[int, ...]


# --- impurity ------------------------------------------------------------------

# Weighted Gini over a two-way partition compares as
#   n - (S_lo/n_lo + S_hi/n_hi)            with S = sum of squared class counts,
# up to the constant factor 1/n.  Keeping it a Fraction makes "equal
# impurity" exact, so tie-breaking cannot depend on float rounding.


def _sq_sum(counts: Counter) -> int:
    return sum(c * c for c in counts.values())


def _impurity_key(n: int, n_lo: int, s_lo: int, n_hi: int, s_hi: int) -> Fraction:
    return Fraction(n) - Fraction(s_lo, n_lo) - Fraction(s_hi, n_hi)


def _majority(labels: Sequence[int], indices: Sequence[int]) -> int:
    counts = Counter(labels[i] for i in indices)
    top = max(counts.values())
    return min(c for c, v in counts.items() if v == top)


def column_ref_for(columns: tuple[ResultColumn, ...], col_index: int) -> ColumnRef:
    """Reference a working column, qualified only when the bare name is
    ambiguous across the source tables."""
    name = columns[col_index].schema.name
    dup = sum(1 for c in columns if c.schema.name.lower() == name.lower()) > 1
    return ColumnRef(columns[col_index].table if dup else None, name)


def best_split(rows: LabeledRows, subset: Sequence[int]) -> Split | None:
    """Lowest weighted-Gini split of ``subset``, or None.

    None means the subset is pure or no candidate separates it (both
    sides of every candidate must be non-empty).  Ties go to the lower
    column position, then the smaller threshold/value; candidates are
    scanned in exactly that order, so keeping the first strict minimum
    realizes the tie-break.
    """
    labels = rows.labels
    total = Counter(labels[i] for i in subset)
    if len(total) < 2:
        return None
    n = len(subset)

    best_key: Fraction | None = None
    best: tuple[int, str, float | str] | None = None

    for ci, col in enumerate(rows.columns):
        groups: dict = {}
        null_counts: Counter = Counter()
        for i in subset:
            v = rows.rows[i][ci]
            if v is None:
                null_counts[labels[i]] += 1
            else:
                groups.setdefault(v, Counter())[labels[i]] += 1
        if not groups:
            continue
        ordered = sorted(groups)

        if col.schema.type == NUMERIC:
            # sweep ascending; after absorbing groups < t the candidate is t
            lo = Counter(null_counts)
            n_lo, s_lo = sum(lo.values()), _sq_sum(lo)
            hi = total - null_counts
            n_hi, s_hi = sum(hi.values()), _sq_sum(hi)
            for gi in range(len(ordered) - 1):
                for c, m in groups[ordered[gi]].items():
                    s_lo += m * (2 * lo[c] + m)
                    s_hi -= m * (2 * hi[c] - m)
                    lo[c] += m
                    hi[c] -= m
                    n_lo += m
                    n_hi -= m
                key = _impurity_key(n, n_lo, s_lo, n_hi, s_hi)
                if best_key is None or key < best_key:
                    best_key, best = key, (ci, "numeric", ordered[gi + 1])
        else:
            for v in ordered:
                lo = groups[v]
                n_lo = sum(lo.values())
                if n_lo == n:
                    continue  # nothing on the <> side
                hi = total - lo
                key = _impurity_key(n, n_lo, _sq_sum(lo), n - n_lo, _sq_sum(hi))
                if best_key is None or key < best_key:
                    best_key, best = key, (ci, "categorical", v)

    if best is None:
        return None
    ci, kind, value = best
    ref = column_ref_for(rows.columns, ci)
    if kind == "numeric":
        lo_cond = Atom(ref, "<", SqlValue.of(value))
        hi_cond = Atom(ref, ">=", SqlValue.of(value))
        null_side = "lo"
    else:
        lo_cond = Atom(ref, "=", SqlValue.of(value))
        hi_cond = Atom(ref, "<>", SqlValue.of(value))
        null_side = "hi"
    return Split(ref, ci, kind, value, lo_cond, hi_cond, null_side,
                 gini=float(best_key / n))


def partition(split: Split, rows: LabeledRows,
              subset: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Route subset rows through a split, preserving index order."""
    left = tuple(i for i in subset if split.goes_left(rows.rows[i][split.col_index]))
    right = tuple(i for i in subset if not split.goes_left(rows.rows[i][split.col_index]))
    return left, right


def grow_levelwise(rows: LabeledRows, k: int) -> DecisionTree:
    """Grow breadth-first until at least k leaves exist.

    Each round splits every splittable leaf of the deepest level at
    once; leaves that stall stay leaves forever.  If growth stalls
    before reaching k leaves the tree comes back smaller with
    ``insufficient_diversity`` set.  Use :func:`prune_to_k` to trim an
    overshoot back to exactly k.
    """
    n = len(rows.rows)
    if not 2 <= k <= n:
        raise KOutOfRangeError(f"k={k} is outside 2..{n} for {n} working rows")

    root = Node(tuple(range(n)), depth=0)
    frontier = [root]
    leaf_count = 1
    stalled = False
    while leaf_count < k:
        splittable = []
        for leaf in frontier:
            split = best_split(rows, leaf.row_indices)
            if split is not None:
                splittable.append((leaf, split))
        if not splittable:
            stalled = True
            break
        next_frontier = []
        for leaf, split in splittable:
            left_idx, right_idx = partition(split, rows, leaf.row_indices)
            leaf.split = split
            leaf.left = Node(left_idx, leaf.depth + 1)
            leaf.right = Node(right_idx, leaf.depth + 1)
            next_frontier.extend((leaf.left, leaf.right))
        leaf_count += len(splittable)
        frontier = next_frontier

    tree = DecisionTree(root, 0, leaf_count, rows.columns, tuple(rows.labels),
                        insufficient_diversity=stalled and leaf_count < k)
    _finalize(tree)
    return tree


def _finalize(tree: DecisionTree) -> None:
    depth = 0
    count = 0
    for leaf in tree.leaves():
        leaf.cls = _majority(tree.labels, leaf.row_indices)
        depth = max(depth, leaf.depth)
        count += 1
    tree.depth = depth
    tree.leaf_count = count


def _merge_increase(labels: Sequence[int], left: Node, right: Node) -> Fraction:
    # growth in total weighted impurity if these siblings collapse
    lc = Counter(labels[i] for i in left.row_indices)
    rc = Counter(labels[i] for i in right.row_indices)
    merged = lc + rc
    return (Fraction(_sq_sum(lc), len(left.row_indices))
            + Fraction(_sq_sum(rc), len(right.row_indices))
            - Fraction(_sq_sum(merged), len(left.row_indices) + len(right.row_indices)))


def prune_to_k(tree: DecisionTree, k: int) -> DecisionTree:
    """Merge sibling leaf pairs until exactly k leaves remain.

    Only pairs at the deepest such level are considered; the pair whose
    merge raises total weighted Gini the least goes first, leftmost on a
    tie.  The input tree is not modified.
    """
    if tree.leaf_count < k:
        raise CannotPruneError(f"tree has {tree.leaf_count} leaves, cannot prune to {k}")
    pruned = DecisionTree(_copy_node(tree.root), tree.depth, tree.leaf_count,
                          tree.columns, tree.labels, tree.insufficient_diversity)
    while pruned.leaf_count > k:
        pairs: list[Node] = []

        def collect(node: Node):
            if node.is_leaf:
                return
            if node.left.is_leaf and node.right.is_leaf:
                pairs.append(node)
            collect(node.left)
            collect(node.right)

        collect(pruned.root)
        deepest = max(p.depth + 1 for p in pairs)
        chosen = None
        chosen_cost = None
        for p in pairs:
            if p.depth + 1 != deepest:
                continue
            cost = _merge_increase(pruned.labels, p.left, p.right)
            if chosen_cost is None or cost < chosen_cost:
                chosen, chosen_cost = p, cost
        chosen.split = None
        chosen.left = None
        chosen.right = None
        pruned.leaf_count -= 1
    _finalize(pruned)
    return pruned


def _copy_node(node: Node) -> Node:
    if node.is_leaf:
        return Node(node.row_indices, node.depth, node.cls)
    return Node(node.row_indices, node.depth, node.cls, node.split,
                _copy_node(node.left), _copy_node(node.right))


def extract_rules(tree: DecisionTree) -> list[Rule]:
    """One rule per leaf, left to right: the atoms along its path.

    The complement branch of a split on a nullable column widens its
    atom with ``or_null`` so NULL rows stay accounted for.  A bare-root
    tree has no conditions to extract and raises :class:`BareRootError`.
    """
    if tree.root.is_leaf:
        raise BareRootError("tree is a single leaf; no conditions to extract")
    rules: list[Rule] = []

    def walk(node: Node, atoms: tuple[Atom, ...]):
        if node.is_leaf:
            rules.append(Rule(Conjunction(atoms), node.cls, node.row_indices))
            return
        nullable = tree.columns[node.split.col_index].schema.nullable
        walk(node.left, atoms + (node.split.left_condition(),))
        walk(node.right, atoms + (node.split.right_condition(nullable),))

    walk(tree.root, ())
    return rules
