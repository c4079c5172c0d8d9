"""Lloyd's k-means with k-means++ seeding, deterministic per seed.

Everything runs on a single seeded PCG64 generator in a fixed order, so
identical (matrix, k, seed) triples give bit-identical results.  Empty
clusters never survive an iteration: each one is reseeded to the point
farthest from its (stale) centroid, which can only lower the cost, so
the per-iteration inertia trace stays non-increasing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import KOutOfRangeError, SizeMismatchError
from .evaluate import ResultSet
from .features import FeatureMatrix
from .tree import LabeledRows

DEFAULT_MAX_ITER = 300
DEFAULT_TOL = 1e-6


@dataclass
class ClusterModel:
    k: int
    centroids: np.ndarray          # (k, n_features)
    labels: np.ndarray             # (n_rows,) ints in [0, k)
    inertia: float                 # sum of squared point-to-centroid distances
    iterations: int
    inertia_trace: list[float] = field(default_factory=list)


def _sq_distances(x: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = x[:, None, :] - centroids[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _plus_plus_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centroids = np.empty((k, x.shape[1]))
    centroids[0] = x[rng.integers(n)]
    closest = np.einsum("ij,ij->i", x - centroids[0], x - centroids[0])
    for c in range(1, k):
        total = closest.sum()
        if total > 0.0:
            idx = rng.choice(n, p=closest / total)
        else:
            idx = rng.integers(n)  # all remaining points coincide with a centroid
        centroids[c] = x[idx]
        d = np.einsum("ij,ij->i", x - centroids[c], x - centroids[c])
        closest = np.minimum(closest, d)
    return centroids


def kmeans(features: FeatureMatrix, k: int, seed: int = 0,
           max_iter: int = DEFAULT_MAX_ITER, tol: float = DEFAULT_TOL) -> ClusterModel:
    """Cluster the feature matrix into k groups.

    ``seed`` may be any 64-bit integer.  Iteration stops when no
    centroid moved more than ``tol`` (max absolute coordinate change)
    or after ``max_iter`` rounds.  Every cluster id appears in the
    returned labels.
    """
    x = features.values
    n = x.shape[0]
    if not 1 <= k <= n:
        raise KOutOfRangeError(f"k={k} is outside 1..{n} for {n} rows")

    rng = np.random.default_rng(np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
    centroids = _plus_plus_init(x, k, rng)
    labels = np.zeros(n, dtype=int)
    trace: list[float] = []
    iterations = 0
    for iterations in range(1, max_iter + 1):
        dist = _sq_distances(x, centroids)
        labels = dist.argmin(axis=1)

        counts = np.bincount(labels, minlength=k)
        for empty in np.flatnonzero(counts == 0):
            # steal the farthest point, but never empty a singleton cluster
            eligible = counts[labels] > 1
            candidates = np.where(eligible, dist[:, empty], -np.inf)
            p = int(candidates.argmax())
            counts[labels[p]] -= 1
            counts[empty] += 1
            centroids[empty] = x[p]
            labels[p] = empty
            dist[:, empty] = np.einsum("ij,ij->i", x - centroids[empty], x - centroids[empty])

        inertia = float(dist[np.arange(n), labels].sum())
        assert not trace or inertia <= trace[-1] * (1 + 1e-12) + 1e-12, \
            "inertia increased between iterations"
        trace.append(inertia)

        moved = 0.0
        for c in range(k):
            members = x[labels == c]
            new_centroid = members.mean(axis=0)
            moved = max(moved, float(np.abs(new_centroid - centroids[c]).max()))
            centroids[c] = new_centroid
        if moved < tol:
            break

    final_inertia = float(_sq_distances(x, centroids)[np.arange(n), labels].sum())
    return ClusterModel(k, centroids, labels, final_inertia, iterations, trace)


def assign_labels(rs: ResultSet, model: ClusterModel) -> LabeledRows:
    """Pair working rows with their cluster ids for tree induction."""
    if len(model.labels) != len(rs.rows):
        raise SizeMismatchError(
            f"{len(model.labels)} labels for {len(rs.rows)} rows")
    return LabeledRows(rs.columns, list(rs.rows), [int(c) for c in model.labels])
