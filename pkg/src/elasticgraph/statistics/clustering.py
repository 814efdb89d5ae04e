"""Clustering of a precomputed distance matrix.

Partitions come from k-medoids (greedy build followed by best-improvement
swaps); k is the silhouette maximizer over ``2..min(MAX_CLUSTERS, m - 1)``.
Points unusually far from their medoid can be flagged as outliers.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from sklearn.metrics import silhouette_score

from elasticgraph.config import DEFAULT_OUTLIER_FRACTION, MAX_CLUSTERS
from elasticgraph.errors import ArgumentError
from elasticgraph.graph.schema import ClusterRecord

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ClusterReport:
    """``labels[i]`` is the cluster of graph ``i``; ``modes[c]`` the medoid of cluster ``c``."""

    labels: NDArray[np.int_]
    modes: tuple[int, ...]
    outliers: tuple[int, ...]
    k: int
    silhouette: float
    scores: dict[int, float]

    def __post_init__(self) -> None:
        labels = np.array(self.labels, dtype=int)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    def order(self) -> NDArray[np.int_]:
        """Graph indices grouped by cluster, for reordering the matrix."""
        return np.argsort(self.labels, kind="stable")

    def record(self, names: Sequence[str]) -> ClusterRecord:
        return ClusterRecord(
            graphs=list(names),
            labels=[int(c) for c in self.labels],
            outliers=list(self.outliers),
            modes=list(self.modes),
            k=self.k,
            silhouette=self.silhouette,
        )


def _check_matrix(matrix: ArrayLike) -> NDArray[np.float64]:
    d = np.asarray(matrix, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ArgumentError(f"expected a square distance matrix, got shape {d.shape}")
    if not np.allclose(d, d.T) or np.any(d < 0) or np.any(np.diag(d) != 0):
        raise ArgumentError("distance matrix must be symmetric, nonnegative and zero on the diagonal")
    return d


def _cost(d: NDArray[np.float64], medoids: list[int]) -> float:
    return float(d[:, medoids].min(axis=1).sum())


def k_medoids(d: NDArray[np.float64], k: int) -> list[int]:
    """Medoid indices, sorted. Deterministic: ties go to the lowest index."""
    m = len(d)
    medoids = [int(np.argmin(d.sum(axis=1)))]
    while len(medoids) < k:
        nearest = d[:, medoids].min(axis=1)
        gains = np.array(
            [np.maximum(nearest - d[:, c], 0.0).sum() if c not in medoids else -np.inf for c in range(m)]
        )
        medoids.append(int(np.argmax(gains)))

    cost = _cost(d, medoids)
    while True:
        best = (cost, -1, -1)
        for pos in range(k):
            for c in range(m):
                if c in medoids:
                    continue
                trial = medoids[:pos] + [c] + medoids[pos + 1 :]
                trial_cost = _cost(d, trial)
                if trial_cost < best[0] - 1e-12 * max(cost, 1e-300):
                    best = (trial_cost, pos, c)
        if best[1] < 0:
            break
        cost, pos, c = best
        medoids[pos] = c
    return sorted(medoids)


def assign(d: NDArray[np.float64], medoids: Sequence[int]) -> NDArray[np.int_]:
    """Nearest medoid per point; every medoid keeps its own cluster."""
    labels = np.argmin(d[:, list(medoids)], axis=1)
    for c, medoid in enumerate(medoids):
        labels[medoid] = c
    return labels


def cluster_distances(
    matrix: ArrayLike,
    outlier_fraction: float = DEFAULT_OUTLIER_FRACTION,
    max_clusters: int = MAX_CLUSTERS,
) -> ClusterReport:
    """Cluster graphs from their pairwise distances.

    With ``outlier_fraction > 0``, points whose distance to their medoid
    exceeds the ``1 - outlier_fraction`` quantile of those distances are
    reported as outliers; they keep their label.
    """
    d = _check_matrix(matrix)
    m = len(d)
    if m < 3:
        raise ArgumentError(f"clustering needs at least three graphs, got {m}")
    if not 0.0 <= outlier_fraction < 0.5:
        raise ArgumentError(f"outlier_fraction must lie in [0, 0.5), got {outlier_fraction}")

    best: tuple[float, int, list[int], NDArray[np.int_]] | None = None
    scores: dict[int, float] = {}
    for k in range(2, min(max_clusters, m - 1) + 1):
        medoids = k_medoids(d, k)
        labels = assign(d, medoids)
        score = float(silhouette_score(d, labels, metric="precomputed"))
        scores[k] = score
        logger.debug("k=%d: silhouette %.4f", k, score)
        if best is None or score > best[0] + 1e-12:
            best = (score, k, medoids, labels)

    score, k, medoids, labels = best
    outliers: tuple[int, ...] = ()
    if outlier_fraction > 0:
        spread = d[np.arange(m), np.asarray(medoids)[labels]]
        cutoff = float(np.quantile(spread, 1.0 - outlier_fraction))
        outliers = tuple(int(i) for i in np.flatnonzero(spread > cutoff))
    logger.info("Clustered %d graphs into k=%d (silhouette %.4f, %d outlier(s))", m, k, score, len(outliers))
    return ClusterReport(labels, tuple(medoids), outliers, k, score, scores)
