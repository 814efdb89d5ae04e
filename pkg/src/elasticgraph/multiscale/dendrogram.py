"""Complete-linkage agglomerative clustering of graph nodes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from elasticgraph.errors import ArgumentError
from elasticgraph.multiscale.metrics import InternalMetric


@dataclass(frozen=True, eq=False)
class Dendrogram:
    """Merge tree over ``n`` leaves.

    ``merges[s] = (i, j, height, size)`` in the scipy linkage layout: ids
    below ``n`` are leaves, id ``n + s`` is the cluster formed at step ``s``.
    """

    n: int
    merges: NDArray[np.float64]

    @property
    def heights(self) -> NDArray[np.float64]:
        return self.merges[:, 2]

    def cut(self, k: int) -> NDArray[np.int_]:
        """Labels of the ``k``-cluster partition, numbered by first appearance."""
        if not 1 <= k <= max(self.n, 1):
            raise ArgumentError(f"cannot cut {self.n} leaves into {k} clusters")
        parent = list(range(self.n + len(self.merges)))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for step in range(self.n - k):
            i, j = int(self.merges[step, 0]), int(self.merges[step, 1])
            new = self.n + step
            parent[find(i)] = new
            parent[find(j)] = new

        labels = np.empty(self.n, dtype=int)
        seen: dict[int, int] = {}
        for leaf in range(self.n):
            labels[leaf] = seen.setdefault(find(leaf), len(seen))
        return labels


def build_dendrogram(metric: InternalMetric) -> Dendrogram:
    """Complete linkage; ties go to the pair of clusters with the smallest
    ``(i, j)`` where each cluster is named by its smallest member."""
    n = metric.n
    dist = np.array(metric.matrix, dtype=float)
    cluster_id = list(range(n))
    size = [1] * n
    active = np.ones(n, dtype=bool)
    merges = np.zeros((max(n - 1, 0), 4))

    for step in range(n - 1):
        masked = np.where(active[:, None] & active[None, :], dist, np.inf)
        masked[np.tril_indices(n)] = np.inf
        flat = int(np.argmin(masked))
        i, j = divmod(flat, n)
        merges[step] = (cluster_id[i], cluster_id[j], masked[i, j], size[i] + size[j])

        dist[i, :] = np.maximum(dist[i, :], dist[j, :])
        dist[:, i] = dist[i, :]
        dist[i, i] = 0.0
        active[j] = False
        cluster_id[i] = n + step
        size[i] += size[j]
    return Dendrogram(n, merges)
