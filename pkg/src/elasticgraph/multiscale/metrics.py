"""Internal node metrics of a shape graph.

Euclidean distance between node positions, shortest-path distance along
edge curves, and effective resistance of the electrical network whose
conductances are reciprocal edge lengths.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import networkx as nx
import numpy as np
from numpy.typing import NDArray
from scipy import linalg, sparse
from scipy.sparse.csgraph import connected_components, shortest_path
from scipy.spatial.distance import cdist

from elasticgraph.config import DEGENERATE_LENGTH, DISCONNECTED_SENTINEL_FACTOR
from elasticgraph.errors import PreconditionError
from elasticgraph.graph.model import ShapeGraph
from elasticgraph.graph.schema import MetricKind

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class InternalMetric:
    kind: MetricKind
    matrix: NDArray[np.float64]

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return len(self.matrix)


def _edge_lengths(g: ShapeGraph) -> dict[tuple[int, int], float]:
    return {
        (a, b): max(e.length, DEGENERATE_LENGTH)
        for (a, b), e in g.edges.items()
        if a != b
    }


def _adjacency(g: ShapeGraph, lengths: dict[tuple[int, int], float]) -> sparse.csr_matrix:
    n = g.n_nodes
    if not lengths:
        return sparse.csr_matrix((n, n))
    keys = np.array(list(lengths))
    vals = np.array(list(lengths.values()))
    return sparse.coo_matrix((vals, (keys[:, 0], keys[:, 1])), shape=(n, n)).tocsr()


def _resistance(g: ShapeGraph, lengths: dict[tuple[int, int], float]) -> NDArray[np.float64]:
    graph = nx.Graph()
    graph.add_nodes_from(range(g.n_nodes))
    graph.add_weighted_edges_from(((a, b, 1.0 / L) for (a, b), L in lengths.items()), weight="conductance")
    laplacian = nx.laplacian_matrix(graph, nodelist=range(g.n_nodes), weight="conductance").toarray()
    pinv = linalg.pinvh(laplacian.astype(float))
    diag = np.diag(pinv)
    return diag[:, None] + diag[None, :] - 2.0 * pinv


def _separate_components(matrix: NDArray[np.float64], labels: NDArray[np.int_]) -> NDArray[np.float64]:
    """Replace entries across components by a multiple of the largest finite entry."""
    same = labels[:, None] == labels[None, :]
    inside = matrix[same & np.isfinite(matrix)]
    largest = float(inside.max()) if inside.size else 0.0
    sentinel = DISCONNECTED_SENTINEL_FACTOR * (largest if largest > 0 else 1.0)
    out = matrix.copy()
    out[~same] = sentinel
    return out


def internal_metric(g: ShapeGraph, kind: MetricKind | str = MetricKind.RESISTANCE) -> InternalMetric:
    """Pairwise node distances of ``g`` under ``kind``.

    For the geodesic and resistance kinds, pairs in different connected
    components get ``DISCONNECTED_SENTINEL_FACTOR`` times the largest
    within-component distance.
    """
    kind = MetricKind(kind)
    if g.n_real != g.n_nodes:
        raise PreconditionError("internal metrics are defined on graphs without null nodes")
    n = g.n_nodes
    if n == 0:
        return InternalMetric(kind, np.zeros((0, 0)))

    if kind is MetricKind.EUCLIDEAN:
        matrix = cdist(g.positions, g.positions)
    else:
        lengths = _edge_lengths(g)
        adjacency = _adjacency(g, lengths)
        n_comp, labels = connected_components(adjacency, directed=False)
        if kind is MetricKind.GEODESIC:
            matrix = shortest_path(adjacency, method="D", directed=False)
        else:
            matrix = _resistance(g, lengths)
        if n_comp > 1:
            logger.debug("%d components; cross-component %s entries set to a sentinel", n_comp, kind.value)
            matrix = _separate_components(matrix, labels)

    matrix = 0.5 * (matrix + matrix.T)
    matrix = np.maximum(matrix, 0.0)
    np.fill_diagonal(matrix, 0.0)
    return InternalMetric(kind, matrix)
