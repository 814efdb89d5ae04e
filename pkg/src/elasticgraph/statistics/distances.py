"""Pairwise graph distance matrices."""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np
from numpy.typing import NDArray

from elasticgraph.errors import ArgumentError
from elasticgraph.graph.model import ShapeGraph
from elasticgraph.matching.params import MatchingParams
from elasticgraph.matching.register import register_pair

logger = logging.getLogger(__name__)


def directed_distances(graphs: Sequence[ShapeGraph], params: MatchingParams | None = None) -> NDArray[np.float64]:
    """``D[i, j]`` = d_graph of ``register_pair(graphs[i], graphs[j])``."""
    params = params or MatchingParams()
    m = len(graphs)
    out = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            if i != j:
                out[i, j] = register_pair(graphs[i], graphs[j], params).d_graph
        logger.debug("Distances from graph %d of %d done", i + 1, m)
    return out


def pairwise_distances(graphs: Sequence[ShapeGraph], params: MatchingParams | None = None) -> NDArray[np.float64]:
    """Symmetric d_graph matrix; each entry averages both registration directions."""
    if len(graphs) < 2:
        raise ArgumentError(f"pairwise_distances needs at least two graphs, got {len(graphs)}")
    directed = directed_distances(graphs, params)
    matrix = 0.5 * (directed + directed.T)
    np.fill_diagonal(matrix, 0.0)
    logger.info("Pairwise distances for %d graphs", len(graphs))
    return matrix
