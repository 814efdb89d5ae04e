"""Affinity matrix of a padded shape-graph pair.

The matrix is indexed by node assignments: entry ``a * n + j`` stands for
"node ``a`` of g0 goes to node ``j`` of g1". Diagonal entries score node
positions, off-diagonal entries score edge pairs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.typing import NDArray
from scipy import sparse
from scipy.spatial.distance import cdist

from elasticgraph.config import DEFAULT_SEED, M_PAIR_BUDGET
from elasticgraph.curves.registration import d_srv_many
from elasticgraph.errors import ArgumentError
from elasticgraph.graph.model import ShapeGraph

logger = logging.getLogger(__name__)


def check_parameters(lam: float, eta: float, e: float) -> None:
    if not 0.0 <= lam <= 1.0:
        raise ArgumentError(f"lambda must lie in [0, 1], got {lam}")
    if not eta > 0:
        raise ArgumentError(f"eta must be positive, got {eta}")
    if not e > 0:
        raise ArgumentError(f"e must be positive, got {e}")


def estimate_mean_distance(g0: ShapeGraph, g1: ShapeGraph, seed: int = DEFAULT_SEED) -> float:
    """Mean distance between real nodes of ``g0`` and real nodes of ``g1``.

    Exact when the pair count fits the budget, otherwise a seeded sample
    of that many pairs.
    """
    p0 = g0.positions[g0.real_indices]
    p1 = g1.positions[g1.real_indices]
    if len(p0) == 0 or len(p1) == 0:
        return 0.0
    if len(p0) * len(p1) <= M_PAIR_BUDGET:
        return float(cdist(p0, p1).mean())
    rng = np.random.default_rng(seed)
    i = rng.integers(0, len(p0), size=M_PAIR_BUDGET)
    j = rng.integers(0, len(p1), size=M_PAIR_BUDGET)
    logger.debug("Sampled %d of %d node pairs for M", M_PAIR_BUDGET, len(p0) * len(p1))
    return float(np.linalg.norm(p0[i] - p1[j], axis=1).mean())


@dataclass(frozen=True, eq=False)
class EdgeSet:
    """Real edges of one graph: keys, SRVFs oriented along the key, weights."""

    keys: tuple[tuple[int, int], ...]
    srvfs: NDArray[np.float64]
    weights: NDArray[np.float64]

    @classmethod
    def of(cls, g: ShapeGraph, n_samples: int) -> EdgeSet:
        keys = tuple(sorted(k for k, e in g.edges.items() if k[0] != k[1] and e.weight > 0))
        srvfs = (
            np.stack([g.edges[k].srvf(n_samples) for k in keys]) if keys else np.zeros((0, n_samples, 2))
        )
        weights = np.array([g.edges[k].weight for k in keys], dtype=float)
        return cls(keys, srvfs, weights)

    @cached_property
    def position(self) -> dict[tuple[int, int], int]:
        return {k: i for i, k in enumerate(self.keys)}


@dataclass(frozen=True, eq=False)
class EdgeDistanceTable:
    """d_srv for every pair of real edges, in both relative orientations.

    ``same[e, f]`` compares edge ``e`` of g0 with edge ``f`` of g1 as stored;
    ``flip[e, f]`` compares it with ``f`` reversed.
    """

    edges0: EdgeSet
    edges1: EdgeSet
    same: NDArray[np.float64]
    flip: NDArray[np.float64]
    n_samples: int

    @classmethod
    def build(cls, g0: ShapeGraph, g1: ShapeGraph, n_samples: int) -> EdgeDistanceTable:
        e0 = EdgeSet.of(g0, n_samples)
        e1 = EdgeSet.of(g1, n_samples)
        m0, m1 = len(e0.keys), len(e1.keys)
        if m0 == 0 or m1 == 0:
            empty = np.zeros((m0, m1))
            return cls(e0, e1, empty, empty.copy(), n_samples)
        left = np.repeat(e0.srvfs, m1, axis=0)
        right = np.tile(e1.srvfs, (m0, 1, 1))
        flipped = -right[:, ::-1, :]
        dist = d_srv_many(np.concatenate([left, left]), np.concatenate([right, flipped]))
        same, flip = np.split(dist, 2)
        logger.debug("Edge distance table: %d x %d edge pairs at %d samples", m0, m1, n_samples)
        return cls(e0, e1, same.reshape(m0, m1), flip.reshape(m0, m1), n_samples)

    def d_eta(self, eta: float) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """d_eta for every edge pair, same and flipped orientation."""
        w0 = self.edges0.weights[:, None]
        w1 = self.edges1.weights[None, :]
        through_null = eta * (w0 + w1)
        diff = eta * np.abs(w0 - w1)
        return np.minimum(self.same + diff, through_null), np.minimum(self.flip + diff, through_null)

    def lookup(self, key0: tuple[int, int], key1: tuple[int, int], flipped: bool) -> float:
        e = self.edges0.position[key0]
        f = self.edges1.position[key1]
        return float(self.flip[e, f] if flipped else self.same[e, f])


@dataclass(frozen=True, eq=False)
class AffinityMatrix:
    matrix: sparse.csr_matrix
    n: int
    lam: float
    eta: float
    e: float
    mean_distance: float
    table: EdgeDistanceTable

    def assignment_indices(self, permutation: NDArray[np.int_]) -> NDArray[np.int_]:
        return np.arange(self.n) * self.n + np.asarray(permutation)

    def objective(self, permutation: NDArray[np.int_]) -> float:
        """vec(P)^T K vec(P) for the permutation matrix of ``permutation``."""
        idx = self.assignment_indices(permutation)
        return float(self.matrix[idx][:, idx].sum())

    def dense(self) -> NDArray[np.float64]:
        return self.matrix.toarray()


def node_affinities(g0: ShapeGraph, g1: ShapeGraph, lam: float, e: float, mean_distance: float) -> NDArray[np.float64]:
    """Diagonal block as an ``n x n`` array indexed ``[a, j]``."""
    n = g0.n_nodes
    real0 = ~g0.null_mask
    real1 = ~g1.null_mask
    out = np.full((n, n), 1.0 - lam)
    if real0.any() and real1.any():
        dist = cdist(g0.positions[real0], g1.positions[real1])
        max_d = float(dist.max())
        ratio = dist / max_d if max_d > 0 else np.zeros_like(dist)
        out[np.ix_(real0, real1)] = (1.0 - lam) * (1.0 - ratio)
        null_ratio = e * mean_distance / max_d if max_d > 0 else 0.0
    else:
        null_ratio = 0.0
    mixed = np.logical_xor(real0[:, None], real1[None, :])
    out[mixed] = (1.0 - lam) * max(0.0, 1.0 - null_ratio)
    return out


def build_affinity(
    g0: ShapeGraph,
    g1: ShapeGraph,
    lam: float,
    eta: float,
    e: float,
    n_samples: int,
    mean_distance: float | None = None,
    table: EdgeDistanceTable | None = None,
    seed: int = DEFAULT_SEED,
) -> AffinityMatrix:
    """Affinity matrix of two padded graphs with the same node count."""
    check_parameters(lam, eta, e)
    if g0.n_nodes != g1.n_nodes:
        raise ArgumentError(f"padded graphs must have equal node counts, got {g0.n_nodes} and {g1.n_nodes}")
    n = g0.n_nodes
    if mean_distance is None:
        mean_distance = estimate_mean_distance(g0, g1, seed)
    if table is None:
        table = EdgeDistanceTable.build(g0, g1, n_samples)

    diag = node_affinities(g0, g1, lam, e, mean_distance).ravel()
    rows = [np.arange(n * n)]
    cols = [np.arange(n * n)]
    vals = [diag]

    m0, m1 = len(table.edges0.keys), len(table.edges1.keys)
    if m0 and m1:
        d_same, d_flip = table.d_eta(eta)
        max_d = float(max(d_same.max(), d_flip.max()))
        denom = max_d if max_d > 0 else 1.0
        k_same = (lam * (1.0 - d_same / denom)).ravel()
        k_flip = (lam * (1.0 - d_flip / denom)).ravel()

        ab = np.array(table.edges0.keys)
        jk = np.array(table.edges1.keys)
        a = np.repeat(ab[:, 0], m1)
        b = np.repeat(ab[:, 1], m1)
        j = np.tile(jk[:, 0], m0)
        k = np.tile(jk[:, 1], m0)
        for r, c, v in (
            (a * n + j, b * n + k, k_same),
            (a * n + k, b * n + j, k_flip),
        ):
            rows += [r, c]
            cols += [c, r]
            vals += [v, v]

    matrix = sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n * n, n * n)
    ).tocsr()
    logger.debug("Affinity matrix %dx%d with %d nonzeros", n * n, n * n, matrix.nnz)
    return AffinityMatrix(matrix, n, lam, eta, e, mean_distance, table)
