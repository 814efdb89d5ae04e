"""The graph distance d_graph evaluated at a given node permutation."""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from elasticgraph.config import DEFAULT_SAMPLES
from elasticgraph.curves.registration import d_srv_many
from elasticgraph.graph.model import ShapeGraph
from elasticgraph.matching.affinity import EdgeDistanceTable, check_parameters
from elasticgraph.matching.solvers import check_permutation


def matched_edge_pairs(
    g0: ShapeGraph, g1: ShapeGraph, permutation: NDArray[np.int_]
) -> list[tuple[tuple[int, int] | None, tuple[int, int] | None, bool]]:
    """Unordered node pairs carrying a real edge on either side.

    Each item is ``(key0, key1, flipped)``: the g0 edge key, the g1 key of
    the image pair (or ``None`` when that side is null) and whether the g1
    edge runs against the orientation induced from g0.
    """
    sigma = np.asarray(permutation)
    real0 = {k for k, e in g0.edges.items() if k[0] != k[1] and e.weight > 0}
    real1 = {k for k, e in g1.edges.items() if k[0] != k[1] and e.weight > 0}
    pairs = []
    seen1 = set()
    for a, b in sorted(real0):
        j, k = int(sigma[a]), int(sigma[b])
        key1 = (min(j, k), max(j, k))
        if key1 in real1:
            pairs.append(((a, b), key1, j > k))
            seen1.add(key1)
        else:
            pairs.append(((a, b), None, False))
    for key1 in sorted(real1 - seen1):
        pairs.append((None, key1, False))
    return pairs


def d_graph(
    g0: ShapeGraph,
    g1: ShapeGraph,
    permutation: NDArray[np.int_],
    lam: float,
    eta: float,
    e: float,
    mean_distance: float,
    n_samples: int = DEFAULT_SAMPLES,
    table: EdgeDistanceTable | None = None,
) -> float:
    """sqrt(lam * edge term + (1 - lam) * node term) for padded ``g0``, ``g1``.

    The edge term sums squared d_eta over ordered node pairs, so each
    undirected edge pair counts twice. A real node matched to a null one
    costs ``e * mean_distance``.
    """
    check_parameters(lam, eta, e)
    sigma = check_permutation(permutation, g0.n_nodes)
    if g1.n_nodes != g0.n_nodes:
        check_permutation(permutation, g1.n_nodes)

    pairs = matched_edge_pairs(g0, g1, sigma)
    edge_sq = 0.0
    both = [(k0, k1, flipped) for k0, k1, flipped in pairs if k0 is not None and k1 is not None]
    if both:
        if table is not None:
            shape_d = np.array([table.lookup(k0, k1, flipped) for k0, k1, flipped in both])
        else:
            q0 = np.stack([g0.edges[k0].srvf(n_samples) for k0, _, _ in both])
            q1 = np.stack([g1.edges[k1].srvf(n_samples) for _, k1, _ in both])
            flips = np.array([flipped for _, _, flipped in both])
            q1[flips] = -q1[flips][:, ::-1, :]
            shape_d = d_srv_many(q0, q1)
        w0 = np.array([g0.edges[k0].weight for k0, _, _ in both])
        w1 = np.array([g1.edges[k1].weight for _, k1, _ in both])
        d_eta = np.minimum(shape_d + eta * np.abs(w0 - w1), eta * (w0 + w1))
        edge_sq += float(np.sum(d_eta**2))
    for k0, k1, _ in pairs:
        if k1 is None:
            edge_sq += (eta * g0.edges[k0].weight) ** 2
        elif k0 is None:
            edge_sq += (eta * g1.edges[k1].weight) ** 2

    null0 = g0.null_mask
    null1 = g1.null_mask[sigma]
    real_real = ~null0 & ~null1
    diff = g0.positions[real_real] - g1.positions[sigma[real_real]]
    node_sq = float(np.sum(diff * diff))
    node_sq += float(np.count_nonzero(null0 ^ null1)) * (e * mean_distance) ** 2

    total = lam * 2.0 * edge_sq + (1.0 - lam) * node_sq
    return float(np.sqrt(max(total, 0.0)))
