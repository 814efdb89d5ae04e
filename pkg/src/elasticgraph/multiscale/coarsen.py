"""Coarse graphs cut from a node dendrogram, and resolution selection."""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from elasticgraph.config import DEFAULT_LEVELS, DEFAULT_SAMPLES
from elasticgraph.curves.mean import karcher_mean_curves
from elasticgraph.curves.srvf import Curve, arc_length, fit_to_endpoints, from_srvf, resample, to_srvf
from elasticgraph.errors import ArgumentError, DegenerateInputError
from elasticgraph.graph.model import Edge, ShapeGraph
from elasticgraph.graph.schema import CoarseRecord, MetricKind
from elasticgraph.matching.params import MatchingParams
from elasticgraph.matching.register import register_pair
from elasticgraph.matching.solvers import Registration
from elasticgraph.multiscale.dendrogram import Dendrogram, build_dendrogram
from elasticgraph.multiscale.metrics import internal_metric

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CoarseGraph:
    level: float
    labels: NDArray[np.int_]
    graph: ShapeGraph

    def __post_init__(self) -> None:
        labels = np.array(self.labels, dtype=int)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @property
    def n_clusters(self) -> int:
        return self.graph.n_nodes

    def members(self, source: ShapeGraph) -> dict[str, list[str]]:
        """Coarse node id -> ids of the source nodes it stands for."""
        out: dict[str, list[str]] = {node_id: [] for node_id in self.graph.node_ids}
        for i, label in enumerate(self.labels):
            out[self.graph.node_ids[label]].append(source.node_ids[i])
        return out

    def record(self, source: ShapeGraph) -> CoarseRecord:
        return CoarseRecord(level=self.level, n_clusters=self.n_clusters, clusters=self.members(source))


@dataclass(frozen=True, eq=False)
class ResolutionChoice:
    level: float
    coarse: CoarseGraph
    profile: tuple[tuple[float, float], ...]
    registration: Registration


def cluster_count(h: float, n: int) -> int:
    """max(1, round(h * n)) with halves rounded up."""
    if not 0.0 < h <= 1.0:
        raise ArgumentError(f"level h must lie in (0, 1], got {h}")
    return max(1, min(n, int(math.floor(h * n + 0.5))))


def _straight(p: NDArray[np.float64], q: NDArray[np.float64], n_samples: int) -> Curve:
    t = np.linspace(0.0, 1.0, n_samples)[:, None]
    return p + t * (q - p)


def _mean_curve(curves: list[Curve], p: NDArray[np.float64], q: NDArray[np.float64], n_samples: int) -> Curve:
    """Representative curve from ``p`` to ``q`` for a group of inter-cluster curves."""
    try:
        if len(curves) == 1:
            return fit_to_endpoints(curves[0], p, q)
        srvfs = [to_srvf(resample(c, n_samples)) for c in curves]
        mean = karcher_mean_curves(srvfs)
        return fit_to_endpoints(from_srvf(mean, p), p, q)
    except DegenerateInputError as exc:
        logger.warning("Straight segment used for a coarse edge: %s", exc)
        return _straight(p, q, n_samples)


def coarsen(
    g: ShapeGraph,
    dendrogram: Dendrogram,
    h: float,
    n_samples: int = DEFAULT_SAMPLES,
) -> CoarseGraph:
    """Cut ``dendrogram`` into ``max(1, round(h * n))`` clusters and build ``G^h``.

    Cluster representatives sit at the mean member position. Edges inside a
    cluster disappear; the edges between two clusters, oriented from the
    lower to the higher cluster id, are replaced by their Karcher mean
    fitted to the representative endpoints, weighted by its arc length.
    """
    n = g.n_nodes
    if dendrogram.n != n:
        raise ArgumentError(f"dendrogram has {dendrogram.n} leaves, graph has {n} nodes")
    k = cluster_count(h, n) if n else 0
    if k == 0:
        return CoarseGraph(h, np.zeros(0, dtype=int), ShapeGraph.empty())
    labels = dendrogram.cut(k)

    positions = np.array([g.positions[labels == c].mean(axis=0) for c in range(k)])
    ids = []
    for c in range(k):
        members = np.flatnonzero(labels == c)
        ids.append(g.node_ids[members[0]] if len(members) == 1 else f"c{c}")

    groups: dict[tuple[int, int], list[Curve]] = defaultdict(list)
    for (a, b), e in sorted(g.edges.items()):
        ca, cb = int(labels[a]), int(labels[b])
        if ca == cb:
            continue
        pts = e.points if ca < cb else e.points[::-1]
        groups[(min(ca, cb), max(ca, cb))].append(pts)

    edges = {}
    for (ca, cb), curves in sorted(groups.items()):
        curve = _mean_curve(curves, positions[ca], positions[cb], n_samples)
        edges[(ca, cb)] = Edge(curve, arc_length(curve))

    coarse = ShapeGraph(tuple(ids), positions, edges, {**g.metadata, "level": h})
    logger.debug("Coarsened %d nodes to %d at h=%.4g (%d edges)", n, k, h, len(edges))
    return CoarseGraph(h, labels, coarse)


def multiscale(
    g: ShapeGraph,
    levels: Sequence[float] = DEFAULT_LEVELS,
    kind: MetricKind | str = MetricKind.RESISTANCE,
    n_samples: int = DEFAULT_SAMPLES,
) -> list[CoarseGraph]:
    """Coarse graphs of ``g`` at every level, from one dendrogram."""
    dendrogram = build_dendrogram(internal_metric(g, kind))
    return [coarsen(g, dendrogram, h, n_samples) for h in levels]


def select_resolution(
    g1: ShapeGraph,
    g2: ShapeGraph,
    levels: Sequence[float] = DEFAULT_LEVELS,
    params: MatchingParams | None = None,
    kind: MetricKind | str = MetricKind.RESISTANCE,
) -> ResolutionChoice:
    """Coarsen ``g2`` at each level and keep the one closest to ``g1``.

    Ties go to the larger level.
    """
    if len(levels) == 0:
        raise ArgumentError("select_resolution needs at least one level")
    params = params or MatchingParams()
    for h in levels:
        cluster_count(h, max(g2.n_nodes, 1))
    dendrogram = build_dendrogram(internal_metric(g2, kind))

    best: tuple[float, float, CoarseGraph, Registration] | None = None
    profile = []
    for h in levels:
        coarse = coarsen(g2, dendrogram, h, params.n_samples)
        reg = register_pair(g1, coarse.graph, params)
        d = float(reg.d_graph)
        profile.append((float(h), d))
        logger.info("Level h=%.4g: %d nodes, d_graph=%.6g", h, coarse.n_clusters, d)
        if best is None or d < best[1] or (d == best[1] and h > best[0]):
            best = (float(h), d, coarse, reg)

    h_star, d_star, coarse, reg = best
    logger.info("Selected resolution h*=%.4g (d_graph=%.6g)", h_star, d_star)
    return ResolutionChoice(h_star, coarse, tuple(profile), reg)
