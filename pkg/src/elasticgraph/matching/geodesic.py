"""Geodesic paths between registered shape graphs, sampled as frames.

Each frame is expressed on the node indices of the padded source graph.
Matched real edges follow the weighted-shape geodesic with weight drawn as
opacity. An edge that vanishes at a leaf shrinks into its surviving
endpoint instead of fading.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from elasticgraph.curves.registration import d_srv, register
from elasticgraph.curves.srvf import Curve, from_srvf, fit_to_endpoints
from elasticgraph.errors import ArgumentError, DegenerateInputError, PreconditionError
from elasticgraph.graph.model import Edge, ShapeGraph
from elasticgraph.matching.distance import matched_edge_pairs
from elasticgraph.matching.params import MatchingParams
from elasticgraph.matching.solvers import Registration, check_permutation
from elasticgraph.metric.weighted import WeightedShape, weighted_geodesic

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FrameEdge:
    points: Curve
    weight: float
    opacity: float


@dataclass(frozen=True, eq=False)
class GeodesicFrame:
    u: float
    positions: NDArray[np.float64]
    node_opacity: NDArray[np.float64]
    edges: dict[tuple[int, int], FrameEdge]

    def to_graph(self, node_ids: tuple[str, ...]) -> ShapeGraph:
        """The frame as a shape graph; edges of weight zero are left out."""
        edges = {k: Edge(e.points, e.weight) for k, e in self.edges.items() if e.weight > 0}
        return ShapeGraph(node_ids, self.positions, edges, {"u": self.u})


@dataclass(frozen=True, eq=False)
class GraphGeodesic:
    node_ids: tuple[str, ...]
    frames: tuple[GeodesicFrame, ...]

    def __len__(self) -> int:
        return len(self.frames)

    def max_weight(self) -> float:
        return max((e.weight for f in self.frames for e in f.edges.values()), default=0.0)


@dataclass(frozen=True)
class _EdgeTrack:
    """One source-indexed edge slot and the weighted shapes at both ends."""

    key: tuple[int, int]
    start: WeightedShape
    end: WeightedShape
    shape_distance: float | None
    shrink_toward: int | None


def _node_frame(g0: ShapeGraph, g1: ShapeGraph, sigma: NDArray[np.int_], u: float):
    p0 = g0.positions
    p1 = g1.positions[sigma]
    null0 = g0.null_mask
    null1 = g1.null_mask[sigma]
    positions = np.full_like(p0, np.nan)
    opacity = np.zeros(len(p0))
    both = ~null0 & ~null1
    positions[both] = (1.0 - u) * p0[both] + u * p1[both]
    opacity[both] = 1.0
    only0 = ~null0 & null1
    positions[only0] = p0[only0]
    opacity[only0] = 1.0 - u
    only1 = null0 & ~null1
    positions[only1] = p1[only1]
    opacity[only1] = u
    return positions, opacity


def _vanishing_leaf(g: ShapeGraph, key: tuple[int, int], vanishes: NDArray[np.bool_]) -> int | None:
    """The endpoint of ``key`` to keep when the other end is a vanishing leaf."""
    a, b = key
    leaf_a = g.degree(a) == 1 and vanishes[a]
    leaf_b = g.degree(b) == 1 and vanishes[b]
    if leaf_a and not leaf_b:
        return b
    if leaf_b and not leaf_a:
        return a
    return None


def _tracks(g0: ShapeGraph, g1: ShapeGraph, sigma: NDArray[np.int_], n_samples: int) -> list[_EdgeTrack]:
    inverse = np.argsort(sigma)
    null0 = g0.null_mask
    null1_in_source = g1.null_mask[sigma]
    tracks = []
    for key0, key1, _ in matched_edge_pairs(g0, g1, sigma):
        if key0 is not None:
            a, b = key0
            e0 = g0.edges[key0]
            start = WeightedShape(e0.srvf(n_samples), e0.weight)
        else:
            j, k = key1
            a, b = sorted((int(inverse[j]), int(inverse[k])))
            start = None
        e1 = g1.edge(int(sigma[a]), int(sigma[b]))
        end = WeightedShape(e1.srvf(n_samples), e1.weight) if e1 is not None and key1 is not None else None

        if start is not None and end is not None:
            # Same symmetrized distance as d_eta and d_graph; the frames follow the warp onto start.
            distance = d_srv(start.shape, end.shape)
            end = WeightedShape(register(start.shape, end.shape).registered, end.weight)
            tracks.append(_EdgeTrack((a, b), start, end, distance, None))
        elif start is not None:
            keep = _vanishing_leaf(g0, (a, b), null1_in_source)
            tracks.append(_EdgeTrack((a, b), start, WeightedShape.null(n_samples), None, keep))
        else:
            keep_target = _vanishing_leaf(g1, key1, null0[inverse])
            keep = None if keep_target is None else int(inverse[keep_target])
            tracks.append(_EdgeTrack((a, b), WeightedShape.null(n_samples), end, None, keep))
    return tracks


def _place(shape: NDArray[np.float64], p: NDArray[np.float64], q: NDArray[np.float64]) -> Curve:
    curve = from_srvf(shape, p)
    try:
        return fit_to_endpoints(curve, p, q)
    except DegenerateInputError:
        t = np.linspace(0.0, 1.0, len(shape))[:, None]
        return p + t * (q - p)


def _edge_frame(
    track: _EdgeTrack, positions: NDArray[np.float64], eta: float, u: float
) -> FrameEdge:
    current = weighted_geodesic(track.start, track.end, eta, u, shape_distance=track.shape_distance)
    peak = max(track.start.weight, track.end.weight)
    shape = current.shape
    if current.is_null:
        shape = track.start.shape if not track.start.is_null else track.end.shape
    a, b = track.key
    pa, pb = positions[a], positions[b]
    if track.shrink_toward is None:
        opacity = current.weight / peak if peak > 0 else 0.0
        return FrameEdge(_place(shape, pa, pb), current.weight, opacity)

    fraction = current.weight / peak if peak > 0 else 0.0
    if track.shrink_toward == a:
        pb = pa + fraction * (pb - pa)
    else:
        pa = pb + fraction * (pa - pb)
    return FrameEdge(_place(shape, pa, pb), current.weight, 1.0 if fraction > 0 else 0.0)


def graph_geodesic(
    reg: Registration,
    n_frames: int,
    g0: ShapeGraph | None = None,
    g1: ShapeGraph | None = None,
) -> GraphGeodesic:
    """Sample the geodesic from ``g0`` to ``g1`` under ``reg`` at ``n_frames`` times.

    ``g0`` and ``g1`` default to the padded graphs stored on ``reg``.
    """
    if n_frames < 2:
        raise ArgumentError(f"n_frames must be at least 2, got {n_frames}")
    g0 = g0 if g0 is not None else reg.source
    g1 = g1 if g1 is not None else reg.target
    if g0 is None or g1 is None:
        raise PreconditionError("graph_geodesic needs the registered graphs")
    sigma = check_permutation(reg.permutation, g0.n_nodes)
    check_permutation(sigma, g1.n_nodes)
    params = reg.params or MatchingParams()

    tracks = _tracks(g0, g1, sigma, params.n_samples)
    frames = []
    for u in np.linspace(0.0, 1.0, n_frames):
        u = float(u)
        positions, opacity = _node_frame(g0, g1, sigma, u)
        edges = {t.key: _edge_frame(t, positions, params.eta, u) for t in tracks}
        for arr in (positions, opacity):
            arr.setflags(write=False)
        frames.append(GeodesicFrame(u, positions, opacity, edges))
    logger.info("Sampled %d geodesic frames over %d edge tracks", n_frames, len(tracks))
    return GraphGeodesic(g0.node_ids, tuple(frames))
